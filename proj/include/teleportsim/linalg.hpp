#ifndef TELEPORTSIM_LINALG_HPP
#define TELEPORTSIM_LINALG_HPP

#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "teleportsim/errors.hpp"

namespace teleportsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kHermitianTol = 1e-8;
inline constexpr double kUnitaryTol = 1e-10;

/// Kronecker product, row-major subsystem convention:
/// result[(i*p+k),(j*q+l)] = a(i,j)*b(k,l) for b of shape p x q.
template <typename DerivedA, typename DerivedB>
Matrix kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    const Eigen::Index p = b.rows(), q = b.cols();
    Matrix out(a.rows() * p, a.cols() * q);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * p, j * q, p, q) = a(i, j) * b;
    return out;
}

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b);

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const Matrix& m, double tol = kUnitaryTol) {
    return m.rows() == m.cols() &&
           max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())) <= tol;
}

/// exp(-i h t) for Hermitian h, via eigendecomposition (unitary up to rounding).
/// Throws NonHermitianInput if max|h - h^dag| > 1e-8.
Matrix expm_unitary(const Matrix& h, double t);

// ---------------------------------------------------------------------------
// Composite-space state types.
//
// Tensor order is fixed globally: atom1 (x) atom2 (x) atom3 (x) cavity,
// absent subsystems skipped; the cavity, when present, is the last factor.
// Single-atom basis |e> = (1,0)^T, |g> = (0,1)^T; cavity Fock basis ascending.
// ---------------------------------------------------------------------------

inline Eigen::Index product_of(const std::vector<int>& dims) {
    Eigen::Index n = 1;
    for (int d : dims) n *= d;
    return n;
}

/// Dense complex state vector over a composite Hilbert space.
/// May be subnormalized (norm^2 in [0,1]) to represent collapse branches.
struct PureState {
    std::vector<int> dims;
    Vector amps;

    PureState() = default;
    PureState(std::vector<int> d, Vector a) : dims(std::move(d)), amps(std::move(a)) {}

    Eigen::Index total_dim() const { return product_of(dims); }
    double norm() const { return amps.norm(); }

    PureState normalized() const {
        const double n = norm();
        if (n <= 0.0) throw ValidationError("cannot normalize a zero state");
        return {dims, amps / n};
    }

    /// Checks amplitude count and norm^2 in [0, 1 + slack].
    void validate(double tol = 1e-10) const;
};

/// Dense Hermitian matrix over a composite Hilbert space.
struct DensityMatrix {
    std::vector<int> dims;
    Matrix mat;

    DensityMatrix() = default;
    DensityMatrix(std::vector<int> d, Matrix m) : dims(std::move(d)), mat(std::move(m)) {}

    Eigen::Index total_dim() const { return product_of(dims); }
    double trace_real() const { return mat.trace().real(); }

    /// Hermitian within 1e-10, trace real in (0, 1 + 1e-10], eigenvalues >= -1e-8.
    void validate(double herm_tol = 1e-10, double eig_tol = 1e-8) const;
};

DensityMatrix pure_to_density(const PureState& psi);

/// Trace out every subsystem not listed in `keep`; kept subsystems stay in
/// their original order. Throws BadSubsystemIndex on empty/invalid `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep);

/// |<a|b>|^2; both states must be normalized within 1e-8.
double fidelity_up_to_phase(const PureState& a, const PureState& b);

/// <psi|rho|psi> for a normalized pure state against a density matrix.
double fidelity(const PureState& psi, const DensityMatrix& rho);

// --- fixed operator zoo ------------------------------------------------------

Matrix identity(int n);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
Matrix s_plus();   // |e><g|
Matrix s_minus();  // |g><e|
Matrix s_z();      // (|e><e| - |g><g|)/2

/// Cavity annihilation operator on n_levels Fock states |0..n_levels-1>.
Matrix annihilation(int n_levels);

Vector basis_e();
Vector basis_g();
Vector fock(int n, int n_levels);

/// Embed a single-subsystem operator at position `site` of a composite space.
Matrix embed_op(const Matrix& op, int site, const std::vector<int>& dims);
SparseMatrix embed_sparse(const Matrix& op, int site, const std::vector<int>& dims);

} // namespace teleportsim

#endif // TELEPORTSIM_LINALG_HPP
