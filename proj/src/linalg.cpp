#include "teleportsim/linalg.hpp"

#include <cmath>
#include <sstream>

namespace teleportsim {

SparseMatrix sparse_kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<size_t>(a.nonZeros()) * static_cast<size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(ia.row() * b.rows() + ib.row(),
                                       ia.col() * b.cols() + ib.col(),
                                       ia.value() * ib.value());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Matrix expm_unitary(const Matrix& h, double t) {
    if (h.rows() != h.cols())
        throw NonHermitianInput("expm_unitary: matrix is not square");
    const double dev = max_abs(h - h.adjoint());
    if (dev > kHermitianTol) {
        std::ostringstream os;
        os << "expm_unitary: max|h - h^dag| = " << dev << " exceeds " << kHermitianTol;
        throw NonHermitianInput(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    Vector phases(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -ev(k) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void PureState::validate(double tol) const {
    if (amps.size() != total_dim())
        throw DimensionMismatch("PureState: amplitude count does not match dims product");
    for (int d : dims)
        if (d < 1) throw ValidationError("PureState: nonpositive subsystem dimension");
    const double n2 = amps.squaredNorm();
    if (n2 > 1.0 + tol)
        throw ValidationError("PureState: norm^2 exceeds 1");
}

void DensityMatrix::validate(double herm_tol, double eig_tol) const {
    if (mat.rows() != mat.cols() || mat.rows() != total_dim())
        throw DimensionMismatch("DensityMatrix: shape does not match dims product");
    if (max_abs(mat - mat.adjoint()) > herm_tol)
        throw ValidationError("DensityMatrix: not Hermitian within tolerance");
    const Complex tr = mat.trace();
    if (std::abs(tr.imag()) > herm_tol || tr.real() <= 0.0 || tr.real() > 1.0 + 1e-10)
        throw ValidationError("DensityMatrix: trace outside (0, 1]");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat);
    if (es.eigenvalues().minCoeff() < -eig_tol)
        throw ValidationError("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix pure_to_density(const PureState& psi) {
    return {psi.dims, psi.amps * psi.amps.adjoint()};
}

namespace {

// Decompose a flat composite index into per-subsystem indices (row-major).
void split_index(Eigen::Index flat, const std::vector<int>& dims, std::vector<int>& out) {
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = static_cast<int>(flat % dims[k]);
        flat /= dims[k];
    }
}

Eigen::Index join_index(const std::vector<int>& idx, const std::vector<int>& dims) {
    Eigen::Index flat = 0;
    for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
    return flat;
}

} // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int n_sub = static_cast<int>(rho.dims.size());
    if (keep.empty())
        throw BadSubsystemIndex("partial_trace: keep set is empty");
    std::vector<bool> kept(n_sub, false);
    for (int k : keep) {
        if (k < 0 || k >= n_sub)
            throw BadSubsystemIndex("partial_trace: subsystem index out of range");
        if (kept[k])
            throw BadSubsystemIndex("partial_trace: duplicate subsystem index");
        kept[k] = true;
    }
    if (rho.mat.rows() != rho.total_dim())
        throw DimensionMismatch("partial_trace: matrix does not match dims");

    std::vector<int> keep_sorted;
    std::vector<int> kept_dims, traced_dims;
    std::vector<int> traced_sites;
    for (int k = 0; k < n_sub; ++k) {
        if (kept[k]) {
            keep_sorted.push_back(k);
            kept_dims.push_back(rho.dims[k]);
        } else {
            traced_sites.push_back(k);
            traced_dims.push_back(rho.dims[k]);
        }
    }
    const Eigen::Index dk = product_of(kept_dims);
    const Eigen::Index dt = product_of(traced_dims);

    Matrix out = Matrix::Zero(dk, dk);
    std::vector<int> row_idx(n_sub), col_idx(n_sub);
    std::vector<int> ki(keep_sorted.size()), kj(keep_sorted.size()), ti(traced_sites.size());
    for (Eigen::Index i = 0; i < dk; ++i) {
        split_index(i, kept_dims, ki);
        for (Eigen::Index j = 0; j < dk; ++j) {
            split_index(j, kept_dims, kj);
            Complex acc(0.0, 0.0);
            for (Eigen::Index t = 0; t < dt; ++t) {
                split_index(t, traced_dims, ti);
                for (size_t s = 0; s < keep_sorted.size(); ++s) {
                    row_idx[keep_sorted[s]] = ki[s];
                    col_idx[keep_sorted[s]] = kj[s];
                }
                for (size_t s = 0; s < traced_sites.size(); ++s) {
                    row_idx[traced_sites[s]] = ti[s];
                    col_idx[traced_sites[s]] = ti[s];
                }
                acc += rho.mat(join_index(row_idx, rho.dims), join_index(col_idx, rho.dims));
            }
            out(i, j) = acc;
        }
    }
    return {kept_dims, std::move(out)};
}

DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep) {
    return partial_trace(pure_to_density(psi), keep);
}

double fidelity_up_to_phase(const PureState& a, const PureState& b) {
    if (a.dims != b.dims)
        throw DimensionMismatch("fidelity_up_to_phase: dims differ");
    constexpr double norm_tol = 1e-8;
    if (std::abs(a.norm() - 1.0) > norm_tol || std::abs(b.norm() - 1.0) > norm_tol)
        throw ValidationError("fidelity_up_to_phase: states must be normalized");
    return std::norm(a.amps.dot(b.amps));
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
    if (psi.dims != rho.dims)
        throw DimensionMismatch("fidelity: dims differ");
    return (psi.amps.adjoint() * rho.mat * psi.amps)(0, 0).real();
}

Matrix identity(int n) { return Matrix::Identity(n, n); }

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix s_plus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Matrix s_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Matrix s_z() { return 0.5 * sigma_z(); }

Matrix annihilation(int n_levels) {
    Matrix a = Matrix::Zero(n_levels, n_levels);
    for (int n = 1; n < n_levels; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Vector basis_e() {
    Vector v = Vector::Zero(2);
    v(0) = 1.0;
    return v;
}

Vector basis_g() {
    Vector v = Vector::Zero(2);
    v(1) = 1.0;
    return v;
}

Vector fock(int n, int n_levels) {
    if (n < 0 || n >= n_levels)
        throw BadSubsystemIndex("fock: level out of range");
    Vector v = Vector::Zero(n_levels);
    v(n) = 1.0;
    return v;
}

Matrix embed_op(const Matrix& op, int site, const std::vector<int>& dims) {
    if (site < 0 || site >= static_cast<int>(dims.size()))
        throw BadSubsystemIndex("embed_op: site out of range");
    if (op.rows() != dims[site] || op.cols() != dims[site])
        throw DimensionMismatch("embed_op: operator does not match site dimension");
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < static_cast<int>(dims.size()); ++k)
        out = kron(out, k == site ? op : Matrix(Matrix::Identity(dims[k], dims[k])));
    return out;
}

SparseMatrix embed_sparse(const Matrix& op, int site, const std::vector<int>& dims) {
    return embed_op(op, site, dims).sparseView();
}

} // namespace teleportsim
