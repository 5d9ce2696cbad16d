#ifndef TELEPORTSIM_MODEL_HPP
#define TELEPORTSIM_MODEL_HPP

#include <vector>

#include "teleportsim/linalg.hpp"

namespace teleportsim {

/// Physical parameters in units of the atom-cavity coupling (g = 1 scale).
/// delta = omega_0 - omega_a > 0 is the atom-cavity detuning; omega_drive is
/// the classical Rabi frequency; n_max the cavity Fock truncation.
struct SystemParams {
    double g = 1.0;
    double delta = 10.0;
    double omega_drive = 50.0;
    int n_max = 10;

    void validate() const;

    // Regime quality ratios, recorded not enforced: the dispersive limit wants
    // delta >> g/2, the strong-driving limit wants 2*omega_drive >> delta.
    double ratio_detuning() const { return delta / (g / 2.0); }
    double ratio_drive() const { return 2.0 * omega_drive / delta; }
};

struct DerivedParams {
    double lambda;            // g^2 / (2 delta)
    double t_channel;         // pi / (4 lambda)
    long long drive_multiple; // N with omega_drive * t_channel = N*pi
    double drive_residual;    // |omega_drive * t_channel - N*pi|
};

DerivedParams derive(const SystemParams& p);

/// Effective atom-atom coupling lambda = g^2/(2 delta).
double coupling_lambda(const SystemParams& p);

/// Channel-generation / teleportation interaction time t = pi/(4 lambda).
double interaction_time(const SystemParams& p);

/// Effective two-atom Hamiltonian: lambda * (I4 + sigma_x (x) sigma_x).
/// Contains no cavity operators. Only n_atoms == 2 is supported.
Matrix build_effective_hamiltonian(const SystemParams& p, int n_atoms = 2);

/// Driving part exponentiated separately: omega_drive * (sx (x) I + I (x) sx).
Matrix build_h0(const SystemParams& p, int n_atoms = 2);

/// U(t) = exp(-i H0 t) * exp(-i Heff t), 4x4 unitary on the two atoms.
/// Never touches the cavity truncation.
Matrix effective_propagator(const SystemParams& p, double t);

/// Full driven model in the rotating frame (atoms at omega_0, cavity at
/// omega_a), leaving the explicitly time-dependent interaction
///   H_I(t) = sum_j [ g (a^dag S_j^- e^{-i delta t} + a S_j^+ e^{+i delta t})
///                    + omega_drive (S_j^+ + S_j^-) ].
/// Dimension 4*(n_max+1), tensor order atom1 (x) atom2 (x) cavity.
Matrix build_full_interaction_hamiltonian(const SystemParams& p, double t);

/// dt resolving the fastest scale by two orders of magnitude.
double default_full_dt(const SystemParams& p);

/// Time-ordered product of midpoint-rule step unitaries
/// prod_k exp(-i H_I(t_k + dt/2) dt) over [0, t_final].
/// Throws StepTooLarge unless 0 < dt <= t_final and omega_drive*dt < 0.1.
Matrix full_propagator(const SystemParams& p, double t_final, double dt);

/// Sparse applier for the same generator on an arbitrary composite space:
/// the listed atom sites couple to the cavity (always the last subsystem),
/// remaining atom sites are spectators. Used for long-horizon state runs.
class DrivenCavityModel {
public:
    DrivenCavityModel(const SystemParams& p, std::vector<int> dims,
                      std::vector<int> coupled_atom_sites);

    const std::vector<int>& dims() const { return dims_; }

    Matrix hamiltonian(double t) const;
    SparseMatrix hamiltonian_sparse(double t) const;
    void apply_hamiltonian(double t, const Vector& v, Vector& out) const;

    /// Midpoint-rule product of step unitaries applied to a state vector;
    /// each step exponential is evaluated by a machine-precision Taylor
    /// series (agrees with the eigendecomposition route to rounding).
    Vector evolve_state(Vector psi, double t_final, double dt) const;

private:
    double g_, delta_;
    std::vector<int> dims_;
    SparseMatrix coupling_;       // a^dag * sum_j S_j^-
    SparseMatrix coupling_dag_;
    SparseMatrix drive_;          // omega_drive * sum_j sigma_x_j
    double norm_bound_;           // upper bound on ||H(t)||
};

/// Feasibility numbers for a physical regime: interaction time in seconds
/// against the atomic radiative time.
struct FeasibilityResult {
    double t_interaction_s;
    double radiative_time_s;
    double ratio;
};

FeasibilityResult feasibility_check(double g_rad_per_s, double delta_rad_per_s,
                                    double radiative_time_s = 3e-2);

} // namespace teleportsim

#endif // TELEPORTSIM_MODEL_HPP
