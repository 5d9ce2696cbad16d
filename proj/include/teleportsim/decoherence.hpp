#ifndef TELEPORTSIM_DECOHERENCE_HPP
#define TELEPORTSIM_DECOHERENCE_HPP

#include "teleportsim/protocol.hpp"

namespace teleportsim {

/// Open-system rates: cavity decay kappa, thermal occupancy n_bar, atomic
/// spontaneous emission gamma_atom (default 0; the protocol is bounded by
/// the radiative time instead).
struct LindbladSpec {
    double kappa = 0.0;
    double n_bar = 0.0;
    double gamma_atom = 0.0;

    void validate() const;
    bool closed() const { return kappa == 0.0 && gamma_atom == 0.0; }
};

/// Truncated thermal cavity state, rho_n ~ n_bar^n/(1+n_bar)^{n+1},
/// renormalized. Throws TruncationTooSevere if the dropped tail mass
/// exceeds 1e-4.
DensityMatrix thermal_state(double n_bar, int n_max);

/// drho/dt = -i[h, rho] + kappa (n_bar+1) D[a] rho + kappa n_bar D[a^dag] rho
///           + gamma sum_j D[S_j^-] rho, with D[c] rho = c rho c^dag
///           - (c^dag c rho + rho c^dag c)/2.
/// The last subsystem of rho.dims is the cavity; all preceding ones are atoms.
Matrix lindblad_rhs(const DensityMatrix& rho, const Matrix& h,
                    const LindbladSpec& spec, double t);

struct IntegrationReport {
    double trace_error_max = 0.0;
    double min_eigenvalue = 0.0;
    bool positivity_flagged = false;
    long long n_steps = 0;
};

/// Classic fixed-step 4th-order integration of the master equation under the
/// rotating-frame driven model built from `p` (every atom subsystem of
/// rho0.dims is coupled to the cavity). Enforces omega_drive*dt < 0.05.
/// Throws PositivityLost if the final state has an eigenvalue below -1e-4.
DensityMatrix integrate_master_equation(const DensityMatrix& rho0, const SystemParams& p,
                                        const LindbladSpec& spec, double t_final, double dt,
                                        IntegrationReport* report = nullptr);

/// Full teleportation leg under the master equation: atoms 1, 2 cross the
/// cavity, atom 3 is a spectator; afterwards the four product-basis outcomes
/// are projected, Table-1 corrections applied, and the outcome-probability-
/// weighted fidelity of atom 3 against the input is returned.
/// dt <= 0 selects the default step.
double protocol_fidelity_open_system(const UnknownQubit& q, const SystemParams& p,
                                     const LindbladSpec& spec, const DensityMatrix& cavity_init,
                                     double dt = -1.0, IntegrationReport* report = nullptr);

/// Closed-system end-to-end run under the time-ordered full model: channel
/// generation (atoms 2, 3 + cavity) followed by the teleportation leg
/// (atoms 1, 2 + fresh cavity, atom 3 spectator), measurement and correction.
struct EndToEndResult {
    double channel_fidelity;  // full-model channel vs (|ee> + i|gg>)/sqrt(2)
    double teleport_fidelity; // outcome-probability-weighted, post-correction
};

EndToEndResult end_to_end_full_model(const UnknownQubit& q, const SystemParams& p,
                                     const DensityMatrix& cavity_init, double dt = -1.0);

} // namespace teleportsim

#endif // TELEPORTSIM_DECOHERENCE_HPP
