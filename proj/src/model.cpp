#include "teleportsim/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace teleportsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

// g = 0 is allowed as a degenerate limit for the Hamiltonian builders; the
// derived-timing operations below additionally require g > 0.
void SystemParams::validate() const {
    std::ostringstream bad;
    if (!(g >= 0.0)) bad << "g must be >= 0; ";
    if (!(delta > 0.0)) bad << "delta must be > 0; ";
    if (!(omega_drive >= 0.0)) bad << "omega_drive must be >= 0; ";
    if (n_max < 1) bad << "n_max must be >= 1; ";
    if (!bad.str().empty())
        throw ValidationError("SystemParams: " + bad.str());
}

DerivedParams derive(const SystemParams& p) {
    p.validate();
    DerivedParams d{};
    d.lambda = coupling_lambda(p);
    d.t_channel = kPi / (4.0 * d.lambda);
    const double turns = p.omega_drive * d.t_channel / kPi;
    d.drive_multiple = std::llround(turns);
    d.drive_residual = std::abs(p.omega_drive * d.t_channel - static_cast<double>(d.drive_multiple) * kPi);
    return d;
}

double coupling_lambda(const SystemParams& p) {
    p.validate();
    if (!(p.g > 0.0))
        throw ValidationError("coupling_lambda: g must be > 0");
    return p.g * p.g / (2.0 * p.delta);
}

double interaction_time(const SystemParams& p) {
    p.validate();
    if (!(p.g > 0.0))
        throw ValidationError("interaction_time: g must be > 0");
    return kPi * p.delta / (2.0 * p.g * p.g);
}

Matrix build_effective_hamiltonian(const SystemParams& p, int n_atoms) {
    if (n_atoms != 2)
        throw UnsupportedAtomCount("build_effective_hamiltonian: only two atoms share a cavity crossing");
    const double lam = coupling_lambda(p);
    return lam * (Matrix::Identity(4, 4) + kron(sigma_x(), sigma_x()));
}

Matrix build_h0(const SystemParams& p, int n_atoms) {
    if (n_atoms != 2)
        throw UnsupportedAtomCount("build_h0: only two atoms share a cavity crossing");
    p.validate();
    return p.omega_drive * (kron(sigma_x(), identity(2)) + kron(identity(2), sigma_x()));
}

Matrix effective_propagator(const SystemParams& p, double t) {
    // H0 factor on the left. The construction never reads n_max.
    return expm_unitary(build_h0(p), t) * expm_unitary(build_effective_hamiltonian(p), t);
}

Matrix build_full_interaction_hamiltonian(const SystemParams& p, double t) {
    p.validate();
    return DrivenCavityModel(p, {2, 2, p.n_max + 1}, {0, 1}).hamiltonian(t);
}

double default_full_dt(const SystemParams& p) {
    p.validate();
    double dt = 0.01 / p.delta;
    if (p.omega_drive > 0.0) dt = std::min(dt, 0.01 / p.omega_drive);
    return dt;
}

Matrix full_propagator(const SystemParams& p, double t_final, double dt) {
    p.validate();
    if (!(dt > 0.0) || dt > t_final)
        throw StepTooLarge("full_propagator: need 0 < dt <= t_final");
    if (p.omega_drive * dt >= 0.1)
        throw StepTooLarge("full_propagator: omega_drive*dt must stay below 0.1");
    const long long n_steps = std::max(1LL, std::llround(t_final / dt));
    const double h = t_final / static_cast<double>(n_steps);

    const DrivenCavityModel model(p, {2, 2, p.n_max + 1}, {0, 1});
    const Eigen::Index dim = 4 * (p.n_max + 1);
    Matrix u = Matrix::Identity(dim, dim);
    for (long long k = 0; k < n_steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * h;
        u = expm_unitary(model.hamiltonian(t_mid), h) * u;
    }
    return u;
}

DrivenCavityModel::DrivenCavityModel(const SystemParams& p, std::vector<int> dims,
                                     std::vector<int> coupled_atom_sites)
    : g_(p.g), delta_(p.delta), dims_(std::move(dims)) {
    p.validate();
    const int n_sub = static_cast<int>(dims_.size());
    if (n_sub < 1 || dims_.back() != p.n_max + 1)
        throw DimensionMismatch("DrivenCavityModel: cavity (last subsystem) must have n_max+1 levels");
    for (int k = 0; k + 1 < n_sub; ++k)
        if (dims_[k] != 2)
            throw DimensionMismatch("DrivenCavityModel: atom subsystems must be two-level");

    const int cavity_site = n_sub - 1;
    SparseMatrix a_dag = embed_sparse(annihilation(dims_.back()).adjoint(), cavity_site, dims_);
    SparseMatrix s_minus_total(product_of(dims_), product_of(dims_));
    SparseMatrix drive_total(product_of(dims_), product_of(dims_));
    for (int site : coupled_atom_sites) {
        if (site < 0 || site >= cavity_site)
            throw BadSubsystemIndex("DrivenCavityModel: coupled site out of range");
        s_minus_total = s_minus_total + embed_sparse(s_minus(), site, dims_);
        drive_total = drive_total + embed_sparse(sigma_x(), site, dims_);
    }
    coupling_ = (a_dag * s_minus_total).pruned();
    coupling_dag_ = SparseMatrix(coupling_.adjoint());
    drive_ = (p.omega_drive * drive_total).pruned();

    const double n_coupled = static_cast<double>(coupled_atom_sites.size());
    norm_bound_ = 2.0 * g_ * n_coupled * std::sqrt(static_cast<double>(p.n_max)) +
                  p.omega_drive * n_coupled + 1.0;
}

Matrix DrivenCavityModel::hamiltonian(double t) const {
    return Matrix(hamiltonian_sparse(t));
}

SparseMatrix DrivenCavityModel::hamiltonian_sparse(double t) const {
    const Complex ph = g_ * std::exp(Complex(0.0, -delta_ * t));
    SparseMatrix h = ph * coupling_;
    h += std::conj(ph) * coupling_dag_;
    h += drive_;
    return h;
}

void DrivenCavityModel::apply_hamiltonian(double t, const Vector& v, Vector& out) const {
    const Complex ph = g_ * std::exp(Complex(0.0, -delta_ * t));
    out.noalias() = ph * (coupling_ * v);
    out.noalias() += std::conj(ph) * (coupling_dag_ * v);
    out.noalias() += drive_ * v;
}

Vector DrivenCavityModel::evolve_state(Vector psi, double t_final, double dt) const {
    if (!(dt > 0.0) || dt > t_final)
        throw StepTooLarge("evolve_state: need 0 < dt <= t_final");
    if (psi.size() != product_of(dims_))
        throw DimensionMismatch("evolve_state: state does not match model dims");
    const long long n_steps = std::max(1LL, std::llround(t_final / dt));
    const double h = t_final / static_cast<double>(n_steps);

    // Per-step Taylor order for series tail below 1e-16 at theta = ||H||*h.
    const long long n_sub = std::max(1LL, static_cast<long long>(std::ceil(norm_bound_ * h / 0.5)));
    const double hs = h / static_cast<double>(n_sub);
    const double theta = norm_bound_ * hs;
    int order = 4;
    double tail = theta * theta * theta * theta * theta / 120.0;
    while (tail > 1e-16 && order < 40) {
        ++order;
        tail *= theta / (order + 1);
    }

    Vector term(psi.size()), tmp(psi.size());
    for (long long k = 0; k < n_steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * h;
        for (long long s = 0; s < n_sub; ++s) {
            term = psi;
            for (int j = 1; j <= order; ++j) {
                apply_hamiltonian(t_mid, term, tmp);
                term = (Complex(0.0, -hs) / static_cast<double>(j)) * tmp;
                psi += term;
            }
        }
    }
    return psi;
}

FeasibilityResult feasibility_check(double g_rad_per_s, double delta_rad_per_s,
                                    double radiative_time_s) {
    FeasibilityResult r{};
    r.t_interaction_s = kPi * delta_rad_per_s / (2.0 * g_rad_per_s * g_rad_per_s);
    r.radiative_time_s = radiative_time_s;
    r.ratio = r.t_interaction_s / radiative_time_s;
    return r;
}

} // namespace teleportsim
