#include "teleportsim/decoherence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace teleportsim {

namespace {

constexpr double kPi = std::numbers::pi;

struct CollapseOp {
    double rate;
    SparseMatrix c;
    SparseMatrix c_dag;
    SparseMatrix c_dag_c;
};

CollapseOp make_collapse(double rate, const SparseMatrix& c) {
    CollapseOp op;
    op.rate = rate;
    op.c = c;
    op.c_dag = SparseMatrix(c.adjoint());
    op.c_dag_c = (op.c_dag * c).pruned();
    return op;
}

std::vector<CollapseOp> build_collapse_ops(const std::vector<int>& dims,
                                           const LindbladSpec& spec) {
    std::vector<CollapseOp> ops;
    const int cavity_site = static_cast<int>(dims.size()) - 1;
    const Matrix a = annihilation(dims.back());
    if (spec.kappa > 0.0) {
        ops.push_back(make_collapse(spec.kappa * (spec.n_bar + 1.0),
                                    embed_sparse(a, cavity_site, dims)));
        if (spec.n_bar > 0.0)
            ops.push_back(make_collapse(spec.kappa * spec.n_bar,
                                        embed_sparse(a.adjoint(), cavity_site, dims)));
    }
    if (spec.gamma_atom > 0.0)
        for (int site = 0; site < cavity_site; ++site)
            ops.push_back(make_collapse(spec.gamma_atom, embed_sparse(s_minus(), site, dims)));
    return ops;
}

// Shared derivative expression, usable with dense or sparse Hamiltonians.
template <typename HamMatrix>
void lindblad_derivative(const Matrix& rho, const HamMatrix& h,
                         const std::vector<CollapseOp>& ops, Matrix& out, Matrix& tmp) {
    out.noalias() = Complex(0.0, -1.0) * (h * rho);
    out.noalias() += Complex(0.0, 1.0) * (rho * h);
    for (const CollapseOp& op : ops) {
        tmp.noalias() = op.c * rho;
        out.noalias() += op.rate * (tmp * op.c_dag);
        out.noalias() -= (0.5 * op.rate) * (op.c_dag_c * rho);
        out.noalias() -= (0.5 * op.rate) * (rho * op.c_dag_c);
    }
}

void check_atoms_then_cavity(const std::vector<int>& dims) {
    if (dims.empty())
        throw DimensionMismatch("expected at least a cavity subsystem");
    for (size_t k = 0; k + 1 < dims.size(); ++k)
        if (dims[k] != 2)
            throw DimensionMismatch("atom subsystems preceding the cavity must be two-level");
}

std::vector<int> all_atom_sites(const std::vector<int>& dims) {
    std::vector<int> sites;
    for (int k = 0; k + 1 < static_cast<int>(dims.size()); ++k) sites.push_back(k);
    return sites;
}

DensityMatrix integrate_lindblad(const DensityMatrix& rho0, const DrivenCavityModel& model,
                                 const LindbladSpec& spec, double omega_drive, double t_final,
                                 double dt, IntegrationReport* report) {
    if (!(dt > 0.0) || dt > t_final)
        throw StepTooLarge("integrate_master_equation: need 0 < dt <= t_final");
    if (omega_drive * dt >= 0.05)
        throw StepTooLarge("integrate_master_equation: omega_drive*dt must stay below 0.05");

    const auto ops = build_collapse_ops(rho0.dims, spec);
    const long long n_steps = std::max(1LL, std::llround(t_final / dt));
    const double h = t_final / static_cast<double>(n_steps);
    const double trace0 = rho0.trace_real();

    Matrix rho = rho0.mat;
    const Eigen::Index dim = rho.rows();
    Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim);
    Matrix stage(dim, dim), tmp(dim, dim);

    double trace_err = 0.0;
    for (long long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const SparseMatrix h_a = model.hamiltonian_sparse(t);
        const SparseMatrix h_m = model.hamiltonian_sparse(t + 0.5 * h);
        const SparseMatrix h_b = model.hamiltonian_sparse(t + h);

        lindblad_derivative(rho, h_a, ops, k1, tmp);
        stage.noalias() = rho + (0.5 * h) * k1;
        lindblad_derivative(stage, h_m, ops, k2, tmp);
        stage.noalias() = rho + (0.5 * h) * k2;
        lindblad_derivative(stage, h_m, ops, k3, tmp);
        stage.noalias() = rho + h * k3;
        lindblad_derivative(stage, h_b, ops, k4, tmp);

        rho.noalias() += (h / 6.0) * k1;
        rho.noalias() += (h / 3.0) * k2;
        rho.noalias() += (h / 3.0) * k3;
        rho.noalias() += (h / 6.0) * k4;

        trace_err = std::max(trace_err, std::abs(rho.trace().real() - trace0));
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double min_eig = es.eigenvalues().minCoeff();
    if (report) {
        report->trace_error_max = trace_err;
        report->min_eigenvalue = min_eig;
        report->positivity_flagged = min_eig < -1e-8;
        report->n_steps = n_steps;
    }
    if (min_eig < -1e-4) {
        std::ostringstream os;
        os << "integrate_master_equation: min eigenvalue " << min_eig << " below -1e-4";
        throw PositivityLost(os.str());
    }
    return {rho0.dims, std::move(rho)};
}

} // namespace

void LindbladSpec::validate() const {
    if (kappa < 0.0 || n_bar < 0.0 || gamma_atom < 0.0)
        throw ValidationError("LindbladSpec: rates must be nonnegative");
}

DensityMatrix thermal_state(double n_bar, int n_max) {
    if (n_max < 1)
        throw ValidationError("thermal_state: n_max must be >= 1");
    if (n_bar < 0.0)
        throw ValidationError("thermal_state: n_bar must be >= 0");

    const int levels = n_max + 1;
    Eigen::VectorXd p(levels);
    if (n_bar == 0.0) {
        p.setZero();
        p(0) = 1.0;
    } else {
        const double ratio = n_bar / (1.0 + n_bar);
        double w = 1.0 / (1.0 + n_bar);
        for (int n = 0; n < levels; ++n) {
            p(n) = w;
            w *= ratio;
        }
    }
    const double kept = p.sum();
    if (1.0 - kept > 1e-4) {
        std::ostringstream os;
        os << "thermal_state: truncated tail mass " << 1.0 - kept << " exceeds 1e-4 at n_max="
           << n_max;
        throw TruncationTooSevere(os.str());
    }
    Matrix rho = Matrix::Zero(levels, levels);
    for (int n = 0; n < levels; ++n) rho(n, n) = p(n) / kept;
    return {{levels}, std::move(rho)};
}

Matrix lindblad_rhs(const DensityMatrix& rho, const Matrix& h, const LindbladSpec& spec,
                    double /*t*/) {
    spec.validate();
    check_atoms_then_cavity(rho.dims);
    if (rho.mat.rows() != rho.total_dim() || h.rows() != rho.mat.rows() || h.cols() != rho.mat.cols())
        throw DimensionMismatch("lindblad_rhs: Hamiltonian/state dimensions disagree");

    const auto ops = build_collapse_ops(rho.dims, spec);
    Matrix out(rho.mat.rows(), rho.mat.cols());
    Matrix tmp(rho.mat.rows(), rho.mat.cols());
    lindblad_derivative(rho.mat, h, ops, out, tmp);
    return out;
}

DensityMatrix integrate_master_equation(const DensityMatrix& rho0, const SystemParams& p,
                                        const LindbladSpec& spec, double t_final, double dt,
                                        IntegrationReport* report) {
    p.validate();
    spec.validate();
    check_atoms_then_cavity(rho0.dims);
    if (rho0.dims.back() != p.n_max + 1)
        throw DimensionMismatch("integrate_master_equation: cavity truncation disagrees with n_max");
    const DrivenCavityModel model(p, rho0.dims, all_atom_sites(rho0.dims));
    return integrate_lindblad(rho0, model, spec, p.omega_drive, t_final, dt, report);
}

namespace {

// q (x) channel as a three-atom amplitude vector, atom order 1, 2, 3.
Vector joint_input_amps(const UnknownQubit& q, const PureState& channel) {
    Vector joint(8);
    for (int s1 = 0; s1 < 2; ++s1) {
        const Complex c1 = (s1 == 0) ? q.alpha : q.beta;
        for (int s23 = 0; s23 < 4; ++s23) joint(s1 * 4 + s23) = c1 * channel.amps(s23);
    }
    return joint;
}

// Outcome-probability-weighted post-correction fidelity from per-outcome
// unnormalized atom-3 blocks.
double score_outcome_blocks(const UnknownQubit& q, const std::array<Matrix, 4>& blocks) {
    const PureState target = q.as_state();
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double prob = blocks[k].trace().real();
        if (prob <= 1e-14) continue;
        const Correction c =
            correction_for_outcome(static_cast<Level>(k / 2), static_cast<Level>(k % 2));
        const Matrix cm = correction_matrix(c);
        const Matrix corrected = cm * (blocks[k] / prob) * cm.adjoint();
        const double fid = (target.amps.adjoint() * corrected * target.amps)(0, 0).real();
        total += prob * fid;
    }
    return total;
}

// Accumulate the conditional atom-3 blocks of a pure four-subsystem state
// (atom1, atom2, atom3, cavity), weighted by w.
void accumulate_blocks(const Vector& psi, int n_cav, double w, std::array<Matrix, 4>& blocks) {
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) {
            Matrix& blk = blocks[a1 * 2 + a2];
            for (int s = 0; s < 2; ++s)
                for (int sp = 0; sp < 2; ++sp) {
                    Complex acc(0.0, 0.0);
                    for (int n = 0; n < n_cav; ++n) {
                        const Eigen::Index i = ((a1 * 2 + a2) * 2 + s) * n_cav + n;
                        const Eigen::Index j = ((a1 * 2 + a2) * 2 + sp) * n_cav + n;
                        acc += psi(i) * std::conj(psi(j));
                    }
                    blk(s, sp) += w * acc;
                }
        }
}

// Eigen-branches of a density matrix with weights above a floor.
std::vector<std::pair<double, Vector>> eigen_branches(const Matrix& rho, double floor = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    std::vector<std::pair<double, Vector>> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > floor)
            out.emplace_back(es.eigenvalues()(k), es.eigenvectors().col(k));
    return out;
}

} // namespace

double protocol_fidelity_open_system(const UnknownQubit& q, const SystemParams& p,
                                     const LindbladSpec& spec, const DensityMatrix& cavity_init,
                                     double dt, IntegrationReport* report) {
    q.validate();
    p.validate();
    spec.validate();
    const int n_cav = p.n_max + 1;
    if (cavity_init.dims != std::vector<int>{n_cav})
        throw DimensionMismatch("protocol_fidelity_open_system: cavity_init must match n_max");
    if (dt <= 0.0) dt = default_full_dt(p);

    const Vector atoms = joint_input_amps(q, generate_channel(p));
    const std::vector<int> dims{2, 2, 2, n_cav};
    const DrivenCavityModel model(p, dims, {0, 1});
    const double t_leg = interaction_time(p);

    // Without dissipators the master equation is the von Neumann equation;
    // a cavity state with few eigenbranches evolves faster as pure branches
    // under the same midpoint scheme.
    if (spec.closed()) {
        const auto branches = eigen_branches(cavity_init.mat);
        if (branches.size() <= 4) {
            std::array<Matrix, 4> blocks;
            blocks.fill(Matrix::Zero(2, 2));
            double norm_drift = 0.0;
            for (const auto& [w, cav] : branches) {
                Vector psi0 = Vector::Zero(8 * n_cav);
                for (int s = 0; s < 8; ++s)
                    for (int n = 0; n < n_cav; ++n) psi0(s * n_cav + n) = atoms(s) * cav(n);
                const Vector psi = model.evolve_state(psi0, t_leg, dt);
                norm_drift += w * std::abs(psi.squaredNorm() - 1.0);
                accumulate_blocks(psi, n_cav, w, blocks);
            }
            if (report) {
                report->trace_error_max = norm_drift;
                report->min_eigenvalue = 0.0;
                report->positivity_flagged = false;
                report->n_steps = std::max(1LL, std::llround(t_leg / dt));
            }
            return score_outcome_blocks(q, blocks);
        }
    }

    const Matrix atom_rho = atoms * atoms.adjoint();
    Matrix rho0 = kron(atom_rho, cavity_init.mat);
    const DensityMatrix evolved = integrate_lindblad(
        {dims, std::move(rho0)}, model, spec, p.omega_drive, t_leg, dt, report);

    // Conditional atom-3 blocks: project atoms 1, 2 and trace the cavity.
    std::array<Matrix, 4> blocks;
    blocks.fill(Matrix::Zero(2, 2));
    for (int k = 0; k < 4; ++k)
        for (int s = 0; s < 2; ++s)
            for (int sp = 0; sp < 2; ++sp) {
                Complex acc(0.0, 0.0);
                for (int n = 0; n < n_cav; ++n)
                    acc += evolved.mat((k * 2 + s) * n_cav + n, (k * 2 + sp) * n_cav + n);
                blocks[k](s, sp) = acc;
            }
    return score_outcome_blocks(q, blocks);
}

EndToEndResult end_to_end_full_model(const UnknownQubit& q, const SystemParams& p,
                                     const DensityMatrix& cavity_init, double dt) {
    q.validate();
    p.validate();
    const int n_cav = p.n_max + 1;
    if (cavity_init.dims != std::vector<int>{n_cav})
        throw DimensionMismatch("end_to_end_full_model: cavity_init must match n_max");
    if (dt <= 0.0) dt = default_full_dt(p);
    const double t_leg = interaction_time(p);

    const auto cavity_branches = eigen_branches(cavity_init.mat);

    // Channel leg: atoms 2, 3 cross the cavity starting from |gg>.
    const DrivenCavityModel channel_model(p, {2, 2, n_cav}, {0, 1});
    Matrix rho_atoms = Matrix::Zero(4, 4);
    for (const auto& [w, cav] : cavity_branches) {
        Vector psi0 = Vector::Zero(4 * n_cav);
        for (int n = 0; n < n_cav; ++n) psi0(3 * n_cav + n) = cav(n); // |gg> (x) cav
        const Vector psi = channel_model.evolve_state(psi0, t_leg, dt);
        for (int s = 0; s < 4; ++s)
            for (int sp = 0; sp < 4; ++sp) {
                Complex acc(0.0, 0.0);
                for (int n = 0; n < n_cav; ++n)
                    acc += psi(s * n_cav + n) * std::conj(psi(sp * n_cav + n));
                rho_atoms(s, sp) += w * acc;
            }
    }

    Vector target(4);
    target << 1.0 / std::sqrt(2.0), 0.0, 0.0, Complex(0.0, 1.0) / std::sqrt(2.0);
    EndToEndResult result{};
    result.channel_fidelity = (target.adjoint() * rho_atoms * target)(0, 0).real();

    // Teleportation leg: atoms 1, 2 cross a fresh cavity, atom 3 rides along.
    const DrivenCavityModel teleport_model(p, {2, 2, 2, n_cav}, {0, 1});
    std::array<Matrix, 4> blocks;
    blocks.fill(Matrix::Zero(2, 2));
    for (const auto& [wc, chan] : eigen_branches(rho_atoms))
        for (const auto& [wv, cav] : cavity_branches) {
            const Vector atoms = joint_input_amps(q, PureState{{2, 2}, chan});
            Vector psi0 = Vector::Zero(8 * n_cav);
            for (int s = 0; s < 8; ++s)
                for (int n = 0; n < n_cav; ++n) psi0(s * n_cav + n) = atoms(s) * cav(n);
            const Vector psi = teleport_model.evolve_state(psi0, t_leg, dt);
            accumulate_blocks(psi, n_cav, wc * wv, blocks);
        }
    result.teleport_fidelity = score_outcome_blocks(q, blocks);
    return result;
}

} // namespace teleportsim
