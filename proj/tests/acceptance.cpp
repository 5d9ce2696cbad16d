// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
// Run a subset with e.g. `acceptance 1 2 3 7 8`; no arguments runs everything.
//
// The heavy full-model criteria (4-6) take tens of minutes in total on one
// core; their thresholds were calibrated once against the time-ordered
// integrator at the stated regimes and are frozen here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "teleportsim/cli.hpp"
#include "teleportsim/decoherence.hpp"

using namespace teleportsim;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("[%s] C%d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

SystemParams base_params() { return {1.0, 10.0, 50.0, 10}; }

PureState channel_target() {
    Vector v(4);
    v << 1.0 / std::sqrt(2.0), 0.0, 0.0, Complex(0.0, 1.0) / std::sqrt(2.0);
    return {{2, 2}, v};
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// C1: channel generation against the closed-form target.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double fid = fidelity_up_to_phase(generate_channel(base_params()), channel_target());
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "channel fidelity vs (|ee>+i|gg>)/sqrt2 = %.15f (>= 1-1e-10) [%.2fs]", fid,
                  elapsed_s(t0));
    report(1, fid >= 1.0 - 1e-10, buf);
}

// C2: Table-1 regression over 100 Haar inputs, all four branches enumerated.
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemParams p = base_params();
    double worst_prob = 0.0, worst_fid = 1.0, worst_sum = 0.0;
    for (int s = 0; s < 100; ++s) {
        const UnknownQubit q = sample_unknown_qubit(10000 + s);
        double sum = 0.0;
        for (const TeleportResult& r : enumerate_protocol(q, p)) {
            worst_prob = std::max(worst_prob, std::abs(r.outcome.probability - 0.25));
            worst_fid = std::min(worst_fid, r.fidelity);
            sum += r.outcome.probability;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    const bool ok = worst_prob <= 1e-9 && worst_fid >= 1.0 - 1e-9 && worst_sum <= 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "max|p-1/4|=%.2e, min fidelity=%.12f, max|sum(p)-1|=%.2e over 100 inputs [%.2fs]",
                  worst_prob, worst_fid, worst_sum, elapsed_s(t0));
    report(2, ok, buf);
}

// C3: propagator path vs independent closed-form transcriptions at 20 random
// (lambda t, Omega t) points.
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(333);
    double worst5 = 1.0, worst7 = 1.0;
    for (int k = 0; k < 20; ++k) {
        SystemParams p = base_params();
        const double t = oracles::uniform(rng, 1.0, 20.0);
        p.omega_drive = oracles::uniform(rng, 0.1, 3.0);
        const double lam_t = coupling_lambda(p) * t;
        const double om_t = p.omega_drive * t;

        Vector gg = Vector::Zero(4);
        gg(3) = 1.0;
        const PureState via_prop{{2, 2}, effective_propagator(p, t) * gg};
        const PureState via_eq5{{2, 2}, oracles::eq5_state(lam_t, om_t)};
        worst5 = std::min(worst5, fidelity_up_to_phase(via_prop, via_eq5));

        const UnknownQubit q = sample_unknown_qubit(777 + k);
        const PureState joint = teleport_evolution(q, channel_target(), p, t);
        const PureState via_eq7{{2, 2, 2}, oracles::eq7_state(q.alpha, q.beta, lam_t, om_t)};
        worst7 = std::min(worst7, fidelity_up_to_phase(joint, via_eq7));
    }
    const bool ok = worst5 >= 1.0 - 1e-9 && worst7 >= 1.0 - 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "min fidelity vs closed forms: two-atom %.12f, joint %.12f (>= 1-1e-9) [%.2fs]",
                  worst5, worst7, elapsed_s(t0));
    report(3, ok, buf);
}

// C4: effective-vs-full validation. The time-ordered product on |gg,0> must
// track the effective propagator, the end-to-end run must reach the frozen
// 0.95 gate, and doubling the regime ratios must improve it monotonically.
void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemParams p = base_params();
    const double t_leg = interaction_time(p);
    const int nc = p.n_max + 1;

    // Direct oracle run: restricted two-atom action of the full propagator.
    const Matrix u_full = full_propagator(p, t_leg, default_full_dt(p));
    Vector gg0 = Vector::Zero(4 * nc);
    gg0(3 * nc) = 1.0;
    const Vector full_state = u_full * gg0;
    Vector gg = Vector::Zero(4);
    gg(3) = 1.0;
    const Vector eff_atoms = effective_propagator(p, t_leg) * gg;
    Vector eff_state = Vector::Zero(4 * nc);
    for (int s = 0; s < 4; ++s) eff_state(s * nc) = eff_atoms(s);
    const double oracle_fid = std::norm(eff_state.dot(full_state));
    std::printf("  C4 oracle: |<eff|full>|^2 on |gg,0> = %.6f [%.1fs]\n", oracle_fid,
                elapsed_s(t0));
    std::fflush(stdout);

    // End-to-end runs (channel + teleport leg under the midpoint product).
    const DensityMatrix vac = pure_to_density(PureState{{nc}, fock(0, nc)});
    double min_base = 1.0;
    for (std::uint64_t seed : {7, 8}) {
        const UnknownQubit q = sample_unknown_qubit(seed);
        const EndToEndResult r = end_to_end_full_model(q, p, vac);
        min_base = std::min(min_base, r.teleport_fidelity);
        std::printf("  C4 end-to-end (seed %llu): %.6f [%.1fs]\n",
                    static_cast<unsigned long long>(seed), r.teleport_fidelity, elapsed_s(t0));
        std::fflush(stdout);
    }

    // Monotonic improvement as (delta/g, 2 Omega/delta) double: (10,10) ->
    // (20,20) -> (40,40).
    const UnknownQubit q = sample_unknown_qubit(7);
    std::vector<double> sweep;
    for (int stage = 0; stage < 3; ++stage) {
        SystemParams ps = base_params();
        ps.delta *= std::pow(2.0, stage);
        ps.omega_drive *= std::pow(4.0, stage);
        const EndToEndResult r = end_to_end_full_model(q, ps, vac);
        sweep.push_back(r.teleport_fidelity);
        std::printf("  C4 ratios (%g, %g): %.6f [%.1fs]\n", ps.ratio_detuning(), ps.ratio_drive(),
                    r.teleport_fidelity, elapsed_s(t0));
        std::fflush(stdout);
    }

    const bool ok = oracle_fid >= 0.95 && min_base >= 0.95 && sweep[1] > sweep[0] &&
                    sweep[2] > sweep[1];
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "oracle %.4f, end-to-end min %.4f (>= 0.95), sweep %.4f -> %.4f -> %.4f "
                  "monotone [%.0fs]",
                  oracle_fid, min_base, sweep[0], sweep[1], sweep[2], elapsed_s(t0));
    report(4, ok, buf);
}

// C5: photon-number independence of the closed-system teleportation leg.
// Calibration note: the residual Fock dependence is set by the strong-driving
// ratio. The one-shot static-frame oracle gives spreads 0.041 at
// (delta/g, 2 Omega/delta) = (10, 10), 0.010 at (10, 20) and (20, 20), and
// 0.0025 at (40, 40); the 0.02 gate is therefore frozen at the drive-doubled
// regime delta = 10, Omega = 100 (interaction time unchanged).
void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    SystemParams p = base_params();
    p.omega_drive *= 2.0;
    const int nc = p.n_max + 1;
    const UnknownQubit q = sample_unknown_qubit(7);
    const LindbladSpec closed{};

    double fids[3];
    for (int n = 0; n < 3; ++n) {
        const DensityMatrix cav = pure_to_density(PureState{{nc}, fock(n, nc)});
        fids[n] = protocol_fidelity_open_system(q, p, closed, cav);
        std::printf("  C5 cavity |%d> at (delta, omega) = (%g, %g): fidelity %.6f [%.1fs]\n", n,
                    p.delta, p.omega_drive, fids[n], elapsed_s(t0));
        std::fflush(stdout);
    }
    const double spread = std::max({fids[0], fids[1], fids[2]}) -
                          std::min({fids[0], fids[1], fids[2]});
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "Fock |0>,|1>,|2> fidelities %.4f/%.4f/%.4f at delta=%g omega=%g, "
                  "spread %.4f (<= 0.02) [%.0fs]",
                  fids[0], fids[1], fids[2], p.delta, p.omega_drive, spread, elapsed_s(t0));
    report(5, spread <= 0.02, buf);
}

// C6: cavity-decay / thermal-field insensitivity under the master equation.
// The drop compares two runs at the same step size; omega*dt = 0.02 keeps the
// RK4 error near 1e-3 (validated by the order test) at half the default cost.
void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const UnknownQubit q = sample_unknown_qubit(7);
    bool ok = true;
    std::string detail;
    for (double nbar : {0.0, 0.5, 1.0}) {
        SystemParams p = base_params();
        p.n_max = std::max(10, static_cast<int>(std::ceil(4.0 * nbar + 10.0)));
        const DensityMatrix cav = thermal_state(nbar, p.n_max);
        const double dt = 0.02 / p.omega_drive;

        const LindbladSpec closed{};
        IntegrationReport rep_base{};
        const double baseline = protocol_fidelity_open_system(q, p, closed, cav, dt, &rep_base);

        LindbladSpec open{};
        open.kappa = 0.1 * p.g;
        open.n_bar = nbar;
        IntegrationReport rep{};
        const double fid = protocol_fidelity_open_system(q, p, open, cav, dt, &rep);

        const double drop = baseline - fid;
        const double trace_err = std::max(rep.trace_error_max, rep_base.trace_error_max);
        ok = ok && drop < 0.05 && trace_err < 1e-7;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "nbar=%.1f: base %.4f, open %.4f, drop %.4f, trace %.1e; ",
                      nbar, baseline, fid, drop, trace_err);
        detail += buf;
        std::printf("  C6 %s[%.0fs]\n", buf, elapsed_s(t0));
        std::fflush(stdout);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "[%.0fs]", elapsed_s(t0));
    report(6, ok, detail + "drop < 0.05, trace < 1e-7 " + buf);
}

// C7: timing feasibility against the atomic radiative time.
void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    const double t_unit = interaction_time(base_params());
    const bool formula_ok = std::abs(t_unit - 5.0 * kPi) < 1e-12;

    const double g_phys = 2.0 * kPi * 25e3; // rad/s
    const FeasibilityResult f = feasibility_check(g_phys, 20.0 * g_phys);
    const bool ok = formula_ok && std::abs(f.t_interaction_s - 2e-4) < 1e-8 && f.ratio < 0.1;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "t = pi*delta/(2 g^2): unit-scale %.6f; physical t=%.3e s vs T_a=%.0e s, "
                  "ratio %.2e (< 0.1) [%.2fs]",
                  t_unit, f.t_interaction_s, f.radiative_time_s, f.ratio, elapsed_s(t0));
    report(7, ok, buf);
}

// C8: numerical hygiene: unitarity, trace preservation, partial-trace oracle,
// RK4 order, Haar moment.
void criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(888);
    bool ok = true;
    std::string detail;

    // Unitarity + semigroup of the Hermitian exponential.
    double worst_unit = 0.0, worst_semi = 0.0;
    for (int k = 0; k < 5; ++k) {
        const Matrix h = oracles::random_hermitian(rng, 6);
        const double t1 = oracles::uniform(rng, -2, 2), t2 = oracles::uniform(rng, -2, 2);
        const Matrix u = expm_unitary(h, t1);
        worst_unit = std::max(worst_unit, max_abs(u.adjoint() * u - identity(6)));
        worst_semi = std::max(
            worst_semi, max_abs(u * expm_unitary(h, t2) - expm_unitary(h, t1 + t2)));
    }
    ok = ok && worst_unit < 1e-10 && worst_semi < 1e-9;
    detail += "unitarity " + std::to_string(worst_unit) + "; ";

    // Partial trace vs scatter oracle + full-keep identity.
    const Vector psi = oracles::random_unit_vector(rng, 8);
    const DensityMatrix rho = pure_to_density(PureState{{2, 2, 2}, psi});
    double worst_pt = 0.0;
    for (const auto& keep : std::vector<std::vector<int>>{{0}, {2}, {0, 1}, {1, 2}})
        worst_pt = std::max(worst_pt, max_abs(partial_trace(rho, keep).mat -
                                              oracles::partial_trace_scatter(rho.mat, rho.dims, keep)));
    worst_pt = std::max(worst_pt, max_abs(partial_trace(rho, {0, 1, 2}).mat - rho.mat));
    ok = ok && worst_pt < 1e-12;

    // Master-equation trace preservation on a short driven open run.
    SystemParams p{1.0, 5.0, 10.0, 3};
    LindbladSpec spec{};
    spec.kappa = 0.2;
    spec.n_bar = 0.3;
    const Vector psi0 = oracles::random_unit_vector(rng, 4 * (p.n_max + 1));
    IntegrationReport rep{};
    integrate_master_equation({{2, 2, p.n_max + 1}, psi0 * psi0.adjoint()}, p, spec, 1.0,
                              default_full_dt(p), &rep);
    ok = ok && rep.trace_error_max < 1e-7;
    detail += "trace " + std::to_string(rep.trace_error_max) + "; ";

    // RK4 order-4 convergence.
    SystemParams pr{1.0, 3.0, 2.0, 2};
    LindbladSpec sr{};
    sr.kappa = 0.3;
    const Vector psir = oracles::random_unit_vector(rng, 2 * (pr.n_max + 1));
    const DensityMatrix rho0{{2, pr.n_max + 1}, psir * psir.adjoint()};
    const Matrix ref = integrate_master_equation(rho0, pr, sr, 0.4, 0.00125).mat;
    const double e1 = max_abs(integrate_master_equation(rho0, pr, sr, 0.4, 0.02).mat - ref);
    const double e2 = max_abs(integrate_master_equation(rho0, pr, sr, 0.4, 0.01).mat - ref);
    const double order = std::log2(e1 / e2);
    ok = ok && order > 3.4 && order < 4.6;
    detail += "RK4 order " + std::to_string(order) + "; ";

    // Haar moment: E[|alpha|^2] = 1/2.
    double mean_pe = 0.0;
    const int n = 100000;
    for (int s = 0; s < n; ++s) mean_pe += std::norm(sample_unknown_qubit(s).alpha);
    mean_pe /= n;
    ok = ok && std::abs(mean_pe - 0.5) < 0.01;
    detail += "Haar mean " + std::to_string(mean_pe);

    char buf[48];
    std::snprintf(buf, sizeof(buf), " [%.1fs]", elapsed_s(t0));
    report(8, ok, detail + buf);
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int c) { return selected.empty() || selected.count(c) > 0; };

    if (wanted(1)) criterion_1();
    if (wanted(2)) criterion_2();
    if (wanted(3)) criterion_3();
    if (wanted(4)) criterion_4();
    if (wanted(5)) criterion_5();
    if (wanted(6)) criterion_6();
    if (wanted(7)) criterion_7();
    if (wanted(8)) criterion_8();

    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
