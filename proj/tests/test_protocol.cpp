#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "teleportsim/protocol.hpp"

using namespace teleportsim;

namespace {
constexpr double kPi = std::numbers::pi;

SystemParams base_params() { return {1.0, 10.0, 50.0, 10}; }

PureState channel_target() {
    Vector v(4);
    v << 1.0 / std::sqrt(2.0), 0.0, 0.0, Complex(0.0, 1.0) / std::sqrt(2.0);
    return {{2, 2}, v};
}
} // namespace

TEST_CASE("channel generation hits the (|ee>+i|gg>)/sqrt2 target") {
    const PureState chan = generate_channel(base_params());
    CHECK(fidelity_up_to_phase(chan, channel_target()) >= 1.0 - 1e-10);
}

TEST_CASE("channel evolution at off-condition times") {
    const SystemParams p = base_params();

    // t = 0 leaves |gg> untouched.
    const PureState at0 = generate_channel_at(p, 0.0);
    CHECK(std::abs(at0.amps(3) - Complex(1.0, 0.0)) < 1e-14);

    // lambda t = pi/2 with Omega t an even multiple of pi lands on |ee|.
    const double t = kPi / (2.0 * coupling_lambda(p)); // 10*pi; Omega t = 500*pi
    const PureState at_half = generate_channel_at(p, t);
    PureState ee{{2, 2}, Vector::Unit(4, 0)};
    CHECK(fidelity_up_to_phase(at_half, ee) >= 1.0 - 1e-10);
}

TEST_CASE("validated channel generation rejects bad timing") {
    const SystemParams p = base_params();
    const double t = interaction_time(p);
    CHECK_THROWS_AS(generate_channel(p, 1.01 * t), TimingNotSatisfied);
    CHECK_THROWS_AS(generate_channel(p, 0.0), TimingNotSatisfied);

    SystemParams off = p;
    off.omega_drive = 49.9; // Omega*t = 249.5*pi, not a multiple of pi
    CHECK_THROWS_AS(generate_channel(off), TimingNotSatisfied);

    CHECK_NOTHROW(generate_channel(p, t * (1.0 + 1e-12)));
}

TEST_CASE("teleport evolution matches the transcribed joint closed form") {
    const SystemParams p = base_params();
    const UnknownQubit q{0.6, 0.8};
    const double t = interaction_time(p);

    const PureState joint = teleport_evolution(q, channel_target(), p);
    const Vector expected =
        oracles::eq7_state(q.alpha, q.beta, coupling_lambda(p) * t, p.omega_drive * t);
    CHECK((joint.amps - expected).norm() < 1e-10);

    // Generic off-condition timing, same closed form.
    SystemParams pg = base_params();
    const double tg = 7.3;
    pg.omega_drive = 1.9 / tg;
    const PureState joint_g = teleport_evolution(q, channel_target(), pg, tg);
    const Vector expected_g =
        oracles::eq7_state(q.alpha, q.beta, coupling_lambda(pg) * tg, 1.9);
    CHECK((joint_g.amps - expected_g).norm() < 1e-10);
}

TEST_CASE("teleport evolution conserves the norm and rejects bad channels") {
    const SystemParams p = base_params();
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const UnknownQubit q = sample_unknown_qubit(seed);
        const PureState joint = teleport_evolution(q, generate_channel(p), p);
        CHECK(std::abs(joint.norm() - 1.0) < 1e-10);
    }
    const PureState bad{{2}, basis_e()};
    CHECK_THROWS_AS(teleport_evolution({1.0, 0.0}, bad, p), DimensionMismatch);
}

TEST_CASE("basis-state payload collapses atom 3 onto the same basis state") {
    const SystemParams p = base_params();
    const UnknownQubit q{1.0, 0.0};
    const auto outcomes = measure_and_collapse(teleport_evolution(q, generate_channel(p), p));
    const MeasurementOutcome& ee = outcomes[0];
    REQUIRE(ee.atom1 == Level::e);
    REQUIRE(ee.atom2 == Level::e);
    CHECK(std::abs(ee.collapsed.amps(1)) < 1e-10); // no |g> component
    CHECK(fidelity_up_to_phase(ee.collapsed.normalized(), q.as_state()) >= 1.0 - 1e-10);
}

TEST_CASE("measurement branches carry Table-1 states with probability 1/4") {
    const SystemParams p = base_params();
    const UnknownQubit q = sample_unknown_qubit(77);
    const auto outcomes = measure_and_collapse(teleport_evolution(q, generate_channel(p), p));

    auto branch_state = [&](Complex ce, Complex cg) {
        Vector v(2);
        v << ce, cg;
        return PureState{{2}, v / v.norm()};
    };

    double prob_sum = 0.0;
    for (const auto& o : outcomes) {
        CHECK(o.probability == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(o.probability == doctest::Approx(o.collapsed.amps.squaredNorm()).epsilon(1e-12));
        prob_sum += o.probability;
    }
    CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-10));

    // (e,e): (alpha|e> + beta|g>)/2, (g,e): (alpha|g> + beta|e>)/2,
    // (e,g): (alpha|g> - beta|e>)/2, (g,g): (alpha|e> - beta|g>)/2.
    CHECK(fidelity_up_to_phase(outcomes[0].collapsed.normalized(),
                               branch_state(q.alpha, q.beta)) >= 1.0 - 1e-9);
    CHECK(fidelity_up_to_phase(outcomes[2].collapsed.normalized(),
                               branch_state(q.beta, q.alpha)) >= 1.0 - 1e-9);
    CHECK(fidelity_up_to_phase(outcomes[1].collapsed.normalized(),
                               branch_state(-q.beta, q.alpha)) >= 1.0 - 1e-9);
    CHECK(fidelity_up_to_phase(outcomes[3].collapsed.normalized(),
                               branch_state(q.alpha, -q.beta)) >= 1.0 - 1e-9);
}

TEST_CASE("ee branch agrees with the transcribed collapse expression off condition") {
    SystemParams p = base_params();
    const double t = 4.1;
    p.omega_drive = 2.3 / t;
    const UnknownQubit q = sample_unknown_qubit(99);

    const PureState joint = teleport_evolution(q, channel_target(), p, t);
    const auto outcomes = measure_and_collapse(joint);
    const Vector expected = oracles::eq8_ee_branch(q.alpha, q.beta, coupling_lambda(p) * t, 2.3);
    CHECK((outcomes[0].collapsed.amps - expected).norm() < 1e-10);
}

TEST_CASE("probabilities sum to one even at wrong timing") {
    const SystemParams p = base_params();
    const UnknownQubit q = sample_unknown_qubit(123);
    for (double t : {1.0, 3.3, 9.9}) {
        const auto outcomes = measure_and_collapse(teleport_evolution(q, generate_channel(p), p, t));
        double sum = 0.0;
        for (const auto& o : outcomes) sum += o.probability;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("correction map is exactly Table 1") {
    CHECK(correction_for_outcome(Level::e, Level::e) == Correction::I);
    CHECK(correction_for_outcome(Level::g, Level::g) == Correction::Z);
    CHECK(correction_for_outcome(Level::e, Level::g) == Correction::Y);
    CHECK(correction_for_outcome(Level::g, Level::e) == Correction::X);

    // sigma_y (alpha|g> - beta|e>) = -i (alpha|e> + beta|g>).
    const Complex alpha(0.3, 0.4), beta(0.5, std::sqrt(1 - 0.09 - 0.16 - 0.25));
    Vector v(2);
    v << -beta, alpha;
    const Vector corrected = correction_matrix(Correction::Y) * v;
    Vector target(2);
    target << alpha, beta;
    CHECK((corrected - Complex(0.0, -1.0) * target).norm() < 1e-12);
}

TEST_CASE("every forced outcome teleports perfectly at protocol timing") {
    const SystemParams p = base_params();
    const UnknownQubit q{1.0 / std::sqrt(2.0), Complex(0.0, 1.0) / std::sqrt(2.0)};
    for (const TeleportResult& r : enumerate_protocol(q, p)) {
        CHECK(r.fidelity >= 1.0 - 1e-9);
        CHECK(r.outcome.probability == doctest::Approx(0.25).epsilon(1e-10));
    }
}

TEST_CASE("linearity: superposed payloads superpose the joint state") {
    const SystemParams p = base_params();
    const UnknownQubit q = sample_unknown_qubit(31);
    const PureState chan = generate_channel(p);
    const Vector lhs = teleport_evolution(q, chan, p).amps;
    const Vector rhs = q.alpha * teleport_evolution({1.0, 0.0}, chan, p).amps +
                       q.beta * teleport_evolution({0.0, 1.0}, chan, p).amps;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("run_protocol: reproducible, perfect fidelity for any outcome") {
    const SystemParams p = base_params();
    const TeleportResult r1 = run_protocol({1.0, 0.0}, p, 9001);
    CHECK(r1.fidelity >= 1.0 - 1e-9);

    const UnknownQubit q = sample_unknown_qubit(55);
    const TeleportResult a = run_protocol(q, p, 424242);
    const TeleportResult b = run_protocol(q, p, 424242);
    CHECK(a.outcome.atom1 == b.outcome.atom1);
    CHECK(a.outcome.atom2 == b.outcome.atom2);
    CHECK(a.fidelity == b.fidelity);
    CHECK(a.fidelity >= 1.0 - 1e-9);
}

TEST_CASE("outcome frequencies are uniform over seeds (3-sigma multinomial)") {
    const SystemParams p = base_params();
    const UnknownQubit q = sample_unknown_qubit(8);
    const int n_runs = 100000;
    int counts[4] = {0, 0, 0, 0};
    for (int s = 0; s < n_runs; ++s) {
        const TeleportResult r = run_protocol(q, p, 50000 + s);
        counts[static_cast<int>(r.outcome.atom1) * 2 + static_cast<int>(r.outcome.atom2)]++;
    }
    const double sigma = std::sqrt(n_runs * 0.25 * 0.75);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(counts[k] - n_runs * 0.25) <= 3.0 * sigma);
}

TEST_CASE("end-to-end identity over Haar-random payloads") {
    const SystemParams p = base_params();
    for (int s = 0; s < 200; ++s) {
        const UnknownQubit q = sample_unknown_qubit(1000 + s);
        for (const TeleportResult& r : enumerate_protocol(q, p))
            CHECK(r.fidelity >= 1.0 - 1e-9);
    }
}

TEST_CASE("sample_unknown_qubit: deterministic, normalized, Haar moments") {
    const UnknownQubit a = sample_unknown_qubit(42);
    const UnknownQubit b = sample_unknown_qubit(42);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);

    double mean_pe = 0.0;
    const int n = 100000;
    for (int s = 0; s < n; ++s) {
        const UnknownQubit q = sample_unknown_qubit(s);
        CHECK(std::abs(std::norm(q.alpha) + std::norm(q.beta) - 1.0) < 1e-12);
        mean_pe += std::norm(q.alpha);
    }
    mean_pe /= n;
    CHECK(std::abs(mean_pe - 0.5) < 0.01);
}

TEST_CASE("unknown qubit validation") {
    const UnknownQubit bad{1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    const UnknownQubit good{std::sqrt(0.5), std::sqrt(0.5)};
    CHECK_NOTHROW(good.validate());
}
