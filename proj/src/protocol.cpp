#include "teleportsim/protocol.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace teleportsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTimingRelTol = 1e-9;

// Portable uniform in (0,1): top 53 bits of the engine output, half-offset.
double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void require_protocol_timing(const SystemParams& p, double t) {
    const DerivedParams d = derive(p);
    const double lam_t = d.lambda * t;
    if (std::abs(lam_t - kPi / 4.0) > kTimingRelTol * (kPi / 4.0)) {
        std::ostringstream os;
        os << "timing violated: lambda*t = " << lam_t << ", expected pi/4";
        throw TimingNotSatisfied(os.str());
    }
    const double turns = p.omega_drive * t / kPi;
    if (std::abs(turns - std::round(turns)) > kTimingRelTol * std::max(1.0, turns))
        throw TimingNotSatisfied("timing violated: omega_drive*t is not a multiple of pi");
}

PureState two_atom_ground() {
    Vector v = Vector::Zero(4);
    v(3) = 1.0; // |gg>
    return {{2, 2}, v};
}

} // namespace

void UnknownQubit::validate(double tol) const {
    const double n2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(n2 - 1.0) > tol)
        throw ValidationError("UnknownQubit: |alpha|^2 + |beta|^2 must be 1");
}

PureState UnknownQubit::as_state() const {
    Vector v(2);
    v << alpha, beta;
    return {{2}, v};
}

const char* correction_name(Correction c) {
    switch (c) {
        case Correction::I: return "I";
        case Correction::Z: return "sigma_z";
        case Correction::Y: return "sigma_y";
        case Correction::X: return "sigma_x";
    }
    return "?";
}

Matrix correction_matrix(Correction c) {
    switch (c) {
        case Correction::I: return identity(2);
        case Correction::Z: return sigma_z();
        case Correction::Y: return sigma_y();
        case Correction::X: return sigma_x();
    }
    throw ValidationError("correction_matrix: unknown correction");
}

Correction correction_for_outcome(Level atom1, Level atom2) {
    if (atom1 == Level::e && atom2 == Level::e) return Correction::I;
    if (atom1 == Level::g && atom2 == Level::g) return Correction::Z;
    if (atom1 == Level::e && atom2 == Level::g) return Correction::Y;
    return Correction::X;
}

PureState generate_channel(const SystemParams& p) {
    return generate_channel(p, interaction_time(p));
}

PureState generate_channel(const SystemParams& p, double t_override) {
    require_protocol_timing(p, t_override);
    return generate_channel_at(p, t_override);
}

PureState generate_channel_at(const SystemParams& p, double t) {
    const PureState gg = two_atom_ground();
    return {{2, 2}, effective_propagator(p, t) * gg.amps};
}

PureState teleport_evolution(const UnknownQubit& q, const PureState& channel,
                             const SystemParams& p) {
    return teleport_evolution(q, channel, p, interaction_time(p));
}

PureState teleport_evolution(const UnknownQubit& q, const PureState& channel,
                             const SystemParams& p, double t_override) {
    q.validate();
    if (channel.dims != std::vector<int>{2, 2})
        throw DimensionMismatch("teleport_evolution: channel must be a two-atom state");
    if (channel.amps.size() != 4)
        throw DimensionMismatch("teleport_evolution: channel amplitude count");

    Vector joint(8);
    for (int s1 = 0; s1 < 2; ++s1) {
        const Complex c1 = (s1 == 0) ? q.alpha : q.beta;
        for (int s23 = 0; s23 < 4; ++s23)
            joint(s1 * 4 + s23) = c1 * channel.amps(s23);
    }
    // U_eff acts on atoms 1, 2; atom 3 rides along.
    const Matrix u = kron(effective_propagator(p, t_override), identity(2));
    return {{2, 2, 2}, u * joint};
}

std::array<MeasurementOutcome, 4> measure_and_collapse(const PureState& joint) {
    if (joint.dims != std::vector<int>{2, 2, 2})
        throw DimensionMismatch("measure_and_collapse: expected a three-atom state");

    std::array<MeasurementOutcome, 4> out;
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) {
            Vector branch(2);
            branch << joint.amps((a1 * 2 + a2) * 2 + 0), joint.amps((a1 * 2 + a2) * 2 + 1);
            MeasurementOutcome& o = out[a1 * 2 + a2];
            o.atom1 = static_cast<Level>(a1);
            o.atom2 = static_cast<Level>(a2);
            o.probability = branch.squaredNorm();
            o.collapsed = PureState{{2}, std::move(branch)};
        }
    return out;
}

TeleportResult apply_correction_and_score(const UnknownQubit& q,
                                          const MeasurementOutcome& outcome) {
    TeleportResult r;
    r.outcome = outcome;
    r.correction = correction_for_outcome(outcome.atom1, outcome.atom2);
    const PureState normalized = outcome.collapsed.normalized();
    r.final_state = PureState{{2}, correction_matrix(r.correction) * normalized.amps};
    r.fidelity = fidelity_up_to_phase(r.final_state, q.as_state());
    return r;
}

std::array<TeleportResult, 4> enumerate_protocol(const UnknownQubit& q,
                                                 const SystemParams& p) {
    const PureState joint = teleport_evolution(q, generate_channel(p), p);
    const auto outcomes = measure_and_collapse(joint);
    std::array<TeleportResult, 4> results;
    for (size_t k = 0; k < outcomes.size(); ++k)
        results[k] = apply_correction_and_score(q, outcomes[k]);
    return results;
}

TeleportResult run_protocol(const UnknownQubit& q, const SystemParams& p,
                            std::uint64_t rng_seed) {
    const PureState joint = teleport_evolution(q, generate_channel(p), p);
    const auto outcomes = measure_and_collapse(joint);

    std::mt19937_64 rng(rng_seed);
    const double u = uniform01(rng);
    double acc = 0.0;
    size_t pick = outcomes.size() - 1;
    for (size_t k = 0; k < outcomes.size(); ++k) {
        acc += outcomes[k].probability;
        if (u < acc) {
            pick = k;
            break;
        }
    }
    return apply_correction_and_score(q, outcomes[pick]);
}

UnknownQubit sample_unknown_qubit(std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    const Complex a(standard_normal(rng), standard_normal(rng));
    const Complex b(standard_normal(rng), standard_normal(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

} // namespace teleportsim
