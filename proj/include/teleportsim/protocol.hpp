#ifndef TELEPORTSIM_PROTOCOL_HPP
#define TELEPORTSIM_PROTOCOL_HPP

#include <array>
#include <cstdint>
#include <string>

#include "teleportsim/model.hpp"

namespace teleportsim {

/// Payload qubit alpha|e> + beta|g>.
struct UnknownQubit {
    Complex alpha;
    Complex beta;

    void validate(double tol = 1e-10) const;
    PureState as_state() const;
};

enum class Level : int { e = 0, g = 1 };

inline const char* level_name(Level l) { return l == Level::e ? "e" : "g"; }

enum class Correction : int { I = 0, Z = 1, Y = 2, X = 3 };

const char* correction_name(Correction c);
Matrix correction_matrix(Correction c);

/// Receiver operation for a product-basis result on atoms 1, 2:
/// (e,e) -> I, (g,g) -> sigma_z, (e,g) -> sigma_y, (g,e) -> sigma_x.
Correction correction_for_outcome(Level atom1, Level atom2);

/// One product-basis measurement branch. `collapsed` is the subnormalized
/// atom-3 branch; `probability` equals its squared norm.
struct MeasurementOutcome {
    Level atom1;
    Level atom2;
    double probability;
    PureState collapsed;
};

struct TeleportResult {
    MeasurementOutcome outcome;
    Correction correction;
    PureState final_state; // atom 3, normalized, post-correction
    double fidelity;
};

/// Two-atom entangled channel from |gg> at the protocol timing
/// (lambda*t = pi/4, omega_drive*t = N*pi); equals (|ee> + i|gg>)/sqrt(2)
/// up to global phase. The t-override form throws TimingNotSatisfied when
/// the override misses the condition by more than 1e-9 relative.
PureState generate_channel(const SystemParams& p);
PureState generate_channel(const SystemParams& p, double t_override);

/// Unvalidated evolution U(t)|gg> for timing sweeps and off-condition studies.
PureState generate_channel_at(const SystemParams& p, double t);

/// (U_eff on atoms 1,2 (x) I on atom 3) applied to q (x) channel.
/// Off-condition times are allowed so robustness curves can be swept.
PureState teleport_evolution(const UnknownQubit& q, const PureState& channel,
                             const SystemParams& p);
PureState teleport_evolution(const UnknownQubit& q, const PureState& channel,
                             const SystemParams& p, double t_override);

/// All four product-basis branches for atoms 1, 2, in index order
/// (e,e), (e,g), (g,e), (g,g). Probabilities sum to 1 for normalized input.
std::array<MeasurementOutcome, 4> measure_and_collapse(const PureState& joint);

/// Deterministic branch finisher: normalize, correct, score against q.
TeleportResult apply_correction_and_score(const UnknownQubit& q,
                                          const MeasurementOutcome& outcome);

/// All four branches finished, for enumeration-style checks.
std::array<TeleportResult, 4> enumerate_protocol(const UnknownQubit& q,
                                                 const SystemParams& p);

/// Full protocol run with one outcome sampled by its probability.
TeleportResult run_protocol(const UnknownQubit& q, const SystemParams& p,
                            std::uint64_t rng_seed);

/// Haar-uniform payload qubit; reproducible from the seed.
UnknownQubit sample_unknown_qubit(std::uint64_t rng_seed);

} // namespace teleportsim

#endif // TELEPORTSIM_PROTOCOL_HPP
