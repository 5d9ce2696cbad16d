#ifndef TELEPORTSIM_CLI_HPP
#define TELEPORTSIM_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "teleportsim/decoherence.hpp"

namespace teleportsim::cli {

enum class Mode { Channel, Teleport, Table1, FullVsEff, DecoherenceSweep, TimingSweep };

Mode mode_from_string(const std::string& s);
const char* mode_name(Mode m);

enum class OutputFormat { Csv, Json };

struct RunConfig {
    Mode mode = Mode::Channel;
    SystemParams params{};       // defaults g=1, delta=10, omega=50, n_max=10
    LindbladSpec lindblad{};
    int n_samples = 100;
    std::uint64_t seed = 1;
    std::string output_path;     // empty -> results.csv / results.json
    OutputFormat format = OutputFormat::Csv;
    bool n_max_explicit = false; // thermal sweeps auto-size the truncation otherwise
};

/// Flag values as parsed from the command line; unset fields fall back to the
/// config file and then to defaults.
struct FlagOverrides {
    std::optional<std::string> mode;
    std::optional<double> g;
    std::optional<double> delta;
    std::optional<double> omega;
    std::optional<int> nmax;
    std::optional<double> kappa;
    std::optional<double> nbar;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

/// Merge defaults <- config file (flat JSON object) <- flags, then validate.
/// Throws ConfigParseError (bad file/unknown key/bad type) or ValidationError
/// (all violations listed).
RunConfig parse_config(const std::optional<std::string>& config_path, const FlagOverrides& flags);

/// Execute one mode, write the result file, print a summary.
/// Returns 0 when all mode-specific assertions pass, 1 otherwise.
int run(const RunConfig& config);

/// Result-file column documentation, one mode per paragraph (used by --help).
std::string column_reference();

} // namespace teleportsim::cli

#endif // TELEPORTSIM_CLI_HPP
