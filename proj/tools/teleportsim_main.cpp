// teleportsim: cavity-QED teleportation simulator front end.
//
// Usage: teleportsim <mode> [flags]
// Modes: channel, teleport, table1, full-vs-eff, decoherence-sweep, timing-sweep.
// Exit codes: 0 pass, 1 assertion failure, 2 config error.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "teleportsim/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = teleportsim::cli;

    CLI::App app{"Simulator for Bell-measurement-free atomic-state teleportation in cavity QED.\n\n" +
                 cli::column_reference()};
    app.get_formatter()->column_width(26);

    std::string mode;
    app.add_option("mode", mode,
                   "channel | teleport | table1 | full-vs-eff | decoherence-sweep | timing-sweep");

    cli::FlagOverrides flags;
    double g, delta, omega, kappa, nbar;
    int nmax, samples;
    std::uint64_t seed;
    std::string config_path, out, format;

    auto* og = app.add_option("--g", g, "atom-cavity coupling (unit scale, default 1)");
    auto* od = app.add_option("--delta", delta, "atom-cavity detuning (default 10)");
    auto* oo = app.add_option("--omega", omega, "classical Rabi frequency (default 50)");
    auto* on = app.add_option("--nmax", nmax, "cavity Fock truncation (default 10)");
    auto* ok = app.add_option("--kappa", kappa, "cavity decay rate (default 0; sweep default 0.1*g)");
    auto* ob = app.add_option("--nbar", nbar, "thermal mean photon number (default 0)");
    auto* os = app.add_option("--samples", samples, "number of sampled inputs (default 100)");
    auto* oe = app.add_option("--seed", seed, "RNG seed (default 1)");
    auto* oc = app.add_option("--config", config_path, "flat JSON config file; flags override it");
    auto* oout = app.add_option("--out", out, "result file path (default results.<format>)");
    auto* of = app.add_option("--format", format, "csv | json (default csv)");

    CLI11_PARSE(app, argc, argv);

    if (!mode.empty()) flags.mode = mode;
    if (*og) flags.g = g;
    if (*od) flags.delta = delta;
    if (*oo) flags.omega = omega;
    if (*on) flags.nmax = nmax;
    if (*ok) flags.kappa = kappa;
    if (*ob) flags.nbar = nbar;
    if (*os) flags.samples = samples;
    if (*oe) flags.seed = seed;
    if (*oout) flags.out = out;
    if (*of) flags.format = format;

    std::optional<std::string> config;
    if (*oc) config = config_path;

    try {
        const cli::RunConfig cfg = cli::parse_config(config, flags);
        return cli::run(cfg);
    } catch (const teleportsim::ConfigParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const teleportsim::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
