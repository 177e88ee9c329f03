// Command-line front end: analytic | simulate | validate | esf.

#include <omp.h>

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmwia/errors.hpp"
#include "mmwia/experiments.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> protocols;
    std::vector<std::string> blockages;
    std::string m_range;
    bool desk_scale = false;
    std::vector<std::string> tolerances;
    std::string engine;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--out", f.out, "output CSV path (default: stdout)");
    cmd->add_option("--seed", f.seed, "64-bit simulation seed");
    cmd->add_option("--protocol", f.protocols, "baseline | fast_ra | fast_cs | omni_rx (repeatable)");
    cmd->add_option("--blockage", f.blockages, "losball:RC:P or exp:MU (repeatable)");
    cmd->add_option("--m-range", f.m_range, "BS beam counts A:B:STEP");
    cmd->add_flag("--desk-scale", f.desk_scale, "reduced realization counts");
    cmd->add_option("--tolerance", f.tolerances, "validation tolerance KEY=VAL (repeatable)");
    cmd->add_option("--engine", f.engine, "analytic | simulate | both (simulate verb)");
}

mmwia::RunConfig resolve(const Flags& f) {
    mmwia::RunConfig cfg;
    if (!f.config.empty()) cfg = mmwia::load_config(f.config);
    if (f.seed) cfg.simulation.seed = *f.seed;
    if (!f.protocols.empty()) {
        cfg.sweep.protocols.clear();
        for (const auto& p : f.protocols) cfg.sweep.protocols.push_back(mmwia::parse_protocol_name(p));
    }
    if (!f.blockages.empty()) cfg.sweep.blockages = f.blockages;
    if (!f.m_range.empty()) cfg.sweep.m_values = mmwia::parse_m_range(f.m_range);
    if (f.desk_scale) cfg.simulation.desk_scale = true;
    for (const auto& t : f.tolerances) cfg.tolerances.set(t);
    if (!f.engine.empty()) cfg.sweep.engine = mmwia::parse_engine(f.engine);
    return cfg;
}

void apply_thread_override() {
    const char* env = std::getenv("MMWIA_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw mmwia::ConfigError("MMWIA_THREADS must be a positive integer", "MMWIA_THREADS");
    omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Initial access and throughput evaluation for sectorized mmWave networks"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> verbs{
        {"analytic", "evaluate the analytic model over the sweep"},
        {"simulate", "run Monte Carlo campaigns over the sweep"},
        {"validate", "compare analytic and simulated metrics"},
        {"esf", "empty space function of IA-successful users"},
    };
    for (const auto& [name, help] : verbs) add_common(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mmwia::exit_code::usage;
    }

    try {
        apply_thread_override();
        const auto cfg = resolve(flags);
        std::ofstream file;
        if (!flags.out.empty()) {
            file.open(flags.out);
            if (!file) throw mmwia::ConfigError("cannot open output file '" + flags.out + "'", "out");
        }
        std::ostream& out = flags.out.empty() ? std::cout : file;
        const std::string verb = app.get_subcommands().front()->get_name();
        int rc = mmwia::exit_code::ok;
        if (verb == "analytic") rc = mmwia::cmd_analytic(cfg, out);
        else if (verb == "simulate") rc = mmwia::cmd_simulate(cfg, out);
        else if (verb == "validate") rc = mmwia::cmd_validate(cfg, out);
        else rc = mmwia::cmd_esf(cfg, out);
        if (rc == mmwia::exit_code::validation) std::cerr << "validation failed for at least one metric\n";
        return rc;
    } catch (const mmwia::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return mmwia::exit_code::usage;
    } catch (const mmwia::ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return mmwia::exit_code::config;
    } catch (const mmwia::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << " (estimate " << e.best_estimate() << ", error "
                  << e.error_estimate() << ")\n";
        return mmwia::exit_code::convergence;
    } catch (const mmwia::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return mmwia::exit_code::config;
    }
}
