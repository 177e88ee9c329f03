#pragma once

// Batch sweeps over protocols, blockage settings and BS beam counts, with CSV
// output and analytic-versus-simulation validation.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmwia/analytic.hpp"
#include "mmwia/simulator.hpp"

namespace mmwia {

/// Malformed command line or empty sweep list.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Which engines contribute columns to a simulate table.
enum class Engine { Analytic, Simulate, Both };
Engine parse_engine(const std::string& s);

struct SweepSpec {
    std::vector<ProtocolName> protocols{ProtocolName::Baseline};
    std::vector<std::string> blockages{"losball:100:1"};
    std::vector<int> m_values{4, 8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48};
    int n_user = 4;
    int m_cs_coarse = 4;
    Engine engine = Engine::Simulate;
    /// ESF evaluation radii (m) for the esf verb.
    std::vector<double> esf_grid_m{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 120, 140, 160, 180, 200};

    /// Throws UsageError on an empty list and ConfigError naming the key of
    /// any other violated invariant.
    void validate() const;
};

/// Absolute tolerances except `upt_rel`, which is relative to the analytic value.
struct Tolerances {
    double p_cs = 0.02;
    double p_co = 0.02;
    double eta_ia = 0.02;
    double sinr_ccdf = 0.03;
    double upt_rel = 0.05;

    /// Applies "KEY=VAL"; throws ConfigError on an unknown key or bad value.
    void set(const std::string& assignment);
};

/// Everything a CLI run needs, fully resolved.
struct RunConfig {
    SystemConfig::DbParams system;
    SimulationConfig simulation;
    SweepSpec sweep;
    Tolerances tolerances;

    SystemConfig system_config() const;
    /// Resolved configuration as JSON text (single line).
    std::string to_json() const;
};

/// Parses a JSON document with optional sections "system", "simulation",
/// "sweep" and "tolerances". Keys carry their unit in the name
/// (lambda_bs_per_km2, p_bs_dbm, area_km, ...). Unknown keys and wrong types
/// raise ConfigError naming the key.
RunConfig parse_config(const std::string& json_text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// "A:B:STEP" inclusive range.
std::vector<int> parse_m_range(const std::string& spec);

struct ValidationRow {
    std::string metric;
    std::string protocol;
    std::string blockage;
    int m = 0;
    double analytic = 0.0;
    double mc_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double tolerance = 0.0;  ///< absolute, already scaled for relative metrics
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    bool all_pass() const;
};

/// Pass iff the analytic value lies in [ci_low - tol, ci_high + tol].
bool within_expanded_ci(double analytic, const Estimate& mc, double tol);

/// Compares one analytic evaluation with one campaign report.
std::vector<ValidationRow> compare(const AnalyticContext& ctx, const IAMetrics& analytic, const MetricsReport& mc,
                                   const Tolerances& tol);

/// Verb implementations. Each writes a CSV table (with the resolved config
/// echoed as '#' comment lines) to `out`. Return the process exit status.
int cmd_analytic(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out, ValidationReport* report = nullptr);
int cmd_esf(const RunConfig& cfg, std::ostream& out);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int config = 2;
inline constexpr int convergence = 3;
inline constexpr int validation = 4;
}  // namespace exit_code

}  // namespace mmwia
