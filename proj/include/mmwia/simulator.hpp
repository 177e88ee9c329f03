#pragma once

// System-level Monte Carlo simulation of initial access and the data phase on
// a finite square window. BSs and users are independent PPPs; every random
// draw comes from a counter-based stream keyed by (seed, draw indices, link).

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mmwia/antenna.hpp"
#include "mmwia/blockage.hpp"
#include "mmwia/protocol.hpp"
#include "mmwia/rng.hpp"
#include "mmwia/system_config.hpp"

namespace mmwia {

struct SimulationConfig {
    double area_km = 1.5;             ///< side of the square window
    int n_bs_draws = 50;
    int n_user_draws = 50;
    std::uint64_t seed = 1;
    double interior_margin_km = 0.15; ///< users closer than this to the border are not measured
    bool desk_scale = false;          ///< use desk_bs_draws x desk_user_draws instead
    int desk_bs_draws = 10;
    int desk_user_draws = 10;
    /// Thresholds (dB) at which the conditional DL SINR CCDF is estimated.
    std::vector<double> sinr_thresholds_db{0.0, 10.0, 20.0};

    int bs_draws() const noexcept { return desk_scale ? desk_bs_draws : n_bs_draws; }
    int user_draws() const noexcept { return desk_scale ? desk_user_draws : n_user_draws; }
    double side_m() const noexcept { return area_km * 1e3; }
    double margin_m() const noexcept { return interior_margin_km * 1e3; }
    void validate() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Identifies one (BS draw, user draw) pair; BS positions depend on bs_draw only.
struct StreamId {
    std::uint32_t bs_draw = 0;
    std::uint32_t user_draw = 0;
};

/// One sampled deployment. Fading is not stored: `fading()` regenerates the
/// draw for any (phase, user, BS) triple on demand.
struct NetworkRealization {
    std::uint64_t seed = 0;
    StreamId id;
    double side_m = 0.0;
    std::vector<Point> bs;
    std::vector<Point> users;
    /// LOS flag of link (u, b) at index u * bs.size() + b.
    std::vector<std::uint8_t> los_flags;

    bool los(std::size_t u, std::size_t b) const { return los_flags[u * bs.size() + b] != 0; }
    double distance(std::size_t u, std::size_t b) const;
    double path_loss(std::size_t u, std::size_t b, const SystemConfig& cfg) const;
    /// Unit-mean exponential fading of link (u, b) in the given phase.
    double fading(Stream phase, std::size_t u, std::size_t b) const;
    bool user_inside(std::size_t u, double margin_m) const;
    bool bs_inside(std::size_t b, double margin_m) const;
};

NetworkRealization sample_realization(const SystemConfig& cfg, const BlockageModel& model,
                                      const SimulationConfig& sim, StreamId id);

/// Index of the angular sector of direction `to - from` when the plane is cut
/// into `count` equal sectors starting at angle 0.
int sector_index(const Point& from, const Point& to, int count);

struct UserOutcome {
    bool cs_success = false;
    std::uint64_t detected_sectors = 0;  ///< bit j set if BS sector j was detected
    int serving = -1;
    double z0 = std::numeric_limits<double>::infinity();
    std::uint32_t preamble = 0;
    int ra_sector = -1;  ///< receive sector of the serving BS containing the user
    bool ra_collision = false;
    bool ra_decode = false;
    bool scheduled = false;  ///< picked by its BS in this cycle
    double sched_share = 0.0;  ///< 1 / (connected users of the serving BS)
    double dl_sinr = std::numeric_limits<double>::quiet_NaN();  ///< as if scheduled

    bool connected() const noexcept { return cs_success && !ra_collision && ra_decode; }
};

/// Link-budget constants shared by the three phases.
class Simulator {
public:
    Simulator(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto);

    const SystemConfig& config() const noexcept { return cfg_; }
    const BlockageModel& blockage() const noexcept { return model_; }
    const Protocol& protocol() const noexcept { return proto_; }

    std::vector<UserOutcome> run_cell_search(const NetworkRealization& real) const;
    void run_random_access(const NetworkRealization& real, std::vector<UserOutcome>& out) const;
    void run_data_phase(const NetworkRealization& real, std::vector<UserOutcome>& out) const;
    /// All three phases.
    std::vector<UserOutcome> run_cycle(const NetworkRealization& real) const;

    /// Straightforward single-threaded versions kept as a reference for the
    /// parallel kernels; outputs must match bit for bit.
    std::vector<UserOutcome> run_cell_search_serial(const NetworkRealization& real) const;
    void run_random_access_serial(const NetworkRealization& real, std::vector<UserOutcome>& out) const;
    void run_data_phase_serial(const NetworkRealization& real, std::vector<UserOutcome>& out) const;

    double cs_noise() const noexcept { return cs_noise_; }
    double ra_noise() const noexcept { return ra_noise_; }
    double dl_noise() const noexcept { return dl_noise_; }

private:
    SystemConfig cfg_;
    BlockageModel model_;
    Protocol proto_;
    BeamGain user_n_;    // user pattern with N_data beams
    double cs_noise_;    // sigma^2 / (P_b M_cs G_cs)
    double ra_noise_;    // sigma^2 / (P_u M_ra G_N)
    double dl_noise_;    // sigma^2 / (P_b M G_N)
};

/// Per-realization tallies over users inside the measurement region.
struct RealizationStats {
    StreamId id;
    double users = 0;
    double cs_success = 0;
    double sectors_detected = 0;
    double sectors_total = 0;
    double no_collision = 0;  ///< among CS-successful users
    double ra_fail = 0;
    double ia_success = 0;
    double sched_sum = 0;     ///< sum of 1/n_b over connected users
    double load_sum = 0;      ///< sum of n_b over connected users
    double rate_sum = 0;      ///< sum of W log2(1 + SINR) over connected users, bit/s
    double shared_rate_sum = 0;  ///< sum of W log2(1 + SINR) / n_b over connected users
    std::vector<double> sinr_above;  ///< connected users with SINR >= each threshold
};

RealizationStats tally(const NetworkRealization& real, const std::vector<UserOutcome>& out,
                       const SystemConfig& cfg, const SimulationConfig& sim);

struct Estimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
    double half_width() const { return 0.5 * (ci_high - ci_low); }
};

/// Ratio estimator sum(num) / sum(den) with a 95% CI from the between-
/// realization variance (delta method).
Estimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den);

/// Smooth function of per-realization column totals, with a 95% jackknife CI
/// over realizations. `f` receives the column sums.
Estimate jackknife_estimate(const std::vector<std::vector<double>>& columns,
                            const std::function<double(const std::vector<double>&)>& f);

struct MetricsReport {
    std::string protocol;
    std::string blockage;
    int m = 0;
    int n = 0;
    int realizations = 0;
    double users = 0;
    Estimate p_cs_sector, p_cs, p_co, eta_ia, delay_s;
    /// 1 / (mean number of connected users at the serving BS of a connected user)
    Estimate sched_prob;
    /// (1 - overhead) * eta * sched_prob * E[W log2(1 + SINR) | connected]
    Estimate upt_bps;
    /// Realized per-user share E[1/n_b] and the throughput it yields.
    Estimate sched_share, upt_realized_bps;
    std::vector<double> sinr_thresholds_db;
    std::vector<Estimate> sinr_ccdf;
    double overhead = 0.0;
    bool never_connects = false;
};

/// Empirical empty space function of IA-successful users seen from BSs.
struct EsfResult {
    std::vector<double> r_m;
    std::vector<double> empirical;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<double> fitted;  ///< 1 - exp(-lambda_u eta pi r^2)
    double fitted_intensity = 0.0;  ///< per m^2
    bool defined = true;  ///< false when no user succeeded
};

/// Nearest-successful-user distances: counts[k] = interior BSs within r_grid[k].
struct EsfSample {
    double bs_count = 0;
    std::vector<double> within;
};

EsfSample esf_sample(const NetworkRealization& real, const std::vector<UserOutcome>& out,
                     const std::vector<double>& r_grid, double margin_m);

/// Pools per-realization samples; the CI comes from `bootstrap` resamples of
/// realizations.
EsfResult compute_esf(const std::vector<EsfSample>& samples, const std::vector<double>& r_grid,
                      double fitted_intensity, std::uint64_t seed, int bootstrap = 400);

struct CampaignOptions {
    std::vector<double> esf_grid_m;  ///< empty: skip the ESF
};

struct CampaignResult {
    MetricsReport report;
    std::vector<RealizationStats> per_realization;
    std::optional<EsfResult> esf;
};

/// Runs every (BS draw, user draw) pair in order and aggregates.
CampaignResult run_campaign(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto,
                            const SimulationConfig& sim, const CampaignOptions& opts = {});

}  // namespace mmwia
