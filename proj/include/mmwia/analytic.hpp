#pragma once

// Stochastic-geometry evaluation of initial access performance: per-sector
// path-loss law, CS detection, serving path loss, RA collision/decoding, IA
// success, delay, conditional downlink SINR and user-perceived throughput.

#include <atomic>
#include <cstdint>
#include <vector>

#include "mmwia/antenna.hpp"
#include "mmwia/blockage.hpp"
#include "mmwia/protocol.hpp"
#include "mmwia/quadrature.hpp"
#include "mmwia/special_functions.hpp"
#include "mmwia/system_config.hpp"

namespace mmwia {

struct AnalyticOptions {
    QuadratureSpec inner = inner_quadrature();
    /// Outer integrals over path loss and SINR.
    QuadratureSpec outer{.rel_tol = 1e-6, .abs_tol = 1e-12, .max_subdivisions = 400};
    /// Largest panel of the path-loss grid, in ln z.
    double max_panel_width = 1.0;
    /// The rate integral stops where the conditional SINR CCDF drops below this.
    double rate_truncation = 1e-6;
};

/// Bit flags describing numerical trouble during an evaluation.
enum QuadFlag : unsigned {
    kQuadInnerUnconverged = 1u,
    kQuadGridUnconverged = 2u,
    kQuadRateUnconverged = 4u,
};

struct IAMetrics {
    double p_cs_sector = 0.0;  ///< per-sector detection probability
    double p_cs = 0.0;         ///< cell search success
    double p_co = 1.0;         ///< no preamble collision
    double eta_ia = 0.0;       ///< initial access success
    double delay_s = 0.0;      ///< +inf when eta_ia == 0
    double overhead = 0.0;     ///< fraction of the cycle spent in CS + RA
    double sched_prob = 0.0;
    double upt_bps = 0.0;
    bool never_connects = false;
    unsigned quad_flags = 0;
};

/// K_cs (a tail + b miss)^{q-1} (tail c + miss d)^{K_cs-q}: the closed form of
/// the sum over detected-sector configurations in the downlink CCDF, where
/// a/b are the main-lobe Laplace factors for detected/undetected sectors and
/// c/d their side-lobe counterparts.
double dl_sector_product(double tail, double miss, double v_main, double u_main, double v_side, double u_side,
                         int k_cs, int q);

/// Immutable evaluation context for one (system, blockage, protocol) triple.
/// Construction tabulates the per-sector path-loss law on an adaptive grid in
/// ln z; every later query reuses it. All const members are safe to call
/// concurrently.
class AnalyticContext {
public:
    AnalyticContext(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto,
                    const AnalyticOptions& opts = {});

    AnalyticContext(const AnalyticContext&) = delete;
    AnalyticContext& operator=(const AnalyticContext&) = delete;

    const SystemConfig& config() const noexcept { return cfg_; }
    const BlockageModel& blockage() const noexcept { return model_; }
    const Protocol& protocol() const noexcept { return proto_; }

    /// Density of the minimum path loss Z1 inside one BS sector (z > 0).
    double min_pl_pdf(double z) const;
    /// P(Z1 >= z).
    double min_pl_ccdf(double z) const;

    /// Detection probability of the sector's strongest BS given Z1 = z.
    double conditional_detection(double z) const;

    double sector_detection_prob() const noexcept { return p_sector_; }
    /// int_{z0}^inf conditional_detection(z) f_Z1(z) dz.
    double sector_detection_tail(double z0) const;

    double cell_search_success() const noexcept { return p_cs_; }

    /// P(Z0 >= z0) for the path loss to the tagged BS (infinite on CS failure).
    double serving_pl_ccdf(double z0) const;
    /// Density of Z0 on its finite part; integrates to cell_search_success().
    double serving_pl_pdf(double z0) const;

    double no_collision_prob() const noexcept { return p_co_; }

    /// RA preamble decoding probability at the tagged BS with path loss z0
    /// (0 for z0 = +inf).
    double ra_decode_prob(double z0) const;

    double ia_success() const noexcept { return eta_; }

    /// Expected IA delay in seconds; +inf when IA never succeeds.
    double expected_delay() const;
    double overhead() const;
    double sched_prob() const;

    /// P(SINR_DL >= gamma | IA success); gamma is linear. NaN when eta == 0.
    double dl_sinr_ccdf(double gamma) const;

    /// int_0^inf P_DL(g) / (1 + g) dg, truncated where P_DL < rate_truncation.
    double rate_integral() const;

    double average_upt() const;

    /// All scalar metrics (runs the rate integral).
    IAMetrics metrics() const;

    unsigned quad_flags() const noexcept { return flags_.load(); }

    /// Lower/upper ends of the tabulated path-loss range.
    double z_min() const noexcept { return z_lo_; }
    double z_max() const noexcept { return z_hi_; }
    std::size_t grid_nodes() const noexcept { return node_x_.size(); }

private:
    void build_grid();
    double ptilde_f(double z) const;
    double v_fn(double z, double t, double lam) const;
    double u_fn(double z, double t, double lam) const;
    void flag(unsigned f) const { flags_.fetch_or(f); }

    SystemConfig cfg_;
    BlockageModel model_;
    Protocol proto_;
    AnalyticOptions opts_;

    // derived constants
    int k_ = 1;
    int q_ = 1;
    double lam_sector_ = 0.0;
    double cs_noise_ = 0.0;   // sigma^2 / (P_b M_cs G_cs)
    double ra_noise_ = 0.0;   // sigma^2 / (P_u M_ra G_N)
    double dl_noise_ = 0.0;   // sigma^2 / (P_b M G_N)
    double side_ratio_ = 1.0; // g/G of the data-phase user beam
    double n_data_ = 1.0;
    bool degenerate_ = false;

    // path-loss grid: panel edges in ln z, 15 Kronrod nodes per panel
    double z_lo_ = 0.0, z_hi_ = 0.0;
    std::vector<double> edges_;
    std::vector<double> node_x_, node_z_, node_wz_;
    std::vector<double> f_, ptilde_, tail_, pra_;
    std::vector<double> tail_at_edge_;

    double p_sector_ = 0.0;
    double p_cs_ = 0.0;
    double p_co_ = 1.0;
    double eta_ = 0.0;

    mutable std::atomic<unsigned> flags_{0};
};

}  // namespace mmwia
