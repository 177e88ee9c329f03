#include <cmath>
#include <vector>

#include "doctest.h"
#include "mmwia/analytic.hpp"
#include "mmwia/propagation.hpp"
#include "mmwia/units.hpp"

using namespace mmwia;

namespace {

Protocol custom(int m_cs, int n_cs, int m_ra = 1, int n_ra = 1) {
    Protocol p;
    p.m_cs = m_cs, p.n_cs = n_cs, p.m_ra = m_ra, p.n_ra = n_ra;
    p.m_bs = std::max(m_cs, n_cs);
    p.n_user = 1;
    return p;
}

const BlockageModel kBall(LosBall{100, 1});

// Sum over every subset of detected sectors, sector 0 being the serving one
// and sectors 1..q-1 sharing the user's main lobe.
double explicit_sector_sum(double tail, double miss, double a, double b, double c, double d, int k, int q) {
    double total = 0.0;
    const unsigned others = static_cast<unsigned>(k - 1);
    for (unsigned mask = 0; mask < (1u << others); ++mask) {
        double term = 1.0;
        for (unsigned j = 0; j < others; ++j) {
            const bool detected = (mask >> j) & 1u;
            const bool main_lobe = static_cast<int>(j) < q - 1;
            if (detected) term *= tail * (main_lobe ? a : c);
            else term *= miss * (main_lobe ? b : d);
        }
        total += term;
    }
    return k * total;
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("min path-loss PDF integrates to one") {
    const auto cfg = SystemConfig::defaults();
    for (const auto& m : {kBall, BlockageModel(LosBall{100, 0.25}), BlockageModel(ExponentialBlockage{100})}) {
        const AnalyticContext ctx(cfg, m, Protocol::make(ProtocolName::Baseline, 8, 4));
        // integrate over u = ln z
        auto f = [&](double u) {
            const double z = std::exp(u);
            return ctx.min_pl_pdf(z) * z;
        };
        const double lo = std::log(cfg.beta) - 20.0;
        const double bl = std::log(path_loss(100.0, true, cfg)), bn = std::log(path_loss(100.0, false, cfg));
        const double pts[] = {lo, bl, bn, bn + 60.0};
        QuadratureSpec spec{.rel_tol = 1e-10, .abs_tol = 1e-14, .max_subdivisions = 2000};
        const auto r = integrate_pieces(f, pts, spec);
        INFO(m.label());
        CHECK(std::abs(r.value - 1.0) <= 1e-6);
    }
}

TEST_CASE("LOS ball with p = 1 reduces to the three-piece closed form") {
    const auto cfg = SystemConfig::defaults();
    const int k = 4;
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 4, 4));
    const double ls = cfg.lambda_bs / k;
    const double zl = cfg.beta * 100.0 * 100.0, zn = cfg.beta * std::pow(100.0, 4);
    for (double zdb = 55.0; zdb < 150.0; zdb += 0.7) {
        const double z = db_to_linear(zdb);
        double expect;
        if (z <= zl) expect = std::exp(-M_PI * ls * z / cfg.beta);
        else if (z <= zn) expect = std::exp(-M_PI * ls * 1e4);
        else expect = std::exp(-M_PI * ls * std::sqrt(z / cfg.beta));
        CHECK(std::abs(ctx.min_pl_ccdf(z) - expect) <= 1e-9);
    }
}

TEST_CASE("sector detection tail and cell search identity") {
    const auto cfg = SystemConfig::defaults();
    for (auto pn : {ProtocolName::Baseline, ProtocolName::FastCS, ProtocolName::OmniRX}) {
        const AnalyticContext ctx(cfg, kBall, Protocol::make(pn, 16, 4));
        const double p = ctx.sector_detection_prob();
        const int k = ctx.protocol().k_cs();
        CHECK(ctx.sector_detection_tail(0.0) == doctest::Approx(p).epsilon(1e-9));
        CHECK(ctx.sector_detection_tail(cfg.beta) <= p + 1e-12);
        CHECK(ctx.sector_detection_tail(INFINITY) == 0.0);
        CHECK(ctx.cell_search_success() == doctest::Approx(1.0 - std::pow(1.0 - p, k)).epsilon(1e-12));
        CHECK(ctx.conditional_detection(INFINITY) == 0.0);
        CHECK(ctx.conditional_detection(db_to_linear(250.0)) < 1e-12);
    }
}

TEST_CASE("zero CS threshold detects every sector with a BS") {
    auto cfg = SystemConfig::defaults();
    cfg.gamma_cs = 0.0;
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 8, 4));
    for (double zdb : {70.0, 100.0, 130.0}) CHECK(ctx.conditional_detection(db_to_linear(zdb)) == 1.0);
    CHECK(ctx.sector_detection_prob() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("serving path-loss law") {
    const auto cfg = SystemConfig::defaults();
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 8, 4));
    // The path-loss law holds below 1 m, so only a BS within 1 m beats beta.
    CHECK(ctx.serving_pl_ccdf(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ctx.serving_pl_ccdf(cfg.beta) - std::exp(-M_PI * cfg.lambda_bs)) <= 1e-6);
    CHECK(std::abs(ctx.serving_pl_ccdf(INFINITY) - (1.0 - ctx.cell_search_success())) <= 1e-9);
    CHECK(std::abs(ctx.serving_pl_ccdf(db_to_linear(300.0)) - (1.0 - ctx.cell_search_success())) <= 1e-9);
    auto f = [&](double u) {
        const double z = std::exp(u);
        return ctx.serving_pl_pdf(z) * z;
    };
    const double bl = std::log(path_loss(100.0, true, cfg)), bn = std::log(path_loss(100.0, false, cfg));
    const double pts[] = {std::log(cfg.beta) - 20.0, bl, bn, bn + 60.0};
    QuadratureSpec spec{.rel_tol = 1e-10, .abs_tol = 1e-14, .max_subdivisions = 2000};
    const auto r = integrate_pieces(f, pts, spec);
    CHECK(std::abs(r.value - ctx.cell_search_success()) <= 1e-6);
}

TEST_CASE("RA limits") {
    auto cfg = SystemConfig::defaults();
    {
        const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 8, 4));
        CHECK(ctx.ra_decode_prob(INFINITY) == 0.0);
    }
    cfg.lambda_u = 0.0;
    cfg.gamma_ra = 0.0;
    for (auto pn : {ProtocolName::Baseline, ProtocolName::FastRA}) {
        const AnalyticContext ctx(cfg, kBall, Protocol::make(pn, 8, 4));
        CHECK(ctx.no_collision_prob() == 1.0);
        CHECK(ctx.ra_decode_prob(db_to_linear(120.0)) == 1.0);
        CHECK(std::abs(ctx.ia_success() - ctx.cell_search_success()) <= 1e-6);
    }
}

TEST_CASE("no base stations means no access") {
    auto cfg = SystemConfig::defaults();
    cfg.lambda_bs = 0.0;
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 8, 4));
    const auto m = ctx.metrics();
    CHECK(m.eta_ia == 0.0);
    CHECK(m.never_connects);
    CHECK(std::isinf(m.delay_s));
    CHECK(m.upt_bps == 0.0);
}

TEST_CASE("overhead above one gives zero throughput") {
    auto cfg = SystemConfig::defaults();
    cfg.cycle_t_s = 1e-4;
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 8, 4));
    CHECK(ctx.overhead() >= 1.0);
    CHECK(ctx.average_upt() == 0.0);
}

TEST_CASE("downlink SINR CCDF is a valid conditional CCDF") {
    const auto cfg = SystemConfig::defaults();
    const AnalyticContext ctx(cfg, kBall, Protocol::make(ProtocolName::Baseline, 16, 4));
    CHECK(std::abs(ctx.dl_sinr_ccdf(1e-9) - 1.0) <= 1e-4);
    double prev = 1.0;
    for (double gdb = -20.0; gdb <= 50.0; gdb += 2.5) {
        const double v = ctx.dl_sinr_ccdf(db_to_linear(gdb));
        CHECK(v >= 0.0);
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
    CHECK_THROWS_AS(ctx.dl_sinr_ccdf(-1.0), DomainError);
}

TEST_CASE("binomial collapse of the detected-sector sum") {
    const double vals[][6] = {{0.31, 0.12, 0.91, 0.83, 0.97, 0.94},
                              {0.05, 0.02, 0.55, 0.41, 0.88, 0.79},
                              {0.6, 0.25, 0.99, 0.97, 0.999, 0.998}};
    for (int k : {4, 8})
        for (int q : {1, 2})
            for (const auto& v : vals) {
                const double tail = v[0], miss = 1.0 - v[0] - v[1];
                const double expl = explicit_sector_sum(tail, miss, v[2], v[3], v[4], v[5], k, q);
                const double coll = dl_sector_product(tail, miss, v[2], v[3], v[4], v[5], k, q);
                CHECK(std::abs(expl - coll) <= 1e-10 * std::max(1.0, std::abs(expl)));
            }
}

TEST_CASE("cell search success grows with beam counts") {
    const auto cfg = SystemConfig::defaults();
    const int grid[] = {1, 2, 4, 8, 16};
    double prev = 0.0;
    for (int m : grid) {
        const AnalyticContext ctx(cfg, kBall, custom(m, 1));
        CHECK(ctx.cell_search_success() >= prev - 1e-12);
        prev = ctx.cell_search_success();
    }
    prev = 0.0;
    for (int n : grid) {
        const AnalyticContext ctx(cfg, kBall, custom(1, n, 1, n));
        CHECK(ctx.cell_search_success() >= prev - 1e-12);
        prev = ctx.cell_search_success();
    }
}

TEST_CASE("serving path loss gets a lighter tail with more sectors") {
    const auto cfg = SystemConfig::defaults();
    const AnalyticContext c4(cfg, kBall, custom(4, 1));
    const AnalyticContext c8(cfg, kBall, custom(8, 1));
    const AnalyticContext c16(cfg, kBall, custom(16, 1));
    for (double zdb = 62.0; zdb <= 160.0; zdb += 2.0) {
        const double z = db_to_linear(zdb);
        CHECK(c8.serving_pl_ccdf(z) <= c4.serving_pl_ccdf(z) + 1e-12);
        CHECK(c16.serving_pl_ccdf(z) <= c8.serving_pl_ccdf(z) + 1e-12);
    }
}

TEST_CASE("consistency chain of the metrics") {
    const auto cfg = SystemConfig::defaults();
    for (auto pn : {ProtocolName::Baseline, ProtocolName::FastRA, ProtocolName::FastCS, ProtocolName::OmniRX}) {
        const auto p = Protocol::make(pn, 12, 4);
        const AnalyticContext ctx(cfg, BlockageModel(LosBall{100, 0.5}), p);
        const auto m = ctx.metrics();
        for (double v : {m.p_cs_sector, m.p_cs, m.p_co, m.eta_ia, m.sched_prob}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(m.eta_ia <= m.p_cs);
        CHECK(m.delay_s >= cfg.ia_duration_s(p.m_cs, p.n_cs, p.m_ra, p.n_ra));
        CHECK(m.quad_flags == 0u);
        CHECK(m.upt_bps > 0.0);
    }
}

TEST_CASE("omni cell search and collision levels") {
    const auto cfg = SystemConfig::defaults();
    const AnalyticContext omni(cfg, kBall, custom(1, 1));
    CHECK(omni.cell_search_success() < 0.75);
    for (int m = 8; m <= 48; m += 8) {
        const AnalyticContext base(cfg, kBall, Protocol::make(ProtocolName::Baseline, m, 4));
        CHECK(base.no_collision_prob() > 0.95);
        const AnalyticContext fra(cfg, kBall, Protocol::make(ProtocolName::FastRA, m, 4));
        CHECK(std::abs(fra.no_collision_prob() - 0.82) <= 0.02);
    }
}

TEST_CASE("delay decreases with success probability at fixed overhead") {
    auto cfg = SystemConfig::defaults();
    const auto p = Protocol::make(ProtocolName::Baseline, 8, 4);
    double prev_eta = 0.0, prev_delay = INFINITY;
    for (double gdb : {10.0, 5.0, 0.0, -4.0, -10.0}) {
        cfg.gamma_cs = db_to_linear(gdb);
        const AnalyticContext ctx(cfg, kBall, p);
        CHECK(ctx.ia_success() >= prev_eta);
        CHECK(ctx.expected_delay() <= prev_delay);
        prev_eta = ctx.ia_success();
        prev_delay = ctx.expected_delay();
    }
}

}
