#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "mmwia/propagation.hpp"
#include "mmwia/quadrature.hpp"
#include "mmwia/rng.hpp"
#include "mmwia/special_functions.hpp"
#include "mmwia/units.hpp"

using namespace mmwia;

TEST_SUITE("quadrature") {

TEST_CASE("known integrals") {
    const auto a = integrate([](double r) { return std::exp(-r); }, 0.0, INFINITY);
    CHECK(a.converged);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-10));
    const auto b = integrate([](double r) { return 1.0 / std::sqrt(r); }, 0.0, 1.0);
    CHECK(b.converged);
    CHECK(b.value == doctest::Approx(2.0).epsilon(1e-8));
    const auto c = integrate([](double r) { return r * std::exp(-r * r); }, 0.0, INFINITY);
    CHECK(c.converged);
    CHECK(c.value == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("pieces split at a discontinuity") {
    const double pts[] = {0.0, 100.0, INFINITY};
    QuadratureSpec spec;
    spec.tail_scale = 100.0;
    const auto r = integrate_pieces([](double x) { return x <= 100.0 ? 0.5 * x : 0.0; }, pts, spec);
    CHECK(r.value == doctest::Approx(2500.0).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported and can throw") {
    QuadratureSpec spec;
    spec.max_subdivisions = 8;
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-300;
    auto f = [](double x) { return std::sin(1.0 / x) / std::sqrt(x); };
    const auto r = integrate(f, 1e-6, 1.0, spec);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(integrate_or_throw(f, 1e-6, 1.0, spec), ConvergenceError);
    CHECK_THROWS_AS(integrate(f, 1.0, 1.0), DomainError);
}

TEST_CASE("integration is bit-deterministic") {
    auto f = [](double r) { return std::exp(-r) * std::cos(3.0 * r) + 1.0 / (1.0 + r * r); };
    const auto a = integrate(f, 0.0, INFINITY);
    const auto b = integrate(f, 0.0, INFINITY);
    CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.error, &b.error, sizeof(double)) == 0);
}

TEST_CASE("V and U trivial cases") {
    const auto cfg = SystemConfig::defaults();
    for (const auto& m : {BlockageModel(LosBall{100, 1}), BlockageModel(LosBall{100, 0.25}),
                          BlockageModel(ExponentialBlockage{50})}) {
        const double z = db_to_linear(95.0);
        CHECK(special_v(z, 0.0, 1e-4, m, cfg) == 1.0);
        CHECK(special_u(z, 0.0, 1e-4, m, cfg) == 1.0);
        CHECK(special_v(z, 0.4, 0.0, m, cfg) == 1.0);
        CHECK(special_u(z, 0.4, 0.0, m, cfg) == 1.0);
    }
}

TEST_CASE("0 < U <= V <= 1 and monotone in t, lam, z") {
    const auto cfg = SystemConfig::defaults();
    for (const auto& m : {BlockageModel(LosBall{100, 1}), BlockageModel(LosBall{100, 0.5}),
                          BlockageModel(ExponentialBlockage{100}), BlockageModel(ExponentialBlockage{25})}) {
        for (double zdb : {70.0, 90.0, 101.4, 110.0, 130.0}) {
            const double z = db_to_linear(zdb);
            double pv = 2.0, pu = 2.0;
            for (double t : {0.01, 0.1, 0.398, 1.0, 10.0}) {
                const double v = special_v(z, t, 2.5e-5, m, cfg), u = special_u(z, t, 2.5e-5, m, cfg);
                CHECK(u > 0.0);
                CHECK(u <= v + 1e-14);
                CHECK(v <= 1.0);
                CHECK(v <= pv + 1e-14);
                CHECK(u <= pu + 1e-14);
                pv = v, pu = u;
            }
            double pl = 2.0;
            for (double lam : {1e-6, 1e-5, 1e-4}) {
                const double v = special_v(z, 0.4, lam, m, cfg);
                CHECK(v <= pl + 1e-14);
                pl = v;
            }
        }
        double pz_u = 2.0;
        for (double zdb = 62.0; zdb < 140.0; zdb += 3.1) {
            const double u = special_u(db_to_linear(zdb), 0.4, 2.5e-5, m, cfg);
            CHECK(u <= pz_u + 1e-12);
            pz_u = u;
        }
    }
}

TEST_CASE("V is not monotone in z across the LOS ball edge") {
    // Just past l_L(R_c) every LOS interferer falls inside the excluded region.
    const auto cfg = SystemConfig::defaults();
    const BlockageModel m(LosBall{100, 1});
    const double edge = path_loss(100.0, true, cfg);
    CHECK(special_v(edge * 1.01, 0.4, 2.5e-5, m, cfg) > special_v(edge * 0.9, 0.4, 2.5e-5, m, cfg));
}

TEST_CASE("closed-form interference mass matches quadrature") {
    const auto cfg = SystemConfig::defaults();
    for (double p : {1.0, 0.75, 0.25}) {
        const BlockageModel m(LosBall{100, p});
        for (double zdb : {65.0, 90.0, 101.4, 120.0, 145.0})
            for (double t : {0.05, 0.398, 5.0})
                for (bool excl : {false, true}) {
                    const double z = db_to_linear(zdb);
                    const auto a = interference_mass(z, t, excl, m, cfg);
                    const auto b = interference_mass_numeric(z, t, excl, m, cfg);
                    CHECK(a.los == doctest::Approx(b.los).epsilon(1e-7));
                    CHECK(a.nlos == doctest::Approx(b.nlos).epsilon(1e-7));
                }
    }
}

namespace {

// Monte Carlo Laplace functional of the interference at threshold t for a
// receiver whose useful path loss is z: E[prod_i 1 / (1 + t z / l_i)] over a
// PPP of intensity lam in a disc of the given radius, with fading averaged
// out per point. The NLOS tail beyond the disc contributes about
// 2 pi lam t z / (2 beta radius^2).
struct McLaplace {
    double mean, half;
};

McLaplace mc_laplace(double z, double t, double lam, bool exclude_closer, const BlockageModel& m,
                     const SystemConfig& cfg, int draws, double radius) {
    const double mean_count = lam * M_PI * radius * radius;
    double s = 0.0, ss = 0.0;
    for (int d = 0; d < draws; ++d) {
        const RandomStream rs(99, Stream::Test, static_cast<std::uint32_t>(d));
        const auto n = rs.poisson(mean_count);
        double prod = 1.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            const double r = radius * std::sqrt(rs.uniform(1 + 2 * i));
            const bool los = rs.uniform(2 + 2 * i) < m.los_probability(r);
            const double l = path_loss(r, los, cfg);
            if (exclude_closer && l <= z) continue;
            prod *= 1.0 / (1.0 + t * z / l);
        }
        s += prod;
        ss += prod * prod;
    }
    const double mean = s / draws;
    const double var = (ss / draws - mean * mean) / (draws - 1);
    return {mean, 1.96 * std::sqrt(var)};
}

}  // namespace

TEST_CASE("V and U against a Monte Carlo Laplace functional") {
    const auto cfg = SystemConfig::defaults();
    const BlockageModel m(LosBall{100, 1});
    const double lam = cfg.lambda_bs / 4.0;
    const double t = db_to_linear(-4.0);
    for (double zdb : {101.4, 95.0}) {
        const double z = db_to_linear(zdb);
        const auto v_mc = mc_laplace(z, t, lam, true, m, cfg, 100000, 8000.0);
        const auto u_mc = mc_laplace(z, t, lam, false, m, cfg, 100000, 1500.0);
        const double v = special_v(z, t, lam, m, cfg), u = special_u(z, t, lam, m, cfg);
        INFO("z_db=" << zdb << " V=" << v << " mc=" << v_mc.mean << "+-" << v_mc.half << " U=" << u << " mc="
                     << u_mc.mean << "+-" << u_mc.half);
        CHECK(std::abs(v - v_mc.mean) <= std::max(v_mc.half, 1e-12));
        CHECK(std::abs(u - u_mc.mean) <= u_mc.half);
    }
}

TEST_CASE("exponential blockage V against Monte Carlo") {
    const auto cfg = SystemConfig::defaults();
    const BlockageModel m(ExponentialBlockage{50});
    const double lam = cfg.lambda_bs / 8.0;
    const double z = db_to_linear(100.0), t = 1.0;
    const auto u_mc = mc_laplace(z, t, lam, false, m, cfg, 100000, 1500.0);
    const double u = special_u(z, t, lam, m, cfg);
    INFO("U=" << u << " mc=" << u_mc.mean << "+-" << u_mc.half);
    CHECK(std::abs(u - u_mc.mean) <= u_mc.half);
}

TEST_CASE("quadrature spec validation") {
    QuadratureSpec s;
    s.rel_tol = 0.0;
    CHECK_THROWS(s.validate());
    QuadratureSpec s2;
    s2.max_subdivisions = 4;
    CHECK_THROWS(s2.validate());
    CHECK_NOTHROW(QuadratureSpec{}.validate());
}

}
