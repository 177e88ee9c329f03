#include <cmath>
#include <random>

#include "doctest.h"
#include "mmwia/antenna.hpp"
#include "mmwia/blockage.hpp"
#include "mmwia/errors.hpp"
#include "mmwia/propagation.hpp"
#include "mmwia/protocol.hpp"
#include "mmwia/system_config.hpp"
#include "mmwia/units.hpp"

using namespace mmwia;

namespace {
double to_db(double x) { return 10.0 * std::log10(x); }
}  // namespace

TEST_SUITE("core") {

TEST_CASE("path loss at reference distance and at 100 m") {
    const auto cfg = SystemConfig::defaults();
    CHECK(to_db(path_loss(1.0, true, cfg)) == doctest::Approx(61.4).epsilon(1e-12));
    CHECK(to_db(path_loss(1.0, false, cfg)) == doctest::Approx(61.4).epsilon(1e-12));
    CHECK(to_db(path_loss(100.0, true, cfg)) == doctest::Approx(101.4).epsilon(1e-12));
    CHECK(to_db(path_loss(10.0, false, cfg)) == doctest::Approx(101.4).epsilon(1e-12));
}

TEST_CASE("path loss rejects non-positive distance") {
    const auto cfg = SystemConfig::defaults();
    CHECK_THROWS_AS(path_loss(0.0, true, cfg), DomainError);
    CHECK_THROWS_AS(path_loss(-3.0, false, cfg), DomainError);
}

TEST_CASE("path loss is increasing and NLOS dominates beyond 1 m") {
    const auto cfg = SystemConfig::defaults();
    double prev_l = 0.0, prev_n = 0.0;
    for (double r = 0.5; r < 2000.0; r *= 1.37) {
        const double l = path_loss(r, true, cfg), n = path_loss(r, false, cfg);
        CHECK(l > prev_l);
        CHECK(n > prev_n);
        if (r >= 1.0) CHECK(n >= l);
        prev_l = l, prev_n = n;
    }
}

TEST_CASE("inverse path loss") {
    const auto cfg = SystemConfig::defaults();
    CHECK(inverse_path_loss(db_to_linear(101.4), true, cfg) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(inverse_path_loss(cfg.beta, true, cfg) == doctest::Approx(1.0).epsilon(1e-14));
    for (double r : {1.0, 3.7, 42.0, 815.0}) {
        CHECK(inverse_path_loss(path_loss(r, false, cfg), false, cfg) == doctest::Approx(r).epsilon(1e-12));
        CHECK(inverse_path_loss(path_loss(r, true, cfg), true, cfg) == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK_THROWS_AS(inverse_path_loss(cfg.beta * 0.5, true, cfg), DomainError);
}

TEST_CASE("blockage LOS probability") {
    const BlockageModel ball1(LosBall{100.0, 1.0});
    const BlockageModel ball_half(LosBall{100.0, 0.5});
    const BlockageModel expo(ExponentialBlockage{100.0});
    CHECK(ball1.los_probability(50.0) == 1.0);
    CHECK(ball1.los_probability(100.0) == 1.0);
    CHECK(ball1.los_probability(100.0001) == 0.0);
    CHECK(ball_half.los_probability(150.0) == 0.0);
    CHECK(ball_half.los_probability(20.0) == 0.5);
    CHECK(expo.los_probability(100.0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    for (double r = 0.0; r < 1000.0; r += 7.3)
        for (const auto* m : {&ball1, &ball_half, &expo}) {
            const double h = m->los_probability(r);
            CHECK(h >= 0.0);
            CHECK(h <= 1.0);
        }
}

TEST_CASE("blockage parsing and labels") {
    CHECK(BlockageModel::parse("losball:100:0.5").label() == "losball:100:0.5");
    CHECK(BlockageModel::parse("exp:25").label() == "exp:25");
    CHECK_THROWS_AS(BlockageModel::parse("losball:100:1.5"), ConfigError);
    CHECK_THROWS_AS(BlockageModel::parse("losball:0.5:1"), ConfigError);
    CHECK_THROWS_AS(BlockageModel::parse("exp:0"), ConfigError);
    CHECK_THROWS_AS(BlockageModel::parse("cone:3"), ConfigError);
}

TEST_CASE("BS beam gains") {
    CHECK(bs_beam_gain(kTwoPi / 8).main == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(bs_beam_gain(kTwoPi / 8).side == 0.0);
    CHECK(bs_beam_gain(kTwoPi).main == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bs_beam_gain(kTwoPi / 48).main == doctest::Approx(48.0).epsilon(1e-14));
    CHECK_THROWS_AS(bs_beam_gain(0.0), DomainError);
}

TEST_CASE("user beam gain at a quarter turn") {
    // gamma = 2pi / (0.1 * 3pi/2) = 40/3; main = 4 gamma/(gamma+1), side = (4/3)/(gamma+1)
    const auto g = user_beam_gain(kTwoPi / 4, SystemConfig::defaults());
    CHECK(g.main == doctest::Approx(160.0 / 43.0).epsilon(1e-13));
    CHECK(g.side == doctest::Approx(4.0 / 43.0).epsilon(1e-13));
    CHECK(g.main / g.side >= 10.0);
}

TEST_CASE("user gain approaches gamma/(gamma+1) form near full circle") {
    const double c0 = 0.1;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double theta = kTwoPi - eps;
        const double gamma = kTwoPi / (c0 * eps);
        const auto g = user_beam_gain(theta, c0);
        CHECK(g.main == doctest::Approx(kTwoPi / theta * gamma / (gamma + 1.0)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(user_beam_gain(kTwoPi, c0), DomainError);
}

TEST_CASE("beam gain power normalization on random beamwidths") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> dist(1e-6, kTwoPi - 1e-6);
    double worst_user = 0.0, worst_bs = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double th = dist(eng);
        const auto u = user_beam_gain(th, 0.1);
        const auto b = bs_beam_gain(th);
        worst_user = std::max(worst_user, std::abs(u.main * th / kTwoPi + u.side * (kTwoPi - th) / kTwoPi - 1.0));
        worst_bs = std::max(worst_bs, std::abs(b.main * th / kTwoPi - 1.0));
        if (th < kTwoPi * 0.9) CHECK(u.main > u.side);
    }
    CHECK(worst_user <= 1e-12);
    CHECK(worst_bs <= 1e-12);
}

TEST_CASE("protocol table") {
    struct Row { ProtocolName n; int m_cs, n_cs, m_ra, n_ra; };
    for (int m = 4; m <= 48; m += 4) {
        const Row rows[] = {{ProtocolName::Baseline, m, 4, m, 1},
                            {ProtocolName::FastRA, m, 4, 1, 1},
                            {ProtocolName::FastCS, 4, 4, m, 1},
                            {ProtocolName::OmniRX, m, 1, 1, 4}};
        for (const auto& r : rows) {
            const auto p = Protocol::make(r.n, m, 4);
            CHECK(p.m_cs == r.m_cs);
            CHECK(p.n_cs == r.n_cs);
            CHECK(p.m_ra == r.m_ra);
            CHECK(p.n_ra == r.n_ra);
            CHECK(p.k_cs() == std::max(r.m_cs, r.n_cs));
            CHECK(p.n_data() == 4);
            CHECK(p.q() * p.n_data() == p.k_cs());
        }
    }
}

TEST_CASE("protocol rejects non-integer M/N") {
    CHECK_THROWS_AS(Protocol::make(ProtocolName::Baseline, 6, 4), ConfigError);
    CHECK_THROWS_AS(Protocol::make(ProtocolName::Baseline, 0, 4), ConfigError);
    CHECK_THROWS_AS(Protocol::make(ProtocolName::FastCS, 8, 4, 16), ConfigError);
    CHECK_THROWS_AS(parse_protocol_name("slow_ra"), ConfigError);
}

TEST_CASE("system config validation names the key") {
    SystemConfig::DbParams p;
    p.lambda_bs_per_km2 = -1.0;
    try {
        SystemConfig::from_db(p).validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "lambda_bs_per_km2");
    }
    SystemConfig::DbParams q;
    q.alpha_nlos = 1.5;
    CHECK_THROWS_AS(SystemConfig::from_db(q).validate(), ConfigError);
    CHECK_NOTHROW(SystemConfig::defaults().validate());
}

TEST_CASE("unit conversions") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(-4.0) == doctest::Approx(0.3981071705534972).epsilon(1e-14));
    CHECK(per_km2_to_per_m2(100.0) == doctest::Approx(1e-4).epsilon(1e-15));
    CHECK(per_m2_to_per_km2(1e-4) == doctest::Approx(100.0).epsilon(1e-15));
    const auto cfg = SystemConfig::defaults();
    CHECK(cfg.c0 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cfg.ia_duration_s(8, 4, 8, 1) == doctest::Approx(40 * 14.3e-6).epsilon(1e-14));
}

}
