#include <set>
#include <sstream>

#include "doctest.h"
#include "mmwia/errors.hpp"
#include "mmwia/experiments.hpp"

using namespace mmwia;

namespace {

RunConfig tiny_validate_config() {
    RunConfig cfg;
    cfg.sweep.protocols = {ProtocolName::FastRA};
    cfg.sweep.blockages = {"losball:100:1"};
    cfg.sweep.m_values = {8};
    cfg.simulation.n_bs_draws = 2;
    cfg.simulation.n_user_draws = 2;
    return cfg;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing applies sections and names unknown keys") {
    const auto cfg = parse_config(R"({"system": {"lambda_bs_per_km2": 50, "gamma_cs_db": -6},
                                      "simulation": {"seed": 42, "desk_scale": true},
                                      "sweep": {"protocols": ["fast_cs", "omni_rx"], "m_range": "8:16:4"},
                                      "tolerances": {"upt_rel": 0.1}})");
    CHECK(cfg.system.lambda_bs_per_km2 == 50.0);
    CHECK(cfg.system.gamma_cs_db == -6.0);
    CHECK(cfg.simulation.seed == 42u);
    CHECK(cfg.simulation.desk_scale);
    CHECK(cfg.sweep.protocols == std::vector<ProtocolName>{ProtocolName::FastCS, ProtocolName::OmniRX});
    CHECK(cfg.sweep.m_values == std::vector<int>{8, 12, 16});
    CHECK(cfg.tolerances.upt_rel == 0.1);

    try {
        parse_config(R"({"system": {"lambda_bs": 50}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "system.lambda_bs");
    }
    try {
        parse_config(R"({"simulation": {"seed": "abc"}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "simulation.seed");
    }
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"blockage": {}})"), ConfigError);
}

TEST_CASE("resolved config round-trips through JSON") {
    RunConfig a;
    a.system.p_bs_dbm = 27.0;
    a.sweep.blockages = {"exp:50"};
    const auto b = parse_config(a.to_json());
    CHECK(b.to_json() == a.to_json());
}

TEST_CASE("M range parsing") {
    CHECK(parse_m_range("4:48:4").size() == 12);
    CHECK(parse_m_range("8:8:4") == std::vector<int>{8});
    CHECK_THROWS_AS(parse_m_range("8:4:4"), ConfigError);
    CHECK_THROWS_AS(parse_m_range("4:8"), ConfigError);
    CHECK_THROWS_AS(parse_m_range("4:8:0"), ConfigError);
}

TEST_CASE("tolerance assignments") {
    Tolerances t;
    t.set("p_cs=0.05");
    CHECK(t.p_cs == 0.05);
    CHECK_THROWS_AS(t.set("p_cs"), ConfigError);
    CHECK_THROWS_AS(t.set("bogus=1"), ConfigError);
    CHECK_THROWS_AS(t.set("p_co=abc"), ConfigError);
}

TEST_CASE("sweep validation") {
    SweepSpec s;
    s.protocols.clear();
    CHECK_THROWS_AS(s.validate(), UsageError);
    SweepSpec t;
    t.m_values = {6};
    CHECK_THROWS_AS(t.validate(), ConfigError);
    SweepSpec u;
    u.blockages = {"losball:100:2"};
    CHECK_THROWS_AS(u.validate(), ConfigError);
}

TEST_CASE("empty protocol list is a usage error for every verb") {
    RunConfig cfg;
    cfg.sweep.protocols.clear();
    std::ostringstream out;
    CHECK_THROWS_AS(cmd_analytic(cfg, out), UsageError);
    CHECK_THROWS_AS(cmd_simulate(cfg, out), UsageError);
    CHECK_THROWS_AS(cmd_validate(cfg, out), UsageError);
}

TEST_CASE("analytic output is byte-identical across reruns") {
    RunConfig cfg;
    cfg.sweep.protocols = {ProtocolName::Baseline, ProtocolName::FastRA};
    cfg.sweep.m_values = {4, 8};
    cfg.sweep.blockages = {"losball:100:1", "losball:100:0.5"};
    std::ostringstream a, b;
    CHECK(cmd_analytic(cfg, a) == exit_code::ok);
    CHECK(cmd_analytic(cfg, b) == exit_code::ok);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("# config ") != std::string::npos);
    CHECK(a.str().find("protocol,blockage,M") != std::string::npos);
}

TEST_CASE("simulate table has CI columns and provenance") {
    auto cfg = tiny_validate_config();
    cfg.sweep.engine = Engine::Both;
    std::ostringstream out;
    CHECK(cmd_simulate(cfg, out) == exit_code::ok);
    const auto s = out.str();
    CHECK(s.find("eta_ia_ci_low") != std::string::npos);
    CHECK(s.find("analytic_eta_ia") != std::string::npos);
    CHECK(s.find("simulated") != std::string::npos);
}

TEST_CASE("simulate with the analytic engine emits the analytic table") {
    auto cfg = tiny_validate_config();
    cfg.sweep.engine = Engine::Analytic;
    std::ostringstream a, b;
    CHECK(cmd_simulate(cfg, a) == exit_code::ok);
    CHECK(cmd_analytic(cfg, b) == exit_code::ok);
    CHECK(a.str() == b.str());
}

TEST_CASE("zero tolerance reports failures without crashing") {
    auto cfg = tiny_validate_config();
    cfg.tolerances = {0, 0, 0, 0, 0};
    std::ostringstream out;
    ValidationReport rep;
    const int rc = cmd_validate(cfg, out, &rep);
    CHECK_FALSE(rep.rows.empty());
    if (!rep.all_pass()) CHECK(rc == exit_code::validation);
    else CHECK(rc == exit_code::ok);
    for (const auto& r : rep.rows)
        CHECK(r.pass == within_expanded_ci(r.analytic, Estimate{r.mc_mean, r.ci_low, r.ci_high}, 0.0));
}

TEST_CASE("single-point grid reports one grid point") {
    auto cfg = tiny_validate_config();
    std::ostringstream out;
    ValidationReport rep;
    cmd_validate(cfg, out, &rep);
    std::set<std::tuple<std::string, std::string, int>> points;
    std::set<std::string> metrics;
    for (const auto& r : rep.rows) points.insert({r.protocol, r.blockage, r.m}), metrics.insert(r.metric);
    CHECK(points.size() == 1);
    CHECK(metrics.size() == rep.rows.size());
}

TEST_CASE("expanded CI rule") {
    const Estimate e{0.5, 0.48, 0.52};
    CHECK(within_expanded_ci(0.53, e, 0.02));
    CHECK_FALSE(within_expanded_ci(0.55, e, 0.02));
    CHECK(within_expanded_ci(0.46, e, 0.02));
    CHECK_FALSE(within_expanded_ci(0.4, e, 0.02));
}

}
