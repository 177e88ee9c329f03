#include "mmwia/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mmwia/errors.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

using nlohmann::json;

Engine parse_engine(const std::string& s) {
    if (s == "analytic") return Engine::Analytic;
    if (s == "simulate") return Engine::Simulate;
    if (s == "both") return Engine::Both;
    throw ConfigError("engine must be analytic, simulate or both", "engine");
}

namespace {

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::Analytic: return "analytic";
        case Engine::Simulate: return "simulate";
        case Engine::Both: return "both";
    }
    return "?";
}

// Section parsing ----------------------------------------------------------

using Setter = std::function<void(const json&)>;

template <class T>
Setter bind(T& field) {
    return [&field](const json& v) { field = v.get<T>(); };
}

void apply_section(const json& section, const std::string& name, const std::map<std::string, Setter>& setters) {
    if (!section.is_object()) throw ConfigError("section '" + name + "' must be an object", name);
    for (const auto& [key, value] : section.items()) {
        const auto it = setters.find(key);
        const std::string full = name + "." + key;
        if (it == setters.end()) throw ConfigError("unknown configuration key '" + full + "'", full);
        try {
            it->second(value);
        } catch (const json::exception& e) {
            throw ConfigError("bad value for '" + full + "': " + e.what(), full);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), full);
        }
    }
}

}  // namespace

void SweepSpec::validate() const {
    if (protocols.empty()) throw UsageError("protocol list is empty");
    if (blockages.empty()) throw UsageError("blockage list is empty");
    if (m_values.empty()) throw UsageError("M list is empty");
    if (n_user < 1) throw ConfigError("n_user must be >= 1", "sweep.n_user");
    if (m_cs_coarse < 1) throw ConfigError("m_cs_coarse must be >= 1", "sweep.m_cs_coarse");
    for (int m : m_values)
        if (m < 1 || m % n_user != 0)
            throw ConfigError("every M must be a positive multiple of N (got M=" + std::to_string(m) + ")",
                              "sweep.m_values");
    for (const auto& b : blockages) BlockageModel::parse(b);
    for (double r : esf_grid_m)
        if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("ESF radii must be finite and >= 0", "sweep.esf_grid_m");
}

void Tolerances::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("tolerance must be KEY=VAL", "tolerance");
    const std::string key = assignment.substr(0, eq);
    double v = 0.0;
    try {
        std::size_t pos = 0;
        v = std::stod(assignment.substr(eq + 1), &pos);
        if (pos != assignment.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError("bad tolerance value in '" + assignment + "'", "tolerances." + key);
    }
    if (!(v >= 0.0)) throw ConfigError("tolerance must be >= 0", "tolerances." + key);
    if (key == "p_cs") p_cs = v;
    else if (key == "p_co") p_co = v;
    else if (key == "eta_ia") eta_ia = v;
    else if (key == "sinr_ccdf") sinr_ccdf = v;
    else if (key == "upt_rel") upt_rel = v;
    else throw ConfigError("unknown tolerance key '" + key + "'", "tolerances." + key);
}

SystemConfig RunConfig::system_config() const {
    auto c = SystemConfig::from_db(system);
    c.validate();
    return c;
}

std::string RunConfig::to_json() const {
    const auto& s = system;
    json j;
    j["system"] = {{"lambda_bs_per_km2", s.lambda_bs_per_km2}, {"lambda_u_per_km2", s.lambda_u_per_km2},
                   {"fc_ghz", s.fc_ghz},       {"bandwidth_hz", s.bandwidth_hz},
                   {"p_bs_dbm", s.p_bs_dbm},   {"p_user_dbm", s.p_user_dbm},
                   {"noise_dbm", s.noise_dbm}, {"alpha_los", s.alpha_los},
                   {"alpha_nlos", s.alpha_nlos}, {"beta_db", s.beta_db},
                   {"gamma_cs_db", s.gamma_cs_db}, {"gamma_ra_db", s.gamma_ra_db},
                   {"tau_cs_s", s.tau_cs_s},   {"tau_ra_s", s.tau_ra_s},
                   {"cycle_t_s", s.cycle_t_s}, {"n_pa", s.n_pa},
                   {"c0_front_back_db", s.c0_front_back_db}, {"m_antennas", s.m_antennas},
                   {"n_antennas", s.n_antennas}};
    const auto& m = simulation;
    j["simulation"] = {{"area_km", m.area_km},
                       {"n_bs_draws", m.n_bs_draws},
                       {"n_user_draws", m.n_user_draws},
                       {"seed", m.seed},
                       {"interior_margin_km", m.interior_margin_km},
                       {"desk_scale", m.desk_scale},
                       {"desk_bs_draws", m.desk_bs_draws},
                       {"desk_user_draws", m.desk_user_draws},
                       {"sinr_thresholds_db", m.sinr_thresholds_db}};
    std::vector<std::string> protos;
    for (auto p : sweep.protocols) protos.emplace_back(to_string(p));
    j["sweep"] = {{"protocols", protos},           {"blockages", sweep.blockages},
                  {"m_values", sweep.m_values},     {"n_user", sweep.n_user},
                  {"m_cs_coarse", sweep.m_cs_coarse}, {"engine", engine_name(sweep.engine)},
                  {"esf_grid_m", sweep.esf_grid_m}};
    j["tolerances"] = {{"p_cs", tolerances.p_cs},
                       {"p_co", tolerances.p_co},
                       {"eta_ia", tolerances.eta_ia},
                       {"sinr_ccdf", tolerances.sinr_ccdf},
                       {"upt_rel", tolerances.upt_rel}};
    return j.dump();
}

std::vector<int> parse_m_range(const std::string& spec) {
    int a = 0, b = 0, step = 0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%d:%d:%d%c", &a, &b, &step, &tail) != 3 || step <= 0 || a < 1 || b < a)
        throw ConfigError("M range must be A:B:STEP with 1 <= A <= B and STEP > 0", "m_range");
    std::vector<int> out;
    for (int m = a; m <= b; m += step) out.push_back(m);
    return out;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object", "config");
    RunConfig c = std::move(base);
    auto& s = c.system;
    auto& m = c.simulation;
    auto& w = c.sweep;
    auto& t = c.tolerances;

    const std::map<std::string, Setter> system_keys{
        {"lambda_bs_per_km2", bind(s.lambda_bs_per_km2)}, {"lambda_u_per_km2", bind(s.lambda_u_per_km2)},
        {"fc_ghz", bind(s.fc_ghz)},                       {"bandwidth_hz", bind(s.bandwidth_hz)},
        {"p_bs_dbm", bind(s.p_bs_dbm)},                   {"p_user_dbm", bind(s.p_user_dbm)},
        {"noise_dbm", bind(s.noise_dbm)},                 {"alpha_los", bind(s.alpha_los)},
        {"alpha_nlos", bind(s.alpha_nlos)},               {"beta_db", bind(s.beta_db)},
        {"gamma_cs_db", bind(s.gamma_cs_db)},             {"gamma_ra_db", bind(s.gamma_ra_db)},
        {"tau_cs_s", bind(s.tau_cs_s)},                   {"tau_ra_s", bind(s.tau_ra_s)},
        {"cycle_t_s", bind(s.cycle_t_s)},                 {"n_pa", bind(s.n_pa)},
        {"c0_front_back_db", bind(s.c0_front_back_db)},   {"m_antennas", bind(s.m_antennas)},
        {"n_antennas", bind(s.n_antennas)},
    };
    const std::map<std::string, Setter> simulation_keys{
        {"area_km", bind(m.area_km)},
        {"n_bs_draws", bind(m.n_bs_draws)},
        {"n_user_draws", bind(m.n_user_draws)},
        {"seed", bind(m.seed)},
        {"interior_margin_km", bind(m.interior_margin_km)},
        {"desk_scale", bind(m.desk_scale)},
        {"desk_bs_draws", bind(m.desk_bs_draws)},
        {"desk_user_draws", bind(m.desk_user_draws)},
        {"sinr_thresholds_db", bind(m.sinr_thresholds_db)},
    };
    const std::map<std::string, Setter> sweep_keys{
        {"protocols",
         [&w](const json& v) {
             w.protocols.clear();
             for (const auto& p : v) w.protocols.push_back(parse_protocol_name(p.get<std::string>()));
         }},
        {"blockages", bind(w.blockages)},
        {"m_values", bind(w.m_values)},
        {"m_range", [&w](const json& v) { w.m_values = parse_m_range(v.get<std::string>()); }},
        {"n_user", bind(w.n_user)},
        {"m_cs_coarse", bind(w.m_cs_coarse)},
        {"engine", [&w](const json& v) { w.engine = parse_engine(v.get<std::string>()); }},
        {"esf_grid_m", bind(w.esf_grid_m)},
    };
    const std::map<std::string, Setter> tolerance_keys{
        {"p_cs", bind(t.p_cs)},           {"p_co", bind(t.p_co)},       {"eta_ia", bind(t.eta_ia)},
        {"sinr_ccdf", bind(t.sinr_ccdf)}, {"upt_rel", bind(t.upt_rel)},
    };

    for (const auto& [name, section] : doc.items()) {
        if (name == "system") apply_section(section, name, system_keys);
        else if (name == "simulation") apply_section(section, name, simulation_keys);
        else if (name == "sweep") apply_section(section, name, sweep_keys);
        else if (name == "tolerances") apply_section(section, name, tolerance_keys);
        else throw ConfigError("unknown configuration section '" + name + "'", name);
    }
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'", "config");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

// Validation ---------------------------------------------------------------

bool ValidationReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

bool within_expanded_ci(double analytic, const Estimate& mc, double tol) {
    if (!std::isfinite(analytic) || !std::isfinite(mc.mean)) return false;
    const double lo = std::isfinite(mc.ci_low) ? mc.ci_low : mc.mean;
    const double hi = std::isfinite(mc.ci_high) ? mc.ci_high : mc.mean;
    return analytic >= lo - tol && analytic <= hi + tol;
}

std::vector<ValidationRow> compare(const AnalyticContext& ctx, const IAMetrics& a, const MetricsReport& mc,
                                   const Tolerances& tol) {
    std::vector<ValidationRow> rows;
    auto add = [&](std::string metric, double analytic, const Estimate& e, double t) {
        ValidationRow r;
        r.metric = std::move(metric);
        r.protocol = mc.protocol;
        r.blockage = mc.blockage;
        r.m = mc.m;
        r.analytic = analytic;
        r.mc_mean = e.mean;
        r.ci_low = e.ci_low;
        r.ci_high = e.ci_high;
        r.tolerance = t;
        r.pass = within_expanded_ci(analytic, e, t);
        rows.push_back(std::move(r));
    };
    add("p_cs", a.p_cs, mc.p_cs, tol.p_cs);
    add("p_co", a.p_co, mc.p_co, tol.p_co);
    add("eta_ia", a.eta_ia, mc.eta_ia, tol.eta_ia);
    for (std::size_t k = 0; k < mc.sinr_thresholds_db.size(); ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "sinr_ccdf_%gdB", mc.sinr_thresholds_db[k]);
        add(name, ctx.dl_sinr_ccdf(db_to_linear(mc.sinr_thresholds_db[k])), mc.sinr_ccdf[k], tol.sinr_ccdf);
    }
    add("upt_bps", a.upt_bps, mc.upt_bps, tol.upt_rel * std::abs(a.upt_bps));
    return rows;
}

// CSV ----------------------------------------------------------------------

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void comment(const std::string& text) { out_ << "# " << text << '\n'; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << quoted(cells[i]);
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

void echo_config(CsvWriter& csv, const char* verb, const RunConfig& cfg) {
    csv.comment(std::string("mmwia ") + verb);
    csv.comment("config " + cfg.to_json());
}

struct GridPoint {
    BlockageModel model;
    Protocol proto;
};

template <class F>
void for_each_point(const RunConfig& cfg, F&& f) {
    for (const auto& spec : cfg.sweep.blockages) {
        const auto model = BlockageModel::parse(spec);
        for (auto name : cfg.sweep.protocols)
            for (int m : cfg.sweep.m_values) {
                auto proto = Protocol::make(name, m, cfg.sweep.n_user, cfg.sweep.m_cs_coarse);
                proto.validate();
                f(GridPoint{model, proto});
            }
    }
}

std::vector<std::string> key_cells(const char* engine, const GridPoint& p) {
    return {engine, std::string(to_string(p.proto.name)), p.model.label(), std::to_string(p.proto.m_bs),
            std::to_string(p.proto.n_user)};
}

const std::vector<std::string> kKeyHeader{"engine", "protocol", "blockage", "M", "N"};

}  // namespace

int cmd_analytic(const RunConfig& cfg, std::ostream& out) {
    cfg.sweep.validate();
    const auto sys = cfg.system_config();
    CsvWriter csv(out);
    echo_config(csv, "analytic", cfg);
    auto header = kKeyHeader;
    for (const char* h : {"p_cs_sector", "p_cs", "p_co", "eta_ia", "delay_ms", "upt_mbps", "sched_prob", "overhead",
                          "never_connects", "quad_flags"})
        header.emplace_back(h);
    csv.row(header);
    for_each_point(cfg, [&](const GridPoint& p) {
        const AnalyticContext ctx(sys, p.model, p.proto);
        const auto m = ctx.metrics();
        auto row = key_cells("analytic", p);
        for (double v : {m.p_cs_sector, m.p_cs, m.p_co, m.eta_ia, m.delay_s * 1e3, m.upt_bps / 1e6, m.sched_prob,
                         m.overhead})
            row.push_back(num(v));
        row.push_back(m.never_connects ? "1" : "0");
        row.push_back(std::to_string(m.quad_flags));
        csv.row(row);
    });
    return exit_code::ok;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.sweep.engine == Engine::Analytic) return cmd_analytic(cfg, out);
    cfg.sweep.validate();
    cfg.simulation.validate();
    const auto sys = cfg.system_config();
    const bool with_analytic = cfg.sweep.engine == Engine::Both;
    CsvWriter csv(out);
    echo_config(csv, "simulate", cfg);
    auto header = kKeyHeader;
    header.emplace_back("realizations");
    header.emplace_back("users");
    std::vector<std::string> metrics{"p_cs_sector", "p_cs", "p_co", "eta_ia", "delay_ms", "upt_mbps", "sched_prob"};
    for (double t : cfg.simulation.sinr_thresholds_db) {
        char b[48];
        std::snprintf(b, sizeof b, "sinr_ccdf_%gdB", t);
        metrics.emplace_back(b);
    }
    for (const auto& m : metrics)
        for (const char* suffix : {"", "_ci_low", "_ci_high"}) header.push_back(m + suffix);
    for (const char* h : {"sched_share", "upt_realized_mbps", "overhead", "never_connects"}) header.emplace_back(h);
    if (with_analytic)
        for (const auto& m : metrics) header.push_back("analytic_" + m);
    csv.row(header);

    for_each_point(cfg, [&](const GridPoint& p) {
        const auto res = run_campaign(sys, p.model, p.proto, cfg.simulation);
        const auto& r = res.report;
        auto row = key_cells(with_analytic ? "simulated+analytic" : "simulated", p);
        row.push_back(std::to_string(r.realizations));
        row.push_back(num(r.users));
        auto scaled = [](const Estimate& e, double s) { return Estimate{e.mean * s, e.ci_low * s, e.ci_high * s}; };
        std::vector<Estimate> est{r.p_cs_sector, r.p_cs, r.p_co, r.eta_ia, scaled(r.delay_s, 1e3),
                                  scaled(r.upt_bps, 1e-6), r.sched_prob};
        est.insert(est.end(), r.sinr_ccdf.begin(), r.sinr_ccdf.end());
        for (const auto& e : est)
            for (double v : {e.mean, e.ci_low, e.ci_high}) row.push_back(num(v));
        row.push_back(num(r.sched_share.mean));
        row.push_back(num(r.upt_realized_bps.mean / 1e6));
        row.push_back(num(r.overhead));
        row.push_back(r.never_connects ? "1" : "0");
        if (with_analytic) {
            const AnalyticContext ctx(sys, p.model, p.proto);
            const auto a = ctx.metrics();
            for (double v : {a.p_cs_sector, a.p_cs, a.p_co, a.eta_ia, a.delay_s * 1e3, a.upt_bps / 1e6, a.sched_prob})
                row.push_back(num(v));
            for (double t : cfg.simulation.sinr_thresholds_db) row.push_back(num(ctx.dl_sinr_ccdf(db_to_linear(t))));
        }
        csv.row(row);
    });
    return exit_code::ok;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, ValidationReport* report) {
    cfg.sweep.validate();
    cfg.simulation.validate();
    const auto sys = cfg.system_config();
    CsvWriter csv(out);
    echo_config(csv, "validate", cfg);
    csv.row({"metric", "protocol", "blockage", "M", "analytic", "mc_mean", "mc_ci_low", "mc_ci_high", "tolerance",
             "pass"});
    ValidationReport local;
    ValidationReport& rep = report ? *report : local;
    for_each_point(cfg, [&](const GridPoint& p) {
        const AnalyticContext ctx(sys, p.model, p.proto);
        const auto a = ctx.metrics();
        const auto mc = run_campaign(sys, p.model, p.proto, cfg.simulation).report;
        for (auto& r : compare(ctx, a, mc, cfg.tolerances)) {
            csv.row({r.metric, r.protocol, r.blockage, std::to_string(r.m), num(r.analytic), num(r.mc_mean),
                     num(r.ci_low), num(r.ci_high), num(r.tolerance), r.pass ? "1" : "0"});
            rep.rows.push_back(std::move(r));
        }
    });
    return rep.all_pass() ? exit_code::ok : exit_code::validation;
}

int cmd_esf(const RunConfig& cfg, std::ostream& out) {
    cfg.sweep.validate();
    cfg.simulation.validate();
    const auto sys = cfg.system_config();
    CsvWriter csv(out);
    echo_config(csv, "esf", cfg);
    csv.row({"engine", "protocol", "blockage", "M", "N", "r_m", "empirical", "ci_low", "ci_high", "fitted",
             "fitted_intensity_per_km2", "defined"});
    CampaignOptions opts;
    opts.esf_grid_m = cfg.sweep.esf_grid_m;
    for_each_point(cfg, [&](const GridPoint& p) {
        const auto res = run_campaign(sys, p.model, p.proto, cfg.simulation, opts);
        const auto& e = *res.esf;
        for (std::size_t k = 0; k < e.r_m.size(); ++k) {
            auto row = key_cells("simulated", p);
            for (double v : {e.r_m[k], e.empirical[k], e.ci_low[k], e.ci_high[k], e.fitted[k],
                             per_m2_to_per_km2(e.fitted_intensity)})
                row.push_back(num(v));
            row.push_back(e.defined ? "1" : "0");
            csv.row(row);
        }
    });
    return exit_code::ok;
}

}  // namespace mmwia
