#include "mmwia/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <numbers>
#include <tuple>

#include "mmwia/errors.hpp"
#include "mmwia/propagation.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SimulationConfig::validate() const {
    if (!(area_km > 0.0)) throw ConfigError("area must be positive", "area_km");
    if (n_bs_draws < 1) throw ConfigError("need at least one BS draw", "n_bs_draws");
    if (n_user_draws < 1) throw ConfigError("need at least one user draw", "n_user_draws");
    if (desk_bs_draws < 1) throw ConfigError("need at least one BS draw", "desk_bs_draws");
    if (desk_user_draws < 1) throw ConfigError("need at least one user draw", "desk_user_draws");
    if (!(interior_margin_km >= 0.0) || !(interior_margin_km < area_km / 2.0))
        throw ConfigError("margin must lie in [0, area/2)", "interior_margin_km");
    if (static_cast<long>(bs_draws()) * user_draws() > (1L << 31))
        throw ConfigError("too many realizations", "n_user_draws");
}

// Realization --------------------------------------------------------------

double NetworkRealization::distance(std::size_t u, std::size_t b) const {
    return std::hypot(users[u].x - bs[b].x, users[u].y - bs[b].y);
}

double NetworkRealization::path_loss(std::size_t u, std::size_t b, const SystemConfig& cfg) const {
    const double r = distance(u, b);
    return detail::path_loss_unchecked(r, los(u, b) ? cfg.alpha_los : cfg.alpha_nlos, cfg.beta);
}

double NetworkRealization::fading(Stream phase, std::size_t u, std::size_t b) const {
    return RandomStream(seed, phase, id.bs_draw, id.user_draw, static_cast<std::uint32_t>(u))
        .exponential(static_cast<std::uint32_t>(b));
}

bool NetworkRealization::user_inside(std::size_t u, double m) const {
    const auto& p = users[u];
    return p.x >= m && p.x <= side_m - m && p.y >= m && p.y <= side_m - m;
}

bool NetworkRealization::bs_inside(std::size_t b, double m) const {
    const auto& p = bs[b];
    return p.x >= m && p.x <= side_m - m && p.y >= m && p.y <= side_m - m;
}

NetworkRealization sample_realization(const SystemConfig& cfg, const BlockageModel& model,
                                      const SimulationConfig& sim, StreamId id) {
    NetworkRealization real;
    real.seed = sim.seed;
    real.id = id;
    real.side_m = sim.side_m();
    const double area = real.side_m * real.side_m;
    if (cfg.lambda_bs * area > 1e6 || cfg.lambda_u * area > 1e6)
        throw ConfigError("window holds too many points", "area_km");

    const auto n_bs = RandomStream(sim.seed, Stream::BsCount, id.bs_draw).poisson(cfg.lambda_bs * area);
    const RandomStream bs_pos(sim.seed, Stream::BsPosition, id.bs_draw);
    real.bs.resize(n_bs);
    for (std::uint32_t i = 0; i < n_bs; ++i)
        real.bs[i] = {bs_pos.uniform(2 * i) * real.side_m, bs_pos.uniform(2 * i + 1) * real.side_m};

    const auto n_u = RandomStream(sim.seed, Stream::UserCount, id.bs_draw, id.user_draw).poisson(cfg.lambda_u * area);
    const RandomStream u_pos(sim.seed, Stream::UserPosition, id.bs_draw, id.user_draw);
    real.users.resize(n_u);
    for (std::uint32_t i = 0; i < n_u; ++i)
        real.users[i] = {u_pos.uniform(2 * i) * real.side_m, u_pos.uniform(2 * i + 1) * real.side_m};

    real.los_flags.assign(real.users.size() * real.bs.size(), 0);
    const long nu = static_cast<long>(real.users.size());
    const std::size_t nb = real.bs.size();
#pragma omp parallel for schedule(static)
    for (long ui = 0; ui < nu; ++ui) {
        const auto u = static_cast<std::size_t>(ui);
        const RandomStream s(sim.seed, Stream::Los, id.bs_draw, id.user_draw, static_cast<std::uint32_t>(u));
        for (std::size_t b = 0; b < nb; ++b) {
            const double h = model.los_probability(real.distance(u, b));
            real.los_flags[u * nb + b] = s.uniform(static_cast<std::uint32_t>(b)) < h ? 1 : 0;
        }
    }
    return real;
}

int sector_index(const Point& from, const Point& to, int count) {
    if (count <= 1) return 0;
    double a = std::atan2(to.y - from.y, to.x - from.x);
    if (a < 0.0) a += kTwoPi;
    const int j = static_cast<int>(a * count / kTwoPi);
    return std::min(j, count - 1);
}

// Simulator ----------------------------------------------------------------

Simulator::Simulator(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto)
    : cfg_(cfg), model_(model), proto_(proto) {
    cfg_.validate();
    proto_.validate();
    if (proto_.k_cs() > 64) throw ConfigError("at most 64 BS sectors are supported", "m_antennas");
    const BeamGain g_cs = user_gain_for_beams(proto_.n_cs, cfg_.c0);
    user_n_ = user_gain_for_beams(proto_.n_data(), cfg_.c0);
    cs_noise_ = cfg_.noise_mw / (cfg_.p_bs_mw * proto_.m_cs * g_cs.main);
    ra_noise_ = cfg_.noise_mw / (cfg_.p_user_mw * proto_.m_ra * user_n_.main);
    dl_noise_ = cfg_.noise_mw / (cfg_.p_bs_mw * proto_.m_bs * user_n_.main);
}

std::vector<UserOutcome> Simulator::run_cycle(const NetworkRealization& real) const {
    auto out = run_cell_search(real);
    run_random_access(real, out);
    run_data_phase(real, out);
    return out;
}

std::vector<UserOutcome> Simulator::run_cell_search(const NetworkRealization& real) const {
    const int k = proto_.k_cs();
    const std::size_t nb = real.bs.size();
    std::vector<UserOutcome> out(real.users.size());
    const long nu = static_cast<long>(real.users.size());
#pragma omp parallel
    {
        std::vector<double> min_z(static_cast<std::size_t>(k)), p_min(static_cast<std::size_t>(k)),
            sum_p(static_cast<std::size_t>(k));
        std::vector<int> min_b(static_cast<std::size_t>(k));
#pragma omp for schedule(dynamic, 64)
        for (long ui = 0; ui < nu; ++ui) {
            const auto u = static_cast<std::size_t>(ui);
            std::fill(min_z.begin(), min_z.end(), kInf);
            std::fill(sum_p.begin(), sum_p.end(), 0.0);
            std::fill(min_b.begin(), min_b.end(), -1);
            const Point& pu = real.users[u];
            for (std::size_t b = 0; b < nb; ++b) {
                const auto j = static_cast<std::size_t>(sector_index(pu, real.bs[b], k));
                const double z = real.path_loss(u, b, cfg_);
                const double p = real.fading(Stream::FadingCs, u, b) / z;
                sum_p[j] += p;
                if (z < min_z[j]) {
                    min_z[j] = z;
                    min_b[j] = static_cast<int>(b);
                    p_min[j] = p;
                }
            }
            UserOutcome& o = out[u];
            for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
                if (min_b[j] < 0) continue;
                const double interference = std::max(0.0, sum_p[j] - p_min[j]);
                if (p_min[j] / (interference + cs_noise_) < cfg_.gamma_cs) continue;
                o.detected_sectors |= std::uint64_t{1} << j;
                if (min_z[j] < o.z0 || (min_z[j] == o.z0 && min_b[j] < o.serving)) {
                    o.z0 = min_z[j];
                    o.serving = min_b[j];
                }
            }
            o.cs_success = o.serving >= 0;
        }
    }
    return out;
}

namespace {

struct RaKey {
    int bs;
    std::uint32_t preamble;
    int sector;
    std::size_t user;
    auto tie() const { return std::make_tuple(bs, preamble, sector); }
};

}  // namespace

void Simulator::run_random_access(const NetworkRealization& real, std::vector<UserOutcome>& out) const {
    const RandomStream pre(real.seed, Stream::Preamble, real.id.bs_draw, real.id.user_draw);
    const int n_sect = proto_.n_data();
    std::vector<std::vector<std::size_t>> by_preamble(static_cast<std::size_t>(cfg_.n_pa));
    std::vector<RaKey> keys;
    for (std::size_t u = 0; u < out.size(); ++u) {
        auto& o = out[u];
        if (!o.cs_success) continue;
        o.preamble = pre.below(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(cfg_.n_pa));
        o.ra_sector = sector_index(real.bs[static_cast<std::size_t>(o.serving)], real.users[u], proto_.m_ra);
        by_preamble[o.preamble].push_back(u);
        keys.push_back({o.serving, o.preamble, o.ra_sector, u});
    }
    std::sort(keys.begin(), keys.end(), [](const RaKey& a, const RaKey& b) {
        return a.tie() != b.tie() ? a.tie() < b.tie() : a.user < b.user;
    });
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i + 1;
        while (j < keys.size() && keys[j].tie() == keys[i].tie()) ++j;
        if (j - i > 1)
            for (std::size_t t = i; t < j; ++t) out[keys[t].user].ra_collision = true;
        i = j;
    }

    const double side_ratio = user_n_.side / user_n_.main;
    const bool user_sweeps = proto_.n_ra > 1;
    const long nu = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long ui = 0; ui < nu; ++ui) {
        const auto u = static_cast<std::size_t>(ui);
        auto& o = out[u];
        if (!o.cs_success) continue;
        const auto s = static_cast<std::size_t>(o.serving);
        const Point& ps = real.bs[s];
        const int aligned = sector_index(real.users[u], ps, n_sect);
        double interference = 0.0;
        for (std::size_t v : by_preamble[o.preamble]) {
            if (v == u) continue;
            if (sector_index(ps, real.users[v], proto_.m_ra) != o.ra_sector) continue;
            const int toward_s = sector_index(real.users[v], ps, n_sect);
            const int beam = user_sweeps
                                 ? aligned
                                 : sector_index(real.users[v], real.bs[static_cast<std::size_t>(out[v].serving)], n_sect);
            const double gain = toward_s == beam ? 1.0 : side_ratio;
            interference += real.fading(Stream::FadingRa, v, s) * gain / real.path_loss(v, s, cfg_);
        }
        const double signal = real.fading(Stream::FadingRa, u, s) / o.z0;
        o.ra_decode = signal / (interference + ra_noise_) >= cfg_.gamma_ra;
    }
}

void Simulator::run_data_phase(const NetworkRealization& real, std::vector<UserOutcome>& out) const {
    const std::size_t nb = real.bs.size();
    std::vector<std::vector<std::size_t>> members(nb);
    for (std::size_t u = 0; u < out.size(); ++u)
        if (out[u].connected()) members[static_cast<std::size_t>(out[u].serving)].push_back(u);

    const RandomStream pick(real.seed, Stream::Schedule, real.id.bs_draw, real.id.user_draw);
    std::vector<std::size_t> active;
    std::vector<int> beam(nb, -1);
    for (std::size_t b = 0; b < nb; ++b) {
        if (members[b].empty()) continue;
        const auto n = static_cast<std::uint32_t>(members[b].size());
        const std::size_t w = members[b][pick.below(static_cast<std::uint32_t>(b), n)];
        out[w].scheduled = true;
        beam[b] = sector_index(real.bs[b], real.users[w], proto_.m_bs);
        active.push_back(b);
    }

    const int n_sect = proto_.n_data();
    const double side_ratio = user_n_.side / user_n_.main;
    const long nu = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long ui = 0; ui < nu; ++ui) {
        const auto u = static_cast<std::size_t>(ui);
        auto& o = out[u];
        if (!o.connected()) continue;
        const auto s = static_cast<std::size_t>(o.serving);
        o.sched_share = 1.0 / static_cast<double>(members[s].size());
        const Point& pu = real.users[u];
        const int look = sector_index(pu, real.bs[s], n_sect);
        double interference = 0.0;
        for (std::size_t b : active) {
            if (b == s) continue;
            if (sector_index(real.bs[b], pu, proto_.m_bs) != beam[b]) continue;
            const double gain = sector_index(pu, real.bs[b], n_sect) == look ? 1.0 : side_ratio;
            interference += real.fading(Stream::FadingDl, u, b) * gain / real.path_loss(u, b, cfg_);
        }
        const double signal = real.fading(Stream::FadingDl, u, s) / o.z0;
        o.dl_sinr = signal / (interference + dl_noise_);
    }
}

// Aggregation --------------------------------------------------------------

RealizationStats tally(const NetworkRealization& real, const std::vector<UserOutcome>& out,
                       const SystemConfig& cfg, const SimulationConfig& sim) {
    RealizationStats st;
    st.id = real.id;
    st.sinr_above.assign(sim.sinr_thresholds_db.size(), 0.0);
    std::vector<double> thr;
    for (double db : sim.sinr_thresholds_db) thr.push_back(db_to_linear(db));
    const double margin = sim.margin_m();
    // K from the detected-sector width is not recoverable here; callers add it.
    for (std::size_t u = 0; u < out.size(); ++u) {
        if (!real.user_inside(u, margin)) continue;
        const auto& o = out[u];
        st.users += 1;
        st.sectors_detected += std::popcount(o.detected_sectors);
        if (!o.cs_success) continue;
        st.cs_success += 1;
        if (!o.ra_collision) st.no_collision += 1;
        if (!o.connected()) {
            st.ra_fail += 1;
            continue;
        }
        st.ia_success += 1;
        const double rate = cfg.bandwidth_hz * std::log2(1.0 + o.dl_sinr);
        st.sched_sum += o.sched_share;
        st.load_sum += 1.0 / o.sched_share;
        st.rate_sum += rate;
        st.shared_rate_sum += o.sched_share * rate;
        for (std::size_t k = 0; k < thr.size(); ++k)
            if (o.dl_sinr >= thr[k]) st.sinr_above[k] += 1;
    }
    return st;
}

Estimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den) {
    Estimate e;
    const std::size_t n = std::min(num.size(), den.size());
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) sn += num[i], sd += den[i];
    if (!(sd > 0.0)) return e;
    const double r = sn / sd;
    e.mean = r;
    if (n < 2) {
        e.ci_low = e.ci_high = r;
        return e;
    }
    const double dbar = sd / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = num[i] - r * den[i];
        ss += d * d;
    }
    const double var = ss / (static_cast<double>(n) * static_cast<double>(n - 1) * dbar * dbar);
    const double half = 1.96 * std::sqrt(var);
    e.ci_low = r - half;
    e.ci_high = r + half;
    return e;
}

Estimate jackknife_estimate(const std::vector<std::vector<double>>& columns,
                            const std::function<double(const std::vector<double>&)>& f) {
    Estimate e;
    const std::size_t nc = columns.size();
    const std::size_t n = nc ? columns.front().size() : 0;
    std::vector<double> total(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c)
        for (double v : columns[c]) total[c] += v;
    e.mean = f(total);
    if (n < 2 || !std::isfinite(e.mean)) {
        e.ci_low = e.ci_high = e.mean;
        return e;
    }
    std::vector<double> loo(n), partial(nc);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < nc; ++c) partial[c] = total[c] - columns[c][i];
        loo[i] = f(partial);
    }
    const double mean_loo = std::accumulate(loo.begin(), loo.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
    const double half = 1.96 * std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    e.ci_low = e.mean - half;
    e.ci_high = e.mean + half;
    return e;
}

EsfSample esf_sample(const NetworkRealization& real, const std::vector<UserOutcome>& out,
                     const std::vector<double>& r_grid, double margin_m) {
    EsfSample s;
    s.within.assign(r_grid.size(), 0.0);
    std::vector<std::size_t> ok;
    for (std::size_t u = 0; u < out.size(); ++u)
        if (out[u].connected()) ok.push_back(u);
    for (std::size_t b = 0; b < real.bs.size(); ++b) {
        if (!real.bs_inside(b, margin_m)) continue;
        s.bs_count += 1;
        double best = kInf;
        for (std::size_t u : ok) best = std::min(best, real.distance(u, b));
        for (std::size_t k = 0; k < r_grid.size(); ++k)
            if (best <= r_grid[k]) s.within[k] += 1;
    }
    return s;
}

EsfResult compute_esf(const std::vector<EsfSample>& samples, const std::vector<double>& r_grid,
                      double fitted_intensity, std::uint64_t seed, int bootstrap) {
    EsfResult res;
    res.r_m = r_grid;
    res.fitted_intensity = fitted_intensity;
    const std::size_t nk = r_grid.size();
    auto pooled = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> f(nk, 0.0);
        double total = 0.0;
        for (std::size_t i : idx) {
            total += samples[i].bs_count;
            for (std::size_t k = 0; k < nk; ++k) f[k] += samples[i].within[k];
        }
        for (auto& v : f) v = total > 0.0 ? v / total : 0.0;
        return f;
    };
    std::vector<std::size_t> all(samples.size());
    std::iota(all.begin(), all.end(), 0);
    res.empirical = pooled(all);
    res.defined = fitted_intensity > 0.0;
    res.ci_low = res.empirical;
    res.ci_high = res.empirical;
    if (samples.size() > 1 && bootstrap > 0) {
        std::vector<std::vector<double>> reps(nk);
        std::vector<std::size_t> idx(samples.size());
        for (int b = 0; b < bootstrap; ++b) {
            const RandomStream rs(seed, Stream::Bootstrap, static_cast<std::uint32_t>(b));
            for (std::size_t i = 0; i < idx.size(); ++i)
                idx[i] = rs.below(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(samples.size()));
            const auto f = pooled(idx);
            for (std::size_t k = 0; k < nk; ++k) reps[k].push_back(f[k]);
        }
        for (std::size_t k = 0; k < nk; ++k) {
            auto& v = reps[k];
            std::sort(v.begin(), v.end());
            const auto at = [&](double q) { return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))]; };
            res.ci_low[k] = at(0.025);
            res.ci_high[k] = at(0.975);
        }
    }
    res.fitted.resize(nk);
    for (std::size_t k = 0; k < nk; ++k)
        res.fitted[k] = -std::expm1(-fitted_intensity * std::numbers::pi * r_grid[k] * r_grid[k]);
    return res;
}

CampaignResult run_campaign(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto,
                            const SimulationConfig& sim, const CampaignOptions& opts) {
    sim.validate();
    const Simulator simulator(cfg, model, proto);
    CampaignResult res;
    std::vector<EsfSample> esf;
    const int k = proto.k_cs();
    for (int b = 0; b < sim.bs_draws(); ++b) {
        for (int u = 0; u < sim.user_draws(); ++u) {
            const StreamId id{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(u)};
            const auto real = sample_realization(cfg, model, sim, id);
            const auto out = simulator.run_cycle(real);
            auto st = tally(real, out, cfg, sim);
            st.sectors_total = st.users * k;
            res.per_realization.push_back(std::move(st));
            if (!opts.esf_grid_m.empty()) esf.push_back(esf_sample(real, out, opts.esf_grid_m, sim.margin_m()));
        }
    }

    auto column = [&](auto member) {
        std::vector<double> v;
        for (const auto& s : res.per_realization) v.push_back(s.*member);
        return v;
    };
    const auto users = column(&RealizationStats::users);
    const auto cs = column(&RealizationStats::cs_success);
    const auto ia = column(&RealizationStats::ia_success);

    MetricsReport& rep = res.report;
    rep.protocol = std::string(to_string(proto.name));
    rep.blockage = model.label();
    rep.m = proto.m_bs;
    rep.n = proto.n_user;
    rep.realizations = static_cast<int>(res.per_realization.size());
    rep.users = std::accumulate(users.begin(), users.end(), 0.0);
    rep.p_cs = ratio_estimate(cs, users);
    rep.p_cs_sector = ratio_estimate(column(&RealizationStats::sectors_detected), column(&RealizationStats::sectors_total));
    rep.p_co = ratio_estimate(column(&RealizationStats::no_collision), cs);
    rep.eta_ia = ratio_estimate(ia, users);
    const auto load = column(&RealizationStats::load_sum);
    rep.sched_prob = ratio_estimate(ia, load);
    rep.sched_share = ratio_estimate(column(&RealizationStats::sched_sum), ia);
    rep.overhead = std::min(1.0, cfg.ia_duration_s(proto.m_cs, proto.n_cs, proto.m_ra, proto.n_ra) / cfg.cycle_t_s);
    const double duty = 1.0 - rep.overhead;
    // eta * (ia / load) * (rate / ia)
    rep.upt_bps = jackknife_estimate({users, ia, load, column(&RealizationStats::rate_sum)},
                                     [duty](const std::vector<double>& t) {
                                         if (!(t[0] > 0.0) || !(t[2] > 0.0)) return 0.0;
                                         return duty * t[1] * t[3] / (t[0] * t[2]);
                                     });
    const auto shared = ratio_estimate(column(&RealizationStats::shared_rate_sum), users);
    rep.upt_realized_bps = {shared.mean * duty, shared.ci_low * duty, shared.ci_high * duty};

    const double dur = cfg.ia_duration_s(proto.m_cs, proto.n_cs, proto.m_ra, proto.n_ra);
    auto delay = [&](double eta) { return eta > 0.0 ? (1.0 / eta - 1.0) * cfg.cycle_t_s + dur : kInf; };
    rep.never_connects = !(rep.eta_ia.mean > 0.0);
    rep.delay_s = {delay(rep.eta_ia.mean), delay(std::min(1.0, rep.eta_ia.ci_high)), delay(rep.eta_ia.ci_low)};

    rep.sinr_thresholds_db = sim.sinr_thresholds_db;
    for (std::size_t t = 0; t < sim.sinr_thresholds_db.size(); ++t) {
        std::vector<double> above;
        for (const auto& s : res.per_realization) above.push_back(s.sinr_above[t]);
        rep.sinr_ccdf.push_back(ratio_estimate(above, ia));
    }

    if (!opts.esf_grid_m.empty()) {
        const double intensity = rep.never_connects ? 0.0 : cfg.lambda_u * rep.eta_ia.mean;
        res.esf = compute_esf(esf, opts.esf_grid_m, intensity, sim.seed);
    }
    return res;
}

}  // namespace mmwia
