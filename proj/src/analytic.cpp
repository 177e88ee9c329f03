#include "mmwia/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

#include "mmwia/errors.hpp"
#include "mmwia/propagation.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Area-biasing factor of the tagged cell.
constexpr double kCellBias = 1.28;

/// int_0^r h(s) s ds in closed form.
double los_mass_closed(double r, const BlockageModel& model) {
    if (const auto* b = std::get_if<LosBall>(&model.variant())) {
        const double rr = std::min(r, b->radius_m);
        return 0.5 * b->prob * rr * rr;
    }
    const double mu = std::get<ExponentialBlockage>(model.variant()).mu_m;
    const double x = r / mu;
    if (x < 1e-3) return mu * mu * x * x * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
    return mu * mu * (-std::expm1(-x) - x * std::exp(-x));
}

double nlos_mass_closed(double r, const BlockageModel& model) {
    return std::max(0.0, 0.5 * r * r - los_mass_closed(r, model));
}

}  // namespace

double dl_sector_product(double tail, double miss, double v_main, double u_main, double v_side, double u_side,
                         int k_cs, int q) {
    const double main = v_main * tail + u_main * miss;
    const double side = v_side * tail + u_side * miss;
    double r = static_cast<double>(k_cs);
    if (q > 1) r *= std::pow(main, q - 1);
    if (k_cs > q) r *= std::pow(side, k_cs - q);
    return r;
}

AnalyticContext::AnalyticContext(const SystemConfig& cfg, const BlockageModel& model, const Protocol& proto,
                                 const AnalyticOptions& opts)
    : cfg_(cfg), model_(model), proto_(proto), opts_(opts) {
    cfg_.validate();
    proto_.validate();
    opts_.inner.validate();
    opts_.outer.validate();
    if (!(opts_.max_panel_width > 0.0)) throw ConfigError("max_panel_width must be positive", "max_panel_width");

    k_ = proto_.k_cs();
    q_ = proto_.q();
    n_data_ = proto_.n_data();
    lam_sector_ = cfg_.lambda_bs / k_;
    const BeamGain g_cs = user_gain_for_beams(proto_.n_cs, cfg_.c0);
    const BeamGain g_n = user_gain_for_beams(proto_.n_data(), cfg_.c0);
    cs_noise_ = cfg_.noise_mw / (cfg_.p_bs_mw * proto_.m_cs * g_cs.main);
    ra_noise_ = cfg_.noise_mw / (cfg_.p_user_mw * proto_.m_ra * g_n.main);
    dl_noise_ = cfg_.noise_mw / (cfg_.p_bs_mw * proto_.m_bs * g_n.main);
    side_ratio_ = g_n.side / g_n.main;

    degenerate_ = cfg_.lambda_bs == 0.0;
    if (degenerate_) return;
    build_grid();
}

double AnalyticContext::v_fn(double z, double t, double lam) const {
    if (t == 0.0 || lam == 0.0) return 1.0;
    const auto m = interference_mass(z, t, true, model_, cfg_, opts_.inner);
    if (!m.converged) flag(kQuadInnerUnconverged);
    return std::exp(-kTwoPi * lam * m.total());
}

double AnalyticContext::u_fn(double z, double t, double lam) const {
    if (t == 0.0 || lam == 0.0) return 1.0;
    const auto m = interference_mass(z, t, false, model_, cfg_, opts_.inner);
    if (!m.converged) flag(kQuadInnerUnconverged);
    return std::exp(-kTwoPi * lam * m.total());
}

double AnalyticContext::min_pl_ccdf(double z) const {
    if (degenerate_ || !(z > 0.0)) return 1.0;
    if (std::isinf(z)) return 0.0;
    const double rl = detail::radius_for_path_loss(z, cfg_.alpha_los, cfg_.beta);
    const double rn = detail::radius_for_path_loss(z, cfg_.alpha_nlos, cfg_.beta);
    return std::exp(-kTwoPi * lam_sector_ * (los_mass_closed(rl, model_) + nlos_mass_closed(rn, model_)));
}

double AnalyticContext::min_pl_pdf(double z) const {
    if (degenerate_ || !(z > 0.0) || std::isinf(z)) return 0.0;
    const double rl = detail::radius_for_path_loss(z, cfg_.alpha_los, cfg_.beta);
    const double rn = detail::radius_for_path_loss(z, cfg_.alpha_nlos, cfg_.beta);
    const double hl = model_.los_probability(rl);
    const double hn = model_.los_probability(rn);
    const double rate = hl * rl * rl / cfg_.alpha_los + (1.0 - hn) * rn * rn / cfg_.alpha_nlos;
    return min_pl_ccdf(z) * kTwoPi * lam_sector_ * rate / z;
}

double AnalyticContext::conditional_detection(double z) const {
    if (std::isinf(z)) return 0.0;
    if (!(z >= 0.0)) throw DomainError("conditional_detection: z must be >= 0");
    const double noise = std::exp(-cfg_.gamma_cs * z * cs_noise_);
    if (noise == 0.0) return 0.0;
    return noise * v_fn(z, cfg_.gamma_cs, lam_sector_);
}

double AnalyticContext::ptilde_f(double z) const {
    const double f = min_pl_pdf(z);
    return f == 0.0 ? 0.0 : f * conditional_detection(z);
}

// Grid construction --------------------------------------------------------

void AnalyticContext::build_grid() {
    const double x_beta = std::log(cfg_.beta);

    double x_lo = x_beta;
    for (int i = 0; i < 200 && -std::expm1(std::log(min_pl_ccdf(std::exp(x_lo)))) > 1e-16; ++i) x_lo -= 1.0;
    double x_hi = x_beta;
    for (int i = 0; i < 400; ++i) {
        const double z = std::exp(x_hi);
        if (min_pl_ccdf(z) < 1e-18 || cfg_.gamma_cs * z * cs_noise_ > 42.0) break;
        x_hi += 0.5;
    }
    z_lo_ = std::exp(x_lo);
    z_hi_ = std::exp(x_hi);

    std::vector<double> cuts{x_lo};
    for (double r : model_.breakpoints()) {
        for (double a : {cfg_.alpha_los, cfg_.alpha_nlos}) {
            const double x = std::log(detail::path_loss_unchecked(r, a, cfg_.beta));
            if (x > x_lo && x < x_hi) cuts.push_back(x);
        }
    }
    cuts.push_back(x_hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    edges_.clear();
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        double x = a;
        while (x < b) {
            edges_.push_back(x);
            const double w = x >= x_beta - 1.0 ? opts_.max_panel_width : 8.0 * opts_.max_panel_width;
            x = (b - x) < 1.5 * w ? b : x + w;
        }
    }
    edges_.push_back(x_hi);

    // Adaptive refinement: bisect panels whose f or P~f estimate is loose.
    struct PanelVals {
        double a, b;
        std::array<double, 15> f, pf;
        double err = 0.0;
    };
    const auto& t = gk15::nodes();
    auto tabulate = [&](double a, double b) {
        PanelVals p{a, b, {}, {}, 0.0};
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t j = 0; j < 15; ++j) {
            const double z = std::exp(c + h * t[j]);
            const double f = min_pl_pdf(z);
            p.f[j] = f * z;
            p.pf[j] = f == 0.0 ? 0.0 : p.f[j] * conditional_detection(z);
        }
        p.err = std::max(gk15::rule_from_values(p.f, h).error, gk15::rule_from_values(p.pf, h).error);
        return p;
    };
    std::vector<PanelVals> panels;
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i) panels.push_back(tabulate(edges_[i], edges_[i + 1]));

    const double panel_tol = 1e-3 * opts_.outer.rel_tol;
    for (int round = 0; round < 20; ++round) {
        std::vector<PanelVals> next;
        bool split = false;
        for (auto& p : panels) {
            if (p.err > panel_tol && next.size() < 20000) {
                const double m = 0.5 * (p.a + p.b);
                next.push_back(tabulate(p.a, m));
                next.push_back(tabulate(m, p.b));
                split = true;
            } else {
                next.push_back(std::move(p));
            }
        }
        panels = std::move(next);
        if (!split) break;
    }
    for (const auto& p : panels)
        if (p.err > panel_tol) flag(kQuadGridUnconverged);

    const std::size_t np = panels.size();
    edges_.resize(np + 1);
    for (std::size_t i = 0; i < np; ++i) edges_[i] = panels[i].a;
    edges_[np] = panels.back().b;

    node_x_.resize(np * 15);
    node_z_.resize(np * 15);
    node_wz_.resize(np * 15);
    f_.resize(np * 15);
    ptilde_.resize(np * 15);
    tail_.resize(np * 15);
    pra_.resize(np * 15);
    tail_at_edge_.assign(np + 1, 0.0);

    const auto& w = gk15::weights();
    const auto& smat = gk15::tail_matrix();
    for (std::size_t pi = np; pi-- > 0;) {
        const auto& p = panels[pi];
        const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
        double panel_int = 0.0;
        for (std::size_t j = 0; j < 15; ++j) panel_int += w[j] * p.pf[j];
        tail_at_edge_[pi] = tail_at_edge_[pi + 1] + h * panel_int;
        for (std::size_t k = 0; k < 15; ++k) {
            const std::size_t n = pi * 15 + k;
            node_x_[n] = c + h * t[k];
            node_z_[n] = std::exp(node_x_[n]);
            node_wz_[n] = h * w[k] * node_z_[n];
            f_[n] = p.f[k] / node_z_[n];
            ptilde_[n] = f_[n] > 0.0 ? p.pf[k] / p.f[k] : 0.0;
            double s = 0.0;
            for (std::size_t j = 0; j < 15; ++j) s += smat[k][j] * p.pf[j];
            tail_[n] = std::max(0.0, tail_at_edge_[pi + 1] + h * s);
        }
    }
    p_sector_ = std::min(1.0, tail_at_edge_[0]);
    p_cs_ = -std::expm1(k_ * std::log1p(-p_sector_));
    if (p_sector_ >= 1.0) p_cs_ = 1.0;

    const double contenders = cfg_.lambda_u * p_cs_;
    p_co_ = contenders == 0.0 ? 1.0 : std::exp(-kCellBias * contenders / (cfg_.lambda_bs * cfg_.n_pa * proto_.m_ra));

    const double miss = 1.0 - p_sector_;
    double eta = 0.0;
    for (std::size_t n = 0; n < node_z_.size(); ++n) {
        const double base = node_wz_[n] * ptilde_[n] * f_[n];
        if (base == 0.0) {
            pra_[n] = 0.0;
            continue;
        }
        pra_[n] = ra_decode_prob(node_z_[n]);
        eta += base * k_ * std::pow(tail_[n] + miss, k_ - 1) * p_co_ * pra_[n];
    }
    eta_ = std::clamp(eta, 0.0, p_cs_);
}

// Queries ------------------------------------------------------------------

double AnalyticContext::sector_detection_tail(double z0) const {
    if (degenerate_) return 0.0;
    if (std::isnan(z0) || z0 < 0.0) throw DomainError("sector_detection_tail: z0 must be >= 0");
    if (z0 <= z_lo_) return p_sector_;
    if (z0 >= z_hi_) return 0.0;
    const double x0 = std::log(z0);
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x0);
    const std::size_t pi = static_cast<std::size_t>(it - edges_.begin()) - 1;
    const double b = edges_[pi + 1];
    double head = 0.0;
    if (x0 < b) {
        QuadratureSpec spec = opts_.outer;
        spec.abs_tol = 1e-14;
        const auto r = integrate(
            [&](double x) {
                const double z = std::exp(x);
                return ptilde_f(z) * z;
            },
            x0, b, spec);
        if (!r.converged) flag(kQuadGridUnconverged);
        head = r.value;
    }
    return std::clamp(head + tail_at_edge_[pi + 1], 0.0, p_sector_);
}

double AnalyticContext::serving_pl_ccdf(double z0) const {
    if (degenerate_) return 1.0;
    if (std::isinf(z0)) return 1.0 - p_cs_;
    return std::pow(sector_detection_tail(z0) + 1.0 - p_sector_, k_);
}

double AnalyticContext::serving_pl_pdf(double z0) const {
    if (degenerate_ || std::isinf(z0) || !(z0 > 0.0)) return 0.0;
    const double pf = ptilde_f(z0);
    if (pf == 0.0) return 0.0;
    return k_ * std::pow(sector_detection_tail(z0) + 1.0 - p_sector_, k_ - 1) * pf;
}

double AnalyticContext::ra_decode_prob(double z0) const {
    if (degenerate_ || std::isinf(z0)) return 0.0;
    if (!(z0 >= 0.0)) throw DomainError("ra_decode_prob: z0 must be >= 0");
    const double g = cfg_.gamma_ra;
    const double noise = std::exp(-g * z0 * ra_noise_);
    if (noise == 0.0) return 0.0;
    const double base = cfg_.lambda_u * p_cs_ / (proto_.m_ra * cfg_.n_pa);
    const double aligned = u_fn(z0, g, base / n_data_);
    const double misaligned = u_fn(z0, side_ratio_ * g, (1.0 - 1.0 / n_data_) * base);
    return noise * aligned * misaligned;
}

double AnalyticContext::overhead() const {
    return cfg_.ia_duration_s(proto_.m_cs, proto_.n_cs, proto_.m_ra, proto_.n_ra) / cfg_.cycle_t_s;
}

double AnalyticContext::expected_delay() const {
    if (!(eta_ > 0.0)) return kInf;
    return (1.0 / eta_ - 1.0) * cfg_.cycle_t_s +
           cfg_.ia_duration_s(proto_.m_cs, proto_.n_cs, proto_.m_ra, proto_.n_ra);
}

double AnalyticContext::sched_prob() const {
    if (degenerate_) return 0.0;
    return 1.0 / (1.0 + kCellBias * cfg_.lambda_u * eta_ / cfg_.lambda_bs);
}

double AnalyticContext::dl_sinr_ccdf(double gamma) const {
    if (!(eta_ > 0.0)) return kNaN;
    if (std::isnan(gamma) || gamma < 0.0) throw DomainError("dl_sinr_ccdf: gamma must be >= 0");
    if (gamma == 0.0) return 1.0;
    const double lam_d = cfg_.lambda_bs / (static_cast<double>(proto_.m_bs) * k_);
    const double miss = 1.0 - p_sector_;
    const double prune = 1e-13 * eta_;
    const long nn = static_cast<long>(node_z_.size());
    std::vector<double> term(node_z_.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < nn; ++i) {
        const auto n = static_cast<std::size_t>(i);
        const double z = node_z_[n];
        const double base = node_wz_[n] * ptilde_[n] * f_[n] * pra_[n] * p_co_;
        if (base * k_ <= prune) continue;
        const double noise = std::exp(-gamma * z * dl_noise_);
        if (noise == 0.0) continue;
        const double a = v_fn(z, gamma, lam_d);
        if (a == 0.0) continue;
        const double b = q_ > 1 ? u_fn(z, gamma, lam_d) : 0.0;
        double c = 0.0, d = 0.0;
        if (k_ > q_) {
            c = v_fn(z, side_ratio_ * gamma, lam_d);
            d = u_fn(z, side_ratio_ * gamma, lam_d);
        }
        term[n] = base * noise * a * dl_sector_product(tail_[n], miss, a, b, c, d, k_, q_);
    }
    double s = 0.0;
    for (double v : term) s += v;
    return std::clamp(s / eta_, 0.0, 1.0);
}

double AnalyticContext::rate_integral() const {
    if (!(eta_ > 0.0)) return 0.0;
    // y = ln(1 + gamma) turns dgamma / (1 + gamma) into dy.
    auto p_of_y = [&](double y) { return dl_sinr_ccdf(std::expm1(y)); };
    double y_max = 1.0;
    while (p_of_y(y_max) >= opts_.rate_truncation) {
        y_max *= 2.0;
        if (y_max > 256.0) {
            flag(kQuadRateUnconverged);
            break;
        }
    }
    QuadratureSpec spec = opts_.outer;
    spec.abs_tol = std::max(spec.abs_tol, 1e-9);
    const auto r = integrate(p_of_y, 0.0, y_max, spec);
    if (!r.converged) flag(kQuadRateUnconverged);
    return r.value;
}

double AnalyticContext::average_upt() const {
    if (!(eta_ > 0.0)) return 0.0;
    const double duty = std::max(0.0, 1.0 - overhead());
    if (duty == 0.0) return 0.0;
    return duty * eta_ * sched_prob() * cfg_.bandwidth_hz / std::numbers::ln2 * rate_integral();
}

IAMetrics AnalyticContext::metrics() const {
    IAMetrics m;
    m.p_cs_sector = p_sector_;
    m.p_cs = p_cs_;
    m.p_co = p_co_;
    m.eta_ia = eta_;
    m.delay_s = expected_delay();
    m.overhead = overhead();
    m.sched_prob = sched_prob();
    m.upt_bps = average_upt();
    m.never_connects = !(eta_ > 0.0);
    m.quad_flags = quad_flags();
    return m;
}

}  // namespace mmwia
