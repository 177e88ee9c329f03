#include "mmwia/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mmwia/propagation.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Integration points for [lo, hi) with the model's discontinuities inserted.
std::vector<double> split_points(double lo, double hi, const BlockageModel& model) {
    std::vector<double> pts{lo};
    for (double b : model.breakpoints())
        if (b > lo && b < hi) pts.push_back(b);
    pts.push_back(hi);
    return pts;
}

template <class Weight>
QuadResult radial_integral(double lo, double hi, double tz, double alpha, double beta, Weight&& weight,
                           const BlockageModel& model, QuadratureSpec spec) {
    const double r_char = detail::radius_for_path_loss(tz, alpha, beta);
    spec.tail_scale = std::max({r_char, lo, 1e-3});
    const auto pts = split_points(lo, hi, model);
    return integrate_pieces(
        [&](double r) {
            const double w = weight(r);
            if (w == 0.0) return 0.0;
            return tz * w * r / (tz + detail::path_loss_unchecked(r, alpha, beta));
        },
        pts, spec);
}

bool has_closed_form(double alpha) { return alpha == 2.0 || alpha == 4.0; }

/// int_a^b s r / (s + beta r^alpha) dr for alpha in {2, 4}; b may be +inf
/// when alpha = 4.
double power_kernel_integral(double a, double b, double s, double alpha, double beta) {
    if (!(b > a)) return 0.0;
    if (alpha == 2.0) {
        const double lo = s + beta * a * a;
        return s / (2.0 * beta) * std::log1p(beta * (b * b - a * a) / lo);
    }
    // u = r^2 turns the integrand into s / (2 (s + beta u^2)).
    const double c = std::sqrt(beta / s);
    const double x = a * a * c;
    double ang;
    if (std::isinf(b)) {
        ang = x > 0.0 ? std::atan(1.0 / x) : std::numbers::pi / 2.0;
    } else {
        const double y = b * b * c;
        ang = std::atan((y - x) / (1.0 + x * y));
    }
    return 0.5 * std::sqrt(s / beta) * ang;
}

/// Interference mass for the LOS ball with exponents 2 and 4, in closed form.
InterferenceMass los_ball_mass(const LosBall& ball, double r_los, double r_nlos, double tz, const SystemConfig& cfg) {
    InterferenceMass m;
    const double rc = ball.radius_m;
    if (ball.prob > 0.0 && r_los < rc)
        m.los = ball.prob * power_kernel_integral(r_los, rc, tz, cfg.alpha_los, cfg.beta);
    if (ball.prob < 1.0 && r_nlos < rc)
        m.nlos = (1.0 - ball.prob) * power_kernel_integral(r_nlos, rc, tz, cfg.alpha_nlos, cfg.beta);
    m.nlos += power_kernel_integral(std::max(r_nlos, rc), kInf, tz, cfg.alpha_nlos, cfg.beta);
    return m;
}

}  // namespace

InterferenceMass interference_mass(double z, double t, bool exclude_closer, const BlockageModel& model,
                                   const SystemConfig& cfg, const QuadratureSpec& spec) {
    InterferenceMass m;
    const double tz = t * z;
    if (tz == 0.0) return m;
    const double r_los = exclude_closer ? detail::radius_for_path_loss(z, cfg.alpha_los, cfg.beta) : 0.0;
    const double r_nlos = exclude_closer ? detail::radius_for_path_loss(z, cfg.alpha_nlos, cfg.beta) : 0.0;
    if (const auto* ball = std::get_if<LosBall>(&model.variant());
        ball && has_closed_form(cfg.alpha_los) && cfg.alpha_nlos == 4.0)
        return los_ball_mass(*ball, r_los, r_nlos, tz, cfg);
    return interference_mass_numeric(z, t, exclude_closer, model, cfg, spec);
}

InterferenceMass interference_mass_numeric(double z, double t, bool exclude_closer, const BlockageModel& model,
                                           const SystemConfig& cfg, const QuadratureSpec& spec) {
    InterferenceMass m;
    const double tz = t * z;
    if (tz == 0.0) return m;
    const double r_los = exclude_closer ? detail::radius_for_path_loss(z, cfg.alpha_los, cfg.beta) : 0.0;
    const double r_nlos = exclude_closer ? detail::radius_for_path_loss(z, cfg.alpha_nlos, cfg.beta) : 0.0;

    const double los_hi = model.los_support();
    if (r_los < los_hi) {
        const auto r = radial_integral(
            r_los, los_hi, tz, cfg.alpha_los, cfg.beta, [&](double x) { return model.los_probability(x); },
            model, spec);
        m.los = r.value;
        m.converged = m.converged && r.converged;
    }
    const auto r = radial_integral(
        r_nlos, kInf, tz, cfg.alpha_nlos, cfg.beta, [&](double x) { return 1.0 - model.los_probability(x); },
        model, spec);
    m.nlos = r.value;
    m.converged = m.converged && r.converged;
    return m;
}

double special_v(double z, double t, double lam, const BlockageModel& model, const SystemConfig& cfg,
                 const QuadratureSpec& spec) {
    if (t == 0.0 || lam == 0.0) return 1.0;
    return std::exp(-kTwoPi * lam * interference_mass(z, t, true, model, cfg, spec).total());
}

double special_u(double z, double t, double lam, const BlockageModel& model, const SystemConfig& cfg,
                 const QuadratureSpec& spec) {
    if (t == 0.0 || lam == 0.0) return 1.0;
    return std::exp(-kTwoPi * lam * interference_mass(z, t, false, model, cfg, spec).total());
}

double los_mass(double r, const BlockageModel& model, const QuadratureSpec& spec) {
    const double hi = std::min(r, model.los_support());
    if (!(hi > 0.0)) return 0.0;
    const auto pts = split_points(0.0, hi, model);
    return integrate_pieces([&](double s) { return model.los_probability(s) * s; }, pts, spec).value;
}

double nlos_mass(double r, const BlockageModel& model, const QuadratureSpec& spec) {
    if (!(r > 0.0)) return 0.0;
    const auto pts = split_points(0.0, r, model);
    return integrate_pieces([&](double s) { return (1.0 - model.los_probability(s)) * s; }, pts, spec).value;
}

}  // namespace mmwia
