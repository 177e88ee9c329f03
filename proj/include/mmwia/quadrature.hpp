#pragma once

// Adaptive Gauss-Kronrod (7/15) integration over finite and semi-infinite
// intervals. Global error control: the panel with the largest error estimate
// is bisected until the total estimate meets max(rel_tol*|I|, abs_tol).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "mmwia/errors.hpp"

namespace mmwia {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 256;
    /// Length scale s of the [a, inf) substitution x = a + s*u/(1-u).
    double tail_scale = 1.0;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace gk15 {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// The 15 Kronrod abscissae on [-1, 1] in ascending order.
const std::array<double, 15>& nodes();
/// Kronrod weights matching `nodes()`.
const std::array<double, 15>& weights();

/// w_j such that sum_j w_j f(t_j) integrates the degree-14 interpolant of f
/// through the Kronrod nodes over [t, 1].
std::array<double, 15> tail_weights(double t);

/// Row k holds tail_weights(nodes()[k]).
const std::array<std::array<double, 15>, 15>& tail_matrix();

struct RuleResult {
    double kronrod = 0.0;
    double gauss = 0.0;
    double error = 0.0;
};

/// 7/15 estimate from integrand values at `nodes()` mapped onto an interval
/// of half-width h, with the QUADPACK error heuristic.
inline RuleResult rule_from_values(const std::array<double, 15>& v, double h) {
    const auto& w = weights();
    double resk = 0.0, resabs = 0.0;
    for (std::size_t j = 0; j < 15; ++j) {
        resk += w[j] * v[j];
        resabs += w[j] * std::abs(v[j]);
    }
    double resg = kWg[3] * v[7];
    for (std::size_t j = 0; j < 3; ++j) resg += kWg[j] * (v[2 * j + 1] + v[13 - 2 * j]);
    const double reskh = 0.5 * resk;
    double resasc = 0.0;
    for (std::size_t j = 0; j < 15; ++j) resasc += w[j] * std::abs(v[j] - reskh);
    RuleResult r;
    const double ah = std::abs(h);
    r.kronrod = resk * h;
    r.gauss = resg * h;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    r.error = err;
    return r;
}

/// One application of the 7/15 rule to f on [a, b].
template <class F>
RuleResult apply(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const auto& t = nodes();
    std::array<double, 15> v{};
    for (std::size_t j = 0; j < 15; ++j) v[j] = f(c + h * t[j]);
    return rule_from_values(v, h);
}

}  // namespace gk15

namespace detail {

struct Piece {
    double a = 0.0;
    double b = 0.0;  ///< ignored when infinite
    bool infinite = false;
};

struct Panel {
    double lo, hi;  ///< in the piece's own coordinate (u in [0,1) when infinite)
    int piece;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

/// Integrates f over consecutive pieces [points[0], points[1]], ...,
/// [points[n-2], points[n-1]]; points must be strictly increasing and the last
/// may be +inf. Breakpoints should sit on integrand discontinuities.
template <class F>
QuadResult integrate_pieces(F&& f, std::span<const double> points, const QuadratureSpec& spec = {}) {
    if (points.size() < 2) throw DomainError("integrate: need at least two points");
    std::vector<detail::Piece> pieces;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i], b = points[i + 1];
        if (!(a < b) || !std::isfinite(a)) throw DomainError("integrate: points must increase");
        pieces.push_back({a, b, std::isinf(b)});
    }
    const double s = spec.tail_scale;
    int evals = 0;
    auto eval = [&](int pi, double t) {
        const auto& p = pieces[static_cast<std::size_t>(pi)];
        if (!p.infinite) return f(t);
        const double one_minus = 1.0 - t;
        const double x = p.a + s * t / one_minus;
        return f(x) * s / (one_minus * one_minus);
    };
    std::vector<detail::Panel> heap;
    heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + pieces.size() + 2);
    double total = 0.0, total_err = 0.0;
    auto push = [&](int pi, double lo, double hi) {
        const auto r = gk15::apply([&](double t) { return eval(pi, t); }, lo, hi);
        evals += 15;
        heap.push_back({lo, hi, pi, r.kronrod, r.error});
        std::push_heap(heap.begin(), heap.end());
        total += r.kronrod;
        total_err += r.error;
    };
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
        const auto& p = pieces[static_cast<std::size_t>(i)];
        if (p.infinite) push(i, 0.0, 1.0);
        else push(i, p.a, p.b);
    }
    bool converged = true;
    int subdivisions = 0;
    while (total_err > std::max(spec.rel_tol * std::abs(total), spec.abs_tol)) {
        if (subdivisions >= spec.max_subdivisions) {
            converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end());
        const detail::Panel worst = heap.back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            converged = false;  // panel cannot be split further in floating point
            break;
        }
        heap.pop_back();
        total -= worst.value;
        total_err -= worst.error;
        push(worst.piece, worst.lo, mid);
        push(worst.piece, mid, worst.hi);
        ++subdivisions;
        if (subdivisions % 32 == 0) {
            // drop accumulated rounding from the running sums
            total = 0.0;
            total_err = 0.0;
            for (const auto& p : heap) total += p.value, total_err += p.error;
        }
    }
    // Sum in a fixed order so identical inputs give bit-identical results.
    std::sort(heap.begin(), heap.end(), [](const detail::Panel& x, const detail::Panel& y) {
        return x.piece != y.piece ? x.piece < y.piece : x.lo < y.lo;
    });
    QuadResult res;
    for (const auto& p : heap) res.value += p.value, res.error += p.error;
    res.evaluations = evals;
    res.converged = converged && res.error <= std::max(spec.rel_tol * std::abs(res.value), spec.abs_tol);
    return res;
}

/// Integrates f over [a, b]; b may be +inf.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    if (!(a < b)) throw DomainError("integrate: requires a < b");
    const std::array<double, 2> pts{a, b};
    return integrate_pieces(std::forward<F>(f), pts, spec);
}

/// Like `integrate`, but throws ConvergenceError (carrying the best estimate)
/// when the tolerance is not met.
template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    const auto r = integrate(std::forward<F>(f), a, b, spec);
    if (!r.converged) throw ConvergenceError("quadrature did not converge", r.value, r.error);
    return r.value;
}

}  // namespace mmwia
