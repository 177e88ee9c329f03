#include "mmwia/quadrature.hpp"

namespace mmwia {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("quadrature tolerances must be > 0", "rel_tol");
    if (max_subdivisions < 8) throw ConfigError("max_subdivisions must be >= 8", "max_subdivisions");
    if (!(tail_scale > 0.0)) throw ConfigError("tail_scale must be > 0", "tail_scale");
}

namespace gk15 {

const std::array<double, 15>& nodes() {
    static const std::array<double, 15> t = [] {
        std::array<double, 15> n{};
        for (int j = 0; j < 7; ++j) {
            n[static_cast<std::size_t>(j)] = -kXgk[static_cast<std::size_t>(j)];
            n[static_cast<std::size_t>(14 - j)] = kXgk[static_cast<std::size_t>(j)];
        }
        n[7] = 0.0;
        return n;
    }();
    return t;
}

const std::array<double, 15>& weights() {
    static const std::array<double, 15> w = [] {
        std::array<double, 15> v{};
        for (int j = 0; j < 7; ++j) {
            v[static_cast<std::size_t>(j)] = kWgk[static_cast<std::size_t>(j)];
            v[static_cast<std::size_t>(14 - j)] = kWgk[static_cast<std::size_t>(j)];
        }
        v[7] = kWgk[7];
        return v;
    }();
    return w;
}

std::array<double, 15> tail_weights(double t) {
    // 8-point Gauss-Legendre is exact for the degree-14 Lagrange basis.
    static constexpr std::array<double, 8> gx = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
        0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> gw = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
        0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    const auto& x = nodes();
    std::array<double, 15> w{};
    const double c = 0.5 * (1.0 + t), h = 0.5 * (1.0 - t);
    for (std::size_t g = 0; g < gx.size(); ++g) {
        const double s = c + h * gx[g];
        for (std::size_t j = 0; j < 15; ++j) {
            double l = 1.0;
            for (std::size_t m = 0; m < 15; ++m)
                if (m != j) l *= (s - x[m]) / (x[j] - x[m]);
            w[j] += h * gw[g] * l;
        }
    }
    return w;
}

const std::array<std::array<double, 15>, 15>& tail_matrix() {
    static const auto m = [] {
        std::array<std::array<double, 15>, 15> out{};
        for (std::size_t k = 0; k < 15; ++k) out[k] = tail_weights(nodes()[k]);
        return out;
    }();
    return m;
}

}  // namespace gk15
}  // namespace mmwia
