#pragma once

#include "mmwia/system_config.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

/// Linear path loss beta * r^alpha. Throws DomainError for r <= 0.
double path_loss(double r, bool los, const SystemConfig& cfg);

/// Distance at which the path loss equals z. Throws DomainError for z < beta.
double inverse_path_loss(double z, bool los, const SystemConfig& cfg);

namespace detail {

inline double path_loss_unchecked(double r, double alpha, double beta) {
    return beta * fast_pow(r, alpha);
}

/// (z / beta)^(1/alpha) for any z >= 0; the path-loss law is applied to
/// every r > 0, including sub-metre links.
inline double radius_for_path_loss(double z, double alpha, double beta) {
    const double ratio = z / beta;
    if (alpha == 2.0) return std::sqrt(ratio);
    if (alpha == 4.0) return std::sqrt(std::sqrt(ratio));
    return std::pow(ratio, 1.0 / alpha);
}

}  // namespace detail
}  // namespace mmwia
