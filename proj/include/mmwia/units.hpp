#pragma once

#include <cmath>
#include <numbers>

namespace mmwia {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

/// Densities are configured per km^2 and used per m^2.
inline constexpr double per_km2_to_per_m2(double d) { return d * 1e-6; }
inline constexpr double per_m2_to_per_km2(double d) { return d * 1e6; }

inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// x^a with fast paths for the integer exponents used by the path-loss model.
inline double fast_pow(double x, double a) {
    if (a == 2.0) return x * x;
    if (a == 4.0) {
        const double x2 = x * x;
        return x2 * x2;
    }
    if (a == 3.0) return x * x * x;
    return std::pow(x, a);
}

}  // namespace mmwia
