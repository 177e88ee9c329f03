#pragma once

#include "mmwia/blockage.hpp"
#include "mmwia/quadrature.hpp"
#include "mmwia/system_config.hpp"

namespace mmwia {

/// Default accuracy for the inner (radial) integrals behind V and U.
inline QuadratureSpec inner_quadrature() {
    return QuadratureSpec{.rel_tol = 1e-9, .abs_tol = 1e-15, .max_subdivisions = 200};
}

/// Mean LOS and NLOS interferer "mass" seen at threshold t by a receiver whose
/// useful link has path loss z:
///   los  = int_{r_L}^inf t z h(r) r / (t z + l_L(r)) dr
///   nlos = int_{r_N}^inf t z (1 - h(r)) r / (t z + l_N(r)) dr
/// where r_L, r_N are the LOS/NLOS distances with path loss z when
/// `exclude_closer` is set, and 0 otherwise.
struct InterferenceMass {
    double los = 0.0;
    double nlos = 0.0;
    bool converged = true;
    double total() const { return los + nlos; }
};

/// The LOS ball with exponents (2 or 4, 4) is evaluated in closed form; every
/// other case goes through `interference_mass_numeric`.
InterferenceMass interference_mass(double z, double t, bool exclude_closer, const BlockageModel& model,
                                   const SystemConfig& cfg, const QuadratureSpec& spec = inner_quadrature());

/// Same quantity by adaptive quadrature, split at the blockage breakpoints.
InterferenceMass interference_mass_numeric(double z, double t, bool exclude_closer, const BlockageModel& model,
                                           const SystemConfig& cfg,
                                           const QuadratureSpec& spec = inner_quadrature());

/// V(z, t, lam): Laplace functional of the interference from a PPP of
/// intensity lam restricted to path losses beyond z.
double special_v(double z, double t, double lam, const BlockageModel& model, const SystemConfig& cfg,
                 const QuadratureSpec& spec = inner_quadrature());

/// U(z, t, lam): as V, but with interferers allowed at any distance.
double special_u(double z, double t, double lam, const BlockageModel& model, const SystemConfig& cfg,
                 const QuadratureSpec& spec = inner_quadrature());

/// int_0^r h(s) s ds
double los_mass(double r, const BlockageModel& model, const QuadratureSpec& spec = inner_quadrature());
/// int_0^r (1 - h(s)) s ds
double nlos_mass(double r, const BlockageModel& model, const QuadratureSpec& spec = inner_quadrature());

}  // namespace mmwia
