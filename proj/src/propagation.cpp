#include "mmwia/propagation.hpp"

#include "mmwia/errors.hpp"

namespace mmwia {

double path_loss(double r, bool los, const SystemConfig& cfg) {
    if (!(r > 0.0)) throw DomainError("path_loss: distance must be > 0");
    return detail::path_loss_unchecked(r, los ? cfg.alpha_los : cfg.alpha_nlos, cfg.beta);
}

double inverse_path_loss(double z, bool los, const SystemConfig& cfg) {
    if (!(z >= cfg.beta)) throw DomainError("inverse_path_loss: z is below the 1 m reference loss");
    return detail::radius_for_path_loss(z, los ? cfg.alpha_los : cfg.alpha_nlos, cfg.beta);
}

}  // namespace mmwia
