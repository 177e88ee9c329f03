#include "mmwia/antenna.hpp"

#include <cmath>

#include "mmwia/errors.hpp"
#include "mmwia/units.hpp"

namespace mmwia {

BeamGain user_beam_gain(double theta, double c0) {
    if (!(theta > 0.0 && theta < kTwoPi))
        throw DomainError("user beamwidth must lie in (0, 2pi)");
    const double back = kTwoPi - theta;
    const double gamma = kTwoPi / (c0 * back);
    return BeamGain{
        .main = (kTwoPi / theta) * gamma / (gamma + 1.0),
        .side = (kTwoPi / back) / (gamma + 1.0),
        .beamwidth = theta,
    };
}

BeamGain bs_beam_gain(double theta) {
    if (!(theta > 0.0 && theta <= kTwoPi)) throw DomainError("BS beamwidth must lie in (0, 2pi]");
    return BeamGain{.main = kTwoPi / theta, .side = 0.0, .beamwidth = theta};
}

BeamGain user_gain_for_beams(int beams, double c0) {
    if (beams < 1) throw DomainError("beam count must be >= 1");
    if (beams == 1) return BeamGain{.main = 1.0, .side = 1.0, .beamwidth = kTwoPi};
    return user_beam_gain(kTwoPi / beams, c0);
}

}  // namespace mmwia
