#pragma once

#include "mmwia/system_config.hpp"

namespace mmwia {

/// Sectorized beam pattern: constant gain inside the main lobe, constant
/// gain outside it.
struct BeamGain {
    double main = 1.0;
    double side = 0.0;
    double beamwidth = 0.0;  ///< rad
};

/// User pattern with front-back ratio gamma = 2pi / (c0 (2pi - theta)).
/// Requires 0 < theta < 2pi.
BeamGain user_beam_gain(double beamwidth, double c0);
inline BeamGain user_beam_gain(double beamwidth, const SystemConfig& cfg) {
    return user_beam_gain(beamwidth, cfg.c0);
}

/// BS pattern with zero side lobe. Requires 0 < theta <= 2pi.
BeamGain bs_beam_gain(double beamwidth);

/// Gain of a user sweeping `beams` equal directions; a single beam is
/// omnidirectional with unit gain everywhere.
BeamGain user_gain_for_beams(int beams, double c0);

}  // namespace mmwia
