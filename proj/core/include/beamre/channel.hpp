#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "beamre/model.hpp"

namespace beamre {

/// Synthetic coupling-matrix generator. Each UT gets a contiguous window of
/// ceil(support_fraction * M) beams at a seeded random offset, filled with an
/// exponential profile exp(-decay * |m - center|) times multiplicative jitter
/// uniform in [1-jitter, 1+jitter], then rescaled so the mean entry equals
/// the linear pathloss 10^(pathloss_db/10). Deterministic given seed.
ChannelStats synth_coupling(const SystemParams& params, double pathloss_db,
                            double support_fraction, double decay,
                            std::uint64_t seed, double jitter = 0.5);

// Plain-text coupling file: first line "K M", then per UT a line "N_k"
// followed by N_k rows of M space-separated nonnegative reals.
void save_omega(std::ostream& os, const ChannelStats& stats);
void save_omega_file(const std::string& path, const ChannelStats& stats);
ChannelStats load_omega(std::istream& is);
ChannelStats load_omega_file(const std::string& path);

}  // namespace beamre
