#pragma once

#include <cstdint>
#include <string>

#include "rsma/types.hpp"

namespace rsma {

/// Draws each channel entry i.i.d. circularly-symmetric complex Gaussian with
/// zero mean and unit variance (real and imaginary parts each of variance
/// 1/2). Deterministic for a given seed.
ChannelSet gen_channel(const SystemConfig& cfg, std::uint64_t seed);

/// Text fixture format: one header line "K N_t", then K lines of 2*N_t
/// whitespace-separated doubles (re, im interleaved). Round-trips exactly.
void save_channels(const ChannelSet& ch, const std::string& path);
ChannelSet load_channels(const std::string& path);

}  // namespace rsma
