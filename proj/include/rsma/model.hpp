#pragma once

#include "rsma/types.hpp"

namespace rsma {

/// SINR of the common stream at user k: |h_k^H p_c|^2 over the private
/// interference power plus noise.
double sinr_common(const ChannelSet& ch, const BeamformingState& bf,
                   const SystemConfig& cfg, int k);

/// SINR of the private stream at user k: |h_k^H p_k|^2 over the other users'
/// private interference plus noise.
double sinr_private(const ChannelSet& ch, const BeamformingState& bf,
                    const SystemConfig& cfg, int k);

/// Per-user common/private rates (natural log), the decodable common rate
/// R_c = min_k R_{c,k}, and the clipped MMF rate. When 1^T c exceeds R_c the
/// allocation is clipped to nonnegative entries and rescaled by R_c / 1^T c
/// so the metric is well defined at infeasible iterates.
RateVector rates(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg);

/// Total transmit power tr(P^H P) over the K+1 beams.
double tx_power(const BeamformingState& bf);

/// Scales all beams so that tr(P^H P) = P_t exactly; c and t are unchanged.
/// Throws std::domain_error for an all-zero beam matrix.
BeamformingState normalize_power(const BeamformingState& bf, double power_budget);

}  // namespace rsma
