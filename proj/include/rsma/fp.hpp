#pragma once

#include "rsma/types.hpp"

namespace rsma {

// Two-stage fractional-programming surrogates. The first stage bounds each
// rate by f(theta) with closed-form maximizer theta = SINR; the second stage
// bounds f by the quadratic transform g(theta, phi) with closed-form
// maximizer phi. At both optima the bounds are tight, so one pass of
// update_theta + update_phi makes g equal to the true rates.

/// theta_c[k] = gamma_{c,k}, theta_p[k] = gamma_{p,k}. The phi fields of the
/// result are left empty.
FpAuxiliaries update_theta(const ChannelSet& ch, const BeamformingState& bf,
                           const SystemConfig& cfg);

/// Fills the phi fields for the given theta:
///   phi_c[k] = sqrt(1+theta_c) h_k^H p_c / (|h_k^H p_c|^2 + sum_j |h_k^H p_j|^2 + sigma_k^2)
///   phi_p[k] = sqrt(1+theta_p) h_k^H p_k / (sum_j |h_k^H p_j|^2 + sigma_k^2)
FpAuxiliaries update_phi(const ChannelSet& ch, const BeamformingState& bf,
                         const SystemConfig& cfg, const FpAuxiliaries& theta);

/// First-stage bound f_{c,k} = log(1+theta) - theta + (1+theta) gamma / (1+gamma).
double f_common(const ChannelSet& ch, const BeamformingState& bf,
                const SystemConfig& cfg, double theta, int k);
double f_private(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg, double theta, int k);

/// Quadratic-transform bound for the common stream:
///   log(1+theta) - theta + 2 sqrt(1+theta) Re{phi^* h_k^H p_c}
///     - |phi|^2 (|h_k^H p_c|^2 + sum_j |h_k^H p_j|^2 + sigma_k^2)
double g_common(const ChannelSet& ch, const BeamformingState& bf,
                const SystemConfig& cfg, double theta, Complex phi, int k);

/// Private-stream analogue; the quadratic term omits the common beam.
double g_private(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg, double theta, Complex phi, int k);

}  // namespace rsma
