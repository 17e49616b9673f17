#pragma once

#include <cstdint>
#include <vector>

#include "rsma/types.hpp"

namespace rsma {

/// Imperfect-CSIT channel data: the transmitter knows the estimates and the
/// per-user error covariances; the true channels are kept for Monte-Carlo
/// evaluation. Under the isotropic model R_k = kappa * pathvar_k * I.
struct ImperfectChannelSet {
  MatrixXcd estimates;       // hhat_k, N_t x K
  MatrixXcd true_channels;   // h_k = hhat_k + e_k
  std::vector<MatrixXcd> error_covariances;  // R_k, N_t x N_t Hermitian PSD
  VectorXd path_variances;   // sigma~_k^2
  double error_ratio = 0.0;  // kappa in [0, 1)

  int num_users() const { return static_cast<int>(estimates.cols()); }
  int num_tx_antennas() const { return static_cast<int>(estimates.rows()); }
};

/// Draws pathvar_k ~ Uniform[0.1, 1], hhat_k ~ CN(0, (1-kappa) pathvar_k I)
/// and e_k ~ CN(0, kappa pathvar_k I). Deterministic per seed. Throws
/// std::invalid_argument for kappa outside [0, 1).
ImperfectChannelSet gen_imperfect_channel(const SystemConfig& cfg, double kappa,
                                          std::uint64_t seed);

/// Closed-form lower bound on the average common rate at user k, treating the
/// estimation-error leakage as independent Gaussian noise:
///   log(1 + |hhat^H p_c|^2 / (sum_j |hhat^H p_j|^2 + p_c^H R p_c
///                              + sum_j p_j^H R p_j + sigma^2))
double rate_lb_common(const ImperfectChannelSet& ics, const BeamformingState& bf,
                      const SystemConfig& cfg, int k);

/// Private-stream analogue; the leakage sum runs over the private beams only
/// in the signal position (the common beam has been removed by SIC).
double rate_lb_private(const ImperfectChannelSet& ics, const BeamformingState& bf,
                       const SystemConfig& cfg, int k);

}  // namespace rsma
