#include "rsma/csit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rsma {

ImperfectChannelSet gen_imperfect_channel(const SystemConfig& cfg, double kappa,
                                          std::uint64_t seed) {
  cfg.validate();
  if (kappa < 0.0 || kappa >= 1.0)
    throw std::invalid_argument("kappa must lie in [0, 1)");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> path_var(0.1, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int users = cfg.num_users;
  const int n = cfg.num_tx_antennas;

  ImperfectChannelSet ics;
  ics.error_ratio = kappa;
  ics.path_variances.resize(users);
  for (int k = 0; k < users; ++k) ics.path_variances[k] = path_var(rng);

  ics.estimates.resize(n, users);
  ics.true_channels.resize(n, users);
  ics.error_covariances.reserve(users);
  for (int k = 0; k < users; ++k) {
    // Component standard deviations of CN(0, v I): each part has variance v/2.
    const double est_sd = std::sqrt((1.0 - kappa) * ics.path_variances[k] / 2.0);
    const double err_sd = std::sqrt(kappa * ics.path_variances[k] / 2.0);
    for (int i = 0; i < n; ++i) {
      const Complex est(normal(rng) * est_sd, normal(rng) * est_sd);
      const Complex err(normal(rng) * err_sd, normal(rng) * err_sd);
      ics.estimates(i, k) = est;
      ics.true_channels(i, k) = est + err;
    }
    ics.error_covariances.push_back(kappa * ics.path_variances[k] *
                                    MatrixXcd::Identity(n, n));
  }
  return ics;
}

namespace {

void check_dims(const ImperfectChannelSet& ics, const BeamformingState& bf,
                const SystemConfig& cfg, int k) {
  if (ics.num_tx_antennas() != bf.num_tx_antennas() ||
      ics.num_users() != bf.num_users() || ics.num_users() != cfg.num_users)
    throw std::invalid_argument("channel/beamformer dimension mismatch");
  if (k < 0 || k >= ics.num_users())
    throw std::invalid_argument("user index out of range");
}

}  // namespace

double rate_lb_common(const ImperfectChannelSet& ics, const BeamformingState& bf,
                      const SystemConfig& cfg, int k) {
  check_dims(ics, bf, cfg, k);
  const VectorXcd hk = ics.estimates.col(k);
  const MatrixXcd& r = ics.error_covariances[k];
  const double signal = std::norm(hk.dot(bf.beams.col(0)));
  double denom = cfg.noise_powers[k] +
                 std::real(bf.beams.col(0).dot(r * bf.beams.col(0)));
  for (int j = 1; j <= ics.num_users(); ++j)
    denom += std::norm(hk.dot(bf.beams.col(j))) +
             std::real(bf.beams.col(j).dot(r * bf.beams.col(j)));
  return std::log1p(signal / denom);
}

double rate_lb_private(const ImperfectChannelSet& ics, const BeamformingState& bf,
                       const SystemConfig& cfg, int k) {
  check_dims(ics, bf, cfg, k);
  const VectorXcd hk = ics.estimates.col(k);
  const MatrixXcd& r = ics.error_covariances[k];
  const double signal = std::norm(hk.dot(bf.beams.col(k + 1)));
  double denom = cfg.noise_powers[k];
  for (int j = 1; j <= ics.num_users(); ++j) {
    if (j != k + 1) denom += std::norm(hk.dot(bf.beams.col(j)));
    denom += std::real(bf.beams.col(j).dot(r * bf.beams.col(j)));
  }
  return std::log1p(signal / denom);
}

}  // namespace rsma
