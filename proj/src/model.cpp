#include "rsma/model.hpp"

#include <cmath>
#include <stdexcept>

#include "rsma/problem.hpp"

namespace rsma {

namespace {

void check_dims(const ChannelSet& ch, const BeamformingState& bf,
                const SystemConfig& cfg, int k) {
  if (ch.num_tx_antennas() != bf.num_tx_antennas() ||
      ch.num_users() != bf.num_users() || ch.num_users() != cfg.num_users ||
      ch.num_tx_antennas() != cfg.num_tx_antennas)
    throw std::invalid_argument("channel/beamformer dimension mismatch");
  if (k < 0 || k >= ch.num_users())
    throw std::invalid_argument("user index out of range");
}

}  // namespace

double sinr_common(const ChannelSet& ch, const BeamformingState& bf,
                   const SystemConfig& cfg, int k) {
  check_dims(ch, bf, cfg, k);
  const VectorXcd hk = ch.channels.col(k);
  const double signal = std::norm(hk.dot(bf.beams.col(0)));
  double denom = cfg.noise_powers[k];
  for (int j = 1; j <= ch.num_users(); ++j) denom += std::norm(hk.dot(bf.beams.col(j)));
  return signal / denom;
}

double sinr_private(const ChannelSet& ch, const BeamformingState& bf,
                    const SystemConfig& cfg, int k) {
  check_dims(ch, bf, cfg, k);
  const VectorXcd hk = ch.channels.col(k);
  const double signal = std::norm(hk.dot(bf.beams.col(k + 1)));
  double denom = cfg.noise_powers[k];
  for (int j = 1; j <= ch.num_users(); ++j) {
    if (j == k + 1) continue;
    denom += std::norm(hk.dot(bf.beams.col(j)));
  }
  return signal / denom;
}

RateVector rates(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg) {
  check_dims(ch, bf, cfg, 0);
  const int users = ch.num_users();
  RateVector rv;
  rv.common_rates.resize(users);
  rv.private_rates.resize(users);
  for (int k = 0; k < users; ++k) {
    rv.common_rates[k] = std::log1p(sinr_common(ch, bf, cfg, k));
    rv.private_rates[k] = std::log1p(sinr_private(ch, bf, cfg, k));
  }
  rv.common_rate = rv.common_rates.minCoeff();
  const VectorXd c = clip_common_alloc(bf.common_alloc, rv.common_rate);
  rv.mmf_rate = (rv.private_rates + c).minCoeff();
  return rv;
}

double tx_power(const BeamformingState& bf) { return bf.beams.squaredNorm(); }

BeamformingState normalize_power(const BeamformingState& bf, double power_budget) {
  const double norm = bf.beams.norm();
  if (norm == 0.0)
    throw std::domain_error("cannot normalize an all-zero beam matrix");
  BeamformingState out = bf;
  out.beams *= std::sqrt(power_budget) / norm;
  return out;
}

}  // namespace rsma
