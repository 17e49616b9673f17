#include "rsma/fp.hpp"

#include <cmath>

#include "rsma/model.hpp"

namespace rsma {

namespace {

// Signal + interference + noise at user k, for the common stream (all K+1
// beams) or the private stream (private beams only).
double full_denominator(const ChannelSet& ch, const BeamformingState& bf,
                        const SystemConfig& cfg, int k, bool include_common) {
  const VectorXcd hk = ch.channels.col(k);
  double total = cfg.noise_powers[k];
  for (int j = include_common ? 0 : 1; j <= ch.num_users(); ++j)
    total += std::norm(hk.dot(bf.beams.col(j)));
  return total;
}

}  // namespace

FpAuxiliaries update_theta(const ChannelSet& ch, const BeamformingState& bf,
                           const SystemConfig& cfg) {
  const int users = ch.num_users();
  FpAuxiliaries aux;
  aux.theta_c.resize(users);
  aux.theta_p.resize(users);
  for (int k = 0; k < users; ++k) {
    aux.theta_c[k] = sinr_common(ch, bf, cfg, k);
    aux.theta_p[k] = sinr_private(ch, bf, cfg, k);
  }
  return aux;
}

FpAuxiliaries update_phi(const ChannelSet& ch, const BeamformingState& bf,
                         const SystemConfig& cfg, const FpAuxiliaries& theta) {
  const int users = ch.num_users();
  FpAuxiliaries aux = theta;
  aux.phi_c.resize(users);
  aux.phi_p.resize(users);
  for (int k = 0; k < users; ++k) {
    const VectorXcd hk = ch.channels.col(k);
    aux.phi_c[k] = std::sqrt(1.0 + theta.theta_c[k]) * hk.dot(bf.beams.col(0)) /
                   full_denominator(ch, bf, cfg, k, true);
    aux.phi_p[k] = std::sqrt(1.0 + theta.theta_p[k]) * hk.dot(bf.beams.col(k + 1)) /
                   full_denominator(ch, bf, cfg, k, false);
  }
  return aux;
}

double f_common(const ChannelSet& ch, const BeamformingState& bf,
                const SystemConfig& cfg, double theta, int k) {
  const double gamma = sinr_common(ch, bf, cfg, k);
  return std::log1p(theta) - theta + (1.0 + theta) * gamma / (1.0 + gamma);
}

double f_private(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg, double theta, int k) {
  const double gamma = sinr_private(ch, bf, cfg, k);
  return std::log1p(theta) - theta + (1.0 + theta) * gamma / (1.0 + gamma);
}

double g_common(const ChannelSet& ch, const BeamformingState& bf,
                const SystemConfig& cfg, double theta, Complex phi, int k) {
  const VectorXcd hk = ch.channels.col(k);
  const Complex signal = hk.dot(bf.beams.col(0));
  return std::log1p(theta) - theta +
         2.0 * std::sqrt(1.0 + theta) * std::real(std::conj(phi) * signal) -
         std::norm(phi) * full_denominator(ch, bf, cfg, k, true);
}

double g_private(const ChannelSet& ch, const BeamformingState& bf,
                 const SystemConfig& cfg, double theta, Complex phi, int k) {
  const VectorXcd hk = ch.channels.col(k);
  const Complex signal = hk.dot(bf.beams.col(k + 1));
  return std::log1p(theta) - theta +
         2.0 * std::sqrt(1.0 + theta) * std::real(std::conj(phi) * signal) -
         std::norm(phi) * full_denominator(ch, bf, cfg, k, false);
}

}  // namespace rsma
