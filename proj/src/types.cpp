#include "rsma/types.hpp"

namespace rsma {

SystemConfig SystemConfig::uniform_noise(int num_users, int num_tx_antennas,
                                         double tx_power_budget,
                                         double noise_power) {
  SystemConfig cfg;
  cfg.num_users = num_users;
  cfg.num_tx_antennas = num_tx_antennas;
  cfg.tx_power_budget = tx_power_budget;
  cfg.noise_powers = VectorXd::Constant(num_users, noise_power);
  cfg.validate();
  return cfg;
}

void SystemConfig::validate() const {
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (num_tx_antennas < 1)
    throw std::invalid_argument("num_tx_antennas must be >= 1");
  if (!(tx_power_budget > 0.0))
    throw std::invalid_argument("tx_power_budget must be positive");
  if (noise_powers.size() != num_users)
    throw std::invalid_argument("noise_powers must have length num_users");
  if ((noise_powers.array() <= 0.0).any())
    throw std::invalid_argument("noise powers must be positive");
}

DualState DualState::initial(int num_users, double power_budget,
                             bool has_common) {
  DualState dual;
  dual.lambda = VectorXd::Constant(num_users, 1.0 / num_users);
  if (has_common) {
    dual.rho = VectorXd::Constant(num_users, 1.0 / num_users);
    dual.mu = VectorXd::Zero(num_users);
  } else {
    dual.rho = VectorXd::Zero(num_users);
    dual.mu = VectorXd::Zero(num_users);
  }
  dual.omega = 1.0 / power_budget;
  return dual;
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kFullDim: return "full";
    case Variant::kLowDim: return "lowdim";
    case Variant::kAuto: return "auto";
  }
  return "unknown";
}

}  // namespace rsma
