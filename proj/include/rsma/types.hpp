#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsma {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Static description of the downlink: K single-antenna users served by an
/// N_t-antenna transmitter under a total power budget. Rates are in nats.
struct SystemConfig {
  int num_users = 0;
  int num_tx_antennas = 0;
  double tx_power_budget = 0.0;
  VectorXd noise_powers;  // sigma_k^2, length K

  static SystemConfig uniform_noise(int num_users, int num_tx_antennas,
                                    double tx_power_budget,
                                    double noise_power = 1.0);
  void validate() const;
};

/// One channel realization: column k is the vector between the transmitter
/// and user k.
struct ChannelSet {
  MatrixXcd channels;  // N_t x K

  int num_users() const { return static_cast<int>(channels.cols()); }
  int num_tx_antennas() const { return static_cast<int>(channels.rows()); }
  VectorXcd user(int k) const { return channels.col(k); }
};

/// Common beam (column 0), private beams (columns 1..K), the common-rate
/// allocation c and the epigraph scalar t. During extragradient iterations
/// c and the power constraint may be transiently violated; finalization
/// restores feasibility.
struct BeamformingState {
  MatrixXcd beams;  // N_t x (K+1)
  VectorXd common_alloc;
  double epigraph_t = 0.0;

  int num_users() const { return static_cast<int>(beams.cols()) - 1; }
  int num_tx_antennas() const { return static_cast<int>(beams.rows()); }
  VectorXcd common_beam() const { return beams.col(0); }
  VectorXcd private_beam(int k) const { return beams.col(k + 1); }
};

struct RateVector {
  VectorXd common_rates;   // R_{c,k}
  VectorXd private_rates;  // R_{p,k}
  double common_rate = 0.0;  // R_c = min_k R_{c,k}
  double mmf_rate = 0.0;     // min_k(R_{p,k} + c_k) with c clipped/rescaled
};

/// SINR surrogate scalars (theta) and quadratic-transform scalars (phi),
/// one pair per user and stream class.
struct FpAuxiliaries {
  VectorXd theta_c, theta_p;
  VectorXcd phi_c, phi_p;
};

/// Nonnegative multipliers for the epigraph, common-rate, c >= 0 and power
/// constraints of the convex subproblem.
struct DualState {
  VectorXd lambda;  // length K
  VectorXd rho;     // length K
  VectorXd mu;      // length K
  double omega = 0.0;

  static DualState initial(int num_users, double power_budget,
                           bool has_common = true);
};

struct EgConfig {
  double alpha_init = 0.5;
  double beta = 0.8;          // in (0,1)
  double inner_tol = 1e-3;    // epsilon_2
  int max_inner_iters = 2000;
};

enum class Variant { kFullDim, kLowDim, kAuto };

std::string variant_name(Variant v);

struct EgfpConfig {
  double outer_tol = 1e-3;  // epsilon_1
  int max_outer_iters = 200;
  EgConfig eg;
  Variant variant = Variant::kAuto;
  bool record_inner_trace = false;
};

struct InnerTraceRow {
  int iteration = 0;
  double inner_obj = 0.0;
  double alpha = 0.0;
  double h_norm = 0.0;
};

struct OuterTraceRow {
  int iteration = 0;
  double mmf_nats = 0.0;       // clipped MMF at the normalized beams
  double surrogate_obj = 0.0;  // min_k(g_{p,k} + c_k) before normalization
  int inner_iters = 0;
};

struct SolverReport {
  double mmf_rate_nats = 0.0;
  int outer_iters = 0;
  long inner_iters_total = 0;
  double elapsed_seconds = 0.0;
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<OuterTraceRow> trace;
  std::vector<std::vector<InnerTraceRow>> inner_trace;  // per outer iteration, optional

  // Final state, useful for verification; not part of the JSON schema.
  BeamformingState solution;
  DualState duals;
  FpAuxiliaries aux;
  RateVector rates;
};

/// Thrown when the extragradient iteration produces non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int outer_iter, int inner_iter)
      : std::runtime_error("extragradient diverged at outer iteration " +
                           std::to_string(outer_iter) + ", inner iteration " +
                           std::to_string(inner_iter)),
        outer_iteration(outer_iter),
        inner_iteration(inner_iter) {}

  int outer_iteration;
  int inner_iteration;
};

}  // namespace rsma
