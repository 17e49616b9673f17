#pragma once

#include <vector>

#include "rsma/csit.hpp"
#include "rsma/types.hpp"

namespace rsma {

// Every solver configuration (perfect or imperfect CSIT, full- or
// low-dimensional beams, with or without a common stream) reduces to the same
// data: per-user signal vectors a_k, per-user cross-term matrices
// T_k = a_k a_k^H + R_k applied to every beam in the denominators, and a
// power metric M with budget tr(P^H M P) <= P_t.
//
//   full-dim, perfect:    a_k = h_k,              R_k = 0,                M = I
//   full-dim, imperfect:  a_k = hhat_k,           R_k = CSIT error cov,   M = I
//   low-dim  (p = H q):   a_k = g_k = (H^H H) e_k, R_k -> H^H R_k H,      M = G
//
// With the isotropic error model R_k = tau_k I the low-dim covariance is
// tau_k G, i.e. proportional to the metric, which keeps the per-iteration
// cost at O(K^2 N).
struct ProblemData {
  MatrixXcd signal;    // N x K, column k = a_k
  MatrixXcd mrt_dirs;  // N x K, deterministic initialization directions
  MatrixXcd metric;    // N x N power metric M (ignored when identity_metric)
  bool identity_metric = true;
  VectorXd err_scale;  // tau_k with R_k = tau_k * M; empty when perfect CSIT
  std::vector<MatrixXcd> err_cov;  // general R_k; empty when isotropic/perfect
  VectorXd noise;      // sigma_k^2
  double power_budget = 0.0;
  bool has_common = true;

  int dim() const { return static_cast<int>(signal.rows()); }
  int num_users() const { return static_cast<int>(signal.cols()); }
  bool perfect() const { return err_scale.size() == 0 && err_cov.empty(); }
};

ProblemData build_problem(const ChannelSet& ch, const SystemConfig& cfg,
                          bool with_common = true);
ProblemData build_problem(const ImperfectChannelSet& ics, const SystemConfig& cfg,
                          bool with_common = true);
ProblemData build_lowdim_problem(const ChannelSet& ch, const SystemConfig& cfg,
                                 bool with_common = true);
ProblemData build_lowdim_problem(const ImperfectChannelSet& ics,
                                 const SystemConfig& cfg, bool with_common = true);

/// Low-dimensional reformulation data: the Gram matrix G = H^H H and the
/// weight matrix Q with p_k = H q_k.
struct LowDimProblem {
  MatrixXcd gram;     // K x K Hermitian PSD
  MatrixXcd weights;  // K x (K+1), column 0 = common
};

LowDimProblem build_lowdim(const ChannelSet& ch);

/// Maps low-dimensional weights back to beams, P = H Q.
BeamformingState recover_beams(const ChannelSet& ch, const MatrixXcd& weights);

/// Effective per-user rates of a beam matrix under the problem data. For
/// perfect CSIT these are the instantaneous rates; for imperfect CSIT the
/// closed-form lower bounds.
struct EffRates {
  VectorXd common;   // R_{c,k}
  VectorXd priv;     // R_{p,k}
  double common_min = 0.0;
};

EffRates eval_rates(const ProblemData& pd, const MatrixXcd& beams);

/// tr(P^H M P), real.
double eval_tx_power(const ProblemData& pd, const MatrixXcd& beams);

MatrixXcd power_normalized(const ProblemData& pd, const MatrixXcd& beams);

/// Clipped MMF progress metric: c is clipped to nonnegative entries, rescaled
/// by min(1, R_c / 1^T c), and min_k(R_{p,k} + c_k) is returned.
double mmf_metric(const ProblemData& pd, const MatrixXcd& beams,
                  const VectorXd& common_alloc);

VectorXd clip_common_alloc(const VectorXd& common_alloc, double common_rate);

/// Closed-form block update of all auxiliaries at the given beams.
FpAuxiliaries update_aux(const ProblemData& pd, const MatrixXcd& beams);

struct Surrogates {
  VectorXd g_c, g_p;
};

Surrogates eval_surrogates(const ProblemData& pd, const MatrixXcd& beams,
                           const FpAuxiliaries& aux);

/// Lagrangian of the convex subproblem at fixed auxiliaries:
///   L = t - sum_k lambda_k (t - c_k - g_{p,k})
///       - sum_k rho_k (1^T c - g_{c,k}) + sum_k mu_k c_k
///       - omega (tr(P^H M P) - P_t)
double lagrangian_value(const ProblemData& pd, const MatrixXcd& beams,
                        const VectorXd& common_alloc, double epigraph_t,
                        const DualState& dual, const FpAuxiliaries& aux);

/// Wirtinger conjugate gradients of L with respect to the beams, one column
/// per beam (column 0 = common, zero there when the common stream is off).
MatrixXcd beam_gradient(const ProblemData& pd, const MatrixXcd& beams,
                        const DualState& dual, const FpAuxiliaries& aux);

/// Deterministic MRT initialization: half the budget on the common beam along
/// the normalized sum of user directions, the rest split equally across the
/// private beams (all of it when the common stream is off).
MatrixXcd mrt_initial_beams(const ProblemData& pd);

}  // namespace rsma
