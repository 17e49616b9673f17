#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "rsma/csit.hpp"
#include "rsma/problem.hpp"
#include "rsma/types.hpp"
#include "rsma/vi.hpp"

namespace rsma {

/// Exact solution of max_c min_k(r_k + c_k) s.t. 1^T c <= pool, c >= 0 by
/// level-filling: find the level L with sum_k max(0, L - r_k) = pool and
/// allocate c_k = max(0, L - r_k). Non-iterative.
VectorXd optimal_c_given_P(const VectorXd& private_rates, double common_pool);

struct FdCheckResult {
  bool pass = false;
  double max_rel_error = 0.0;  // per-entry error over the gradient scale
  int worst_index = -1;
};

/// Central finite differences on every coordinate of a real stack, compared
/// against the supplied analytic gradient. The relative-error denominator is
/// the larger of the two gradient infinity-norms, floored at 1e-8.
FdCheckResult fd_gradient_check(const std::function<double(const VectorXd&)>& eval_fn,
                                const VectorXd& point, const VectorXd& analytic,
                                double step = 1e-6, double tolerance = 1e-5);

struct KktResiduals {
  double stationarity_norm = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double compl_slack = 0.0;

  double max() const;
};

/// Residuals of the subproblem KKT system at a candidate primal/dual point
/// with frozen auxiliaries.
KktResiduals kkt_residuals(const ProblemData& pd, const ViState& state,
                           const FpAuxiliaries& aux);
KktResiduals kkt_residuals(const ChannelSet& ch, const SystemConfig& cfg,
                           const BeamformingState& bf, const FpAuxiliaries& aux,
                           const DualState& dual);

enum class Stream { kCommon, kPrivate };

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo average rate at user k: draws e ~ CN(0, R_k), evaluates the
/// instantaneous rate at h = hhat + e.
McEstimate monte_carlo_ar(const ImperfectChannelSet& ics, const BeamformingState& bf,
                          const SystemConfig& cfg, int k, Stream stream,
                          int num_draws, std::uint64_t seed);

/// Monte-Carlo ergodic MMF rate at fixed beams and allocation: instantaneous
/// rates at h = hhat + e, common pool min_k R_{c,k}, c re-clipped per draw.
McEstimate monte_carlo_ergodic_mmf(const ImperfectChannelSet& ics,
                                   const BeamformingState& bf,
                                   const SystemConfig& cfg, int num_draws,
                                   std::uint64_t seed);

enum class GridDirections { kMrt, kZf };

/// Exhaustive power-split search for K = 2 with fixed beam directions; the
/// allocation c is filled exactly per split. A certified lower bound on the
/// optimum over the restricted direction set. Throws for K != 2.
double grid_search_2user(const ChannelSet& ch, const SystemConfig& cfg,
                         GridDirections directions, double resolution);

}  // namespace rsma
