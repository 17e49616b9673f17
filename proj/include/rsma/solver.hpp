#pragma once

#include <cstdint>
#include <vector>

#include "rsma/problem.hpp"
#include "rsma/types.hpp"
#include "rsma/vi.hpp"

namespace rsma {

struct SubproblemResult {
  ViState state;
  std::vector<InnerTraceRow> trace;
  int iterations = 0;
};

/// Solves the convex subproblem at frozen auxiliaries by extragradient steps
/// on the dual saddle: each iteration predicts with alpha_init, computes the
/// Khobotov step, then redoes prediction and correction with it. Stops when
/// the clipped MMF metric changes by less than inner_tol, or at the iteration
/// cap. Throws DivergenceError on non-finite state.
SubproblemResult solve_subproblem(const ProblemData& pd, const ViState& start,
                                  const FpAuxiliaries& aux, const EgConfig& cfg,
                                  int outer_iteration = 0);

/// Full outer loop: alternate closed-form auxiliary updates, the subproblem
/// solve, and power renormalization until the outer objective stalls. The
/// final allocation is recomputed exactly by level-filling so the reported
/// pair (P, c) is feasible.
SolverReport egfp_solve_problem(const ProblemData& pd, const EgfpConfig& cfg,
                                std::uint64_t seed);

/// EG-FP on the original full-dimensional problem.
SolverReport egfp_solve(const ChannelSet& ch, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed);

/// EG-FP on the K-dimensional reformulation; beams are recovered as P = H Q
/// and renormalized before reporting.
SolverReport lowdim_egfp_solve(const ChannelSet& ch, const SystemConfig& cfg,
                               const EgfpConfig& solver_cfg, std::uint64_t seed);

/// Dispatches on cfg.variant (kAuto picks low-dim when N_t > K).
SolverReport solve_mmf(const ChannelSet& ch, const SystemConfig& cfg,
                       const EgfpConfig& solver_cfg, std::uint64_t seed);

/// Imperfect-CSIT variants optimize the closed-form rate lower bounds; at
/// kappa = 0 they reduce exactly to the perfect-CSIT pipeline.
SolverReport egfp_solve_imperfect(const ImperfectChannelSet& ics,
                                  const SystemConfig& cfg,
                                  const EgfpConfig& solver_cfg,
                                  std::uint64_t seed);

/// SDMA special case: common beam and common allocation pinned to zero, the
/// rho and mu multiplier blocks dropped.
SolverReport sdma_solve(const ChannelSet& ch, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed);
SolverReport sdma_solve(const ImperfectChannelSet& ics, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed);

// Toy saddle problem min_x max_y xy; the one-step mode applies only the
// prediction update and spirals outward, the extragradient mode contracts.
enum class ToyMode { kOneStep, kExtragradient };

struct ToyTrajectory {
  std::vector<Eigen::Vector2d> points;  // includes the starting point
};

ToyTrajectory toy_minmax_demo(const Eigen::Vector2d& start, double alpha,
                              int steps, ToyMode mode, double beta = 0.8);

}  // namespace rsma
