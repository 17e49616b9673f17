#include "rsma/solver.hpp"

#include <chrono>
#include <cmath>

#include "rsma/oracle.hpp"

namespace rsma {

namespace {

// One inner update per Algorithm step: predict with alpha_init, derive the
// Khobotov step from that prediction, then redo prediction and correction
// with the capped step.
struct StepOutcome {
  VectorXd x;
  double alpha = 0.0;
  double h_norm = 0.0;
};

StepOutcome eg_update(const ProblemData& pd, const FpAuxiliaries& aux,
                      const ViLayout& layout, const VectorXd& x,
                      const EgConfig& cfg) {
  const VectorXd hx = h_map(pd, aux, x);
  const VectorXd probe = project_dual(layout, x - cfg.alpha_init * hx);
  const VectorXd h_probe = h_map(pd, aux, probe);

  double alpha = cfg.alpha_init;
  const double dh = (hx - h_probe).norm();
  if (dh > 0.0)
    alpha = std::min(cfg.beta * (x - probe).norm() / dh, cfg.alpha_init);

  VectorXd x_bar;
  VectorXd h_bar;
  if (alpha == cfg.alpha_init) {
    x_bar = probe;
    h_bar = h_probe;
  } else {
    x_bar = project_dual(layout, x - alpha * hx);
    h_bar = h_map(pd, aux, x_bar);
  }
  StepOutcome out;
  out.x = project_dual(layout, x - alpha * h_bar);
  out.alpha = alpha;
  out.h_norm = hx.norm();
  return out;
}

std::string mode_label(const ProblemData& pd, bool lowdim) {
  std::string label = lowdim ? "lowdim" : "full";
  if (!pd.has_common) label = "sdma-" + label;
  return label;
}

// The weights already satisfy tr(Q^H G Q) = P_t, so the recovered beams are
// power-normalized up to floating-point rounding; rescale only beyond that,
// which keeps the G = I case identical to the full-dimensional path.
void renormalize_recovered(BeamformingState& bf, double power_budget) {
  const double pow = bf.beams.squaredNorm();
  if (std::abs(pow - power_budget) > 1e-11 * power_budget)
    bf.beams *= std::sqrt(power_budget / pow);
}

}  // namespace

SubproblemResult solve_subproblem(const ProblemData& pd, const ViState& start,
                                  const FpAuxiliaries& aux, const EgConfig& cfg,
                                  int outer_iteration) {
  const ViLayout layout = ViLayout::of(pd);
  VectorXd x = pack(layout, start);
  double obj_prev = mmf_metric(pd, start.beams, start.common_alloc);

  SubproblemResult result;
  for (int n = 0; n < cfg.max_inner_iters; ++n) {
    const StepOutcome step = eg_update(pd, aux, layout, x, cfg);
    if (!step.x.allFinite()) throw DivergenceError(outer_iteration, n);
    x = step.x;
    const ViState current = unpack(layout, x);
    const double obj = mmf_metric(pd, current.beams, current.common_alloc);
    result.trace.push_back({n, obj, step.alpha, step.h_norm});
    ++result.iterations;
    if (std::abs(obj - obj_prev) < cfg.inner_tol) break;
    obj_prev = obj;
  }
  result.state = unpack(layout, x);
  return result;
}

SolverReport egfp_solve_problem(const ProblemData& pd, const EgfpConfig& cfg,
                                std::uint64_t seed) {
  const auto t_start = std::chrono::steady_clock::now();
  const int users = pd.num_users();

  ViState state;
  state.beams = mrt_initial_beams(pd);
  state.common_alloc = VectorXd::Zero(users);
  state.epigraph_t = 0.0;
  state.dual = DualState::initial(users, pd.power_budget, pd.has_common);

  SolverReport report;
  report.seed = seed;

  double outer_obj = mmf_metric(pd, state.beams, state.common_alloc);
  long inner_total = 0;
  for (int m = 1; m <= cfg.max_outer_iters; ++m) {
    const FpAuxiliaries aux = update_aux(pd, state.beams);

    ViState inner_start = state;
    inner_start.common_alloc = VectorXd::Zero(users);
    inner_start.epigraph_t = mmf_metric(pd, state.beams, inner_start.common_alloc);

    SubproblemResult sub = solve_subproblem(pd, inner_start, aux, cfg.eg, m);
    inner_total += sub.iterations;
    state = sub.state;

    // Surrogate objective of the block-updated variables, before the power
    // renormalization below.
    const Surrogates surr = eval_surrogates(pd, state.beams, aux);
    const double surrogate_obj = pd.has_common
                                     ? (surr.g_p + state.common_alloc).minCoeff()
                                     : surr.g_p.minCoeff();

    state.beams = power_normalized(pd, state.beams);
    const double obj = mmf_metric(pd, state.beams, state.common_alloc);
    report.trace.push_back({m, obj, surrogate_obj, sub.iterations});
    if (cfg.record_inner_trace) report.inner_trace.push_back(std::move(sub.trace));
    report.outer_iters = m;
    report.aux = aux;

    const bool converged = std::abs(obj - outer_obj) < cfg.outer_tol;
    outer_obj = obj;
    if (converged) break;
  }

  // Exact allocation at the final beams keeps the reported pair feasible.
  const EffRates final_rates = eval_rates(pd, state.beams);
  VectorXd final_c = VectorXd::Zero(users);
  if (pd.has_common)
    final_c = optimal_c_given_P(final_rates.priv, final_rates.common_min);

  report.inner_iters_total = inner_total;
  report.mmf_rate_nats = (final_rates.priv + final_c).minCoeff();
  report.solution.beams = state.beams;
  report.solution.common_alloc = final_c;
  report.solution.epigraph_t = state.epigraph_t;
  report.duals = state.dual;
  report.rates.common_rates = final_rates.common;
  report.rates.private_rates = final_rates.priv;
  report.rates.common_rate = final_rates.common_min;
  report.rates.mmf_rate = report.mmf_rate_nats;

  const auto t_end = std::chrono::steady_clock::now();
  report.elapsed_seconds = std::chrono::duration<double>(t_end - t_start).count();
  return report;
}

SolverReport egfp_solve(const ChannelSet& ch, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed) {
  const ProblemData pd = build_problem(ch, cfg);
  SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
  report.variant = mode_label(pd, false);
  return report;
}

SolverReport lowdim_egfp_solve(const ChannelSet& ch, const SystemConfig& cfg,
                               const EgfpConfig& solver_cfg, std::uint64_t seed) {
  const ProblemData pd = build_lowdim_problem(ch, cfg);
  SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
  BeamformingState recovered = recover_beams(ch, report.solution.beams);
  renormalize_recovered(recovered, cfg.tx_power_budget);
  recovered.common_alloc = report.solution.common_alloc;
  recovered.epigraph_t = report.solution.epigraph_t;
  report.solution = recovered;
  report.variant = mode_label(pd, true);
  return report;
}

SolverReport solve_mmf(const ChannelSet& ch, const SystemConfig& cfg,
                       const EgfpConfig& solver_cfg, std::uint64_t seed) {
  const bool lowdim =
      solver_cfg.variant == Variant::kLowDim ||
      (solver_cfg.variant == Variant::kAuto &&
       cfg.num_tx_antennas > cfg.num_users);
  return lowdim ? lowdim_egfp_solve(ch, cfg, solver_cfg, seed)
                : egfp_solve(ch, cfg, solver_cfg, seed);
}

SolverReport egfp_solve_imperfect(const ImperfectChannelSet& ics,
                                  const SystemConfig& cfg,
                                  const EgfpConfig& solver_cfg,
                                  std::uint64_t seed) {
  const bool lowdim =
      solver_cfg.variant == Variant::kLowDim ||
      (solver_cfg.variant == Variant::kAuto &&
       cfg.num_tx_antennas > cfg.num_users);
  if (!lowdim) {
    const ProblemData pd = build_problem(ics, cfg);
    SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
    report.variant = mode_label(pd, false);
    return report;
  }
  const ProblemData pd = build_lowdim_problem(ics, cfg);
  SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
  ChannelSet est;
  est.channels = ics.estimates;
  BeamformingState recovered = recover_beams(est, report.solution.beams);
  renormalize_recovered(recovered, cfg.tx_power_budget);
  recovered.common_alloc = report.solution.common_alloc;
  recovered.epigraph_t = report.solution.epigraph_t;
  report.solution = recovered;
  report.variant = mode_label(pd, true);
  return report;
}

SolverReport sdma_solve(const ChannelSet& ch, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed) {
  const bool lowdim =
      solver_cfg.variant == Variant::kLowDim ||
      (solver_cfg.variant == Variant::kAuto &&
       cfg.num_tx_antennas > cfg.num_users);
  const ProblemData pd = lowdim ? build_lowdim_problem(ch, cfg, false)
                                : build_problem(ch, cfg, false);
  SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
  if (lowdim) {
    BeamformingState recovered = recover_beams(ch, report.solution.beams);
    renormalize_recovered(recovered, cfg.tx_power_budget);
    recovered.common_alloc = report.solution.common_alloc;
    report.solution = recovered;
  }
  report.variant = mode_label(pd, lowdim);
  return report;
}

SolverReport sdma_solve(const ImperfectChannelSet& ics, const SystemConfig& cfg,
                        const EgfpConfig& solver_cfg, std::uint64_t seed) {
  const bool lowdim =
      solver_cfg.variant == Variant::kLowDim ||
      (solver_cfg.variant == Variant::kAuto &&
       cfg.num_tx_antennas > cfg.num_users);
  const ProblemData pd = lowdim ? build_lowdim_problem(ics, cfg, false)
                                : build_problem(ics, cfg, false);
  SolverReport report = egfp_solve_problem(pd, solver_cfg, seed);
  if (lowdim) {
    ChannelSet est;
    est.channels = ics.estimates;
    BeamformingState recovered = recover_beams(est, report.solution.beams);
    renormalize_recovered(recovered, cfg.tx_power_budget);
    recovered.common_alloc = report.solution.common_alloc;
    report.solution = recovered;
  }
  report.variant = mode_label(pd, lowdim);
  return report;
}

ToyTrajectory toy_minmax_demo(const Eigen::Vector2d& start, double alpha,
                              int steps, ToyMode mode, double beta) {
  // min_x max_y xy with h(x, y) = (y, -x); the unique saddle point is the
  // origin.
  const auto h = [](const Eigen::Vector2d& v) {
    return Eigen::Vector2d(v.y(), -v.x());
  };
  ToyTrajectory traj;
  traj.points.reserve(steps + 1);
  Eigen::Vector2d x = start;
  traj.points.push_back(x);
  for (int n = 0; n < steps; ++n) {
    if (mode == ToyMode::kOneStep) {
      x = x - alpha * h(x);
    } else {
      const Eigen::Vector2d probe = x - alpha * h(x);
      double step = alpha;
      const double dh = (h(x) - h(probe)).norm();
      if (dh > 0.0) step = std::min(beta * (x - probe).norm() / dh, alpha);
      const Eigen::Vector2d x_bar = x - step * h(x);
      x = x - step * h(x_bar);
    }
    traj.points.push_back(x);
  }
  return traj;
}

}  // namespace rsma
