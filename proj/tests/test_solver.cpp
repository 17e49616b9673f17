#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rsma/channel.hpp"
#include "rsma/oracle.hpp"
#include "rsma/solver.hpp"
#include "rsma/vi.hpp"

using namespace rsma;

namespace {

ViState random_state(const ProblemData& pd, std::uint64_t seed,
                     bool nonneg_dual = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int users = pd.num_users();
  ViState st;
  st.beams.resize(pd.dim(), users + 1);
  for (int j = 0; j <= users; ++j)
    for (int i = 0; i < pd.dim(); ++i)
      st.beams(i, j) = Complex(normal(rng), normal(rng));
  if (!pd.has_common) st.beams.col(0).setZero();
  st.common_alloc = VectorXd::NullaryExpr(users, [&](int) { return normal(rng); });
  if (!pd.has_common) st.common_alloc.setZero();
  st.epigraph_t = normal(rng);
  const auto draw_dual = [&](int size) {
    VectorXd v = VectorXd::NullaryExpr(size, [&](int) { return normal(rng); });
    return nonneg_dual ? VectorXd(v.cwiseAbs()) : v;
  };
  st.dual.lambda = draw_dual(users);
  st.dual.rho = pd.has_common ? draw_dual(users) : VectorXd::Zero(users);
  st.dual.mu = pd.has_common ? draw_dual(users) : VectorXd::Zero(users);
  st.dual.omega = std::abs(normal(rng));
  return st;
}

ProblemData random_problem(int users, int n, std::uint64_t seed,
                           bool common = true) {
  const SystemConfig cfg = SystemConfig::uniform_noise(users, n, 10.0);
  return build_problem(gen_channel(cfg, seed), cfg, common);
}

// Scalar recomputation of the Lagrangian from its definition, term by term.
double lagrangian_oracle(const ProblemData& pd, const ViState& st,
                         const FpAuxiliaries& aux) {
  const int users = pd.num_users();
  const Surrogates s = eval_surrogates(pd, st.beams, aux);
  double value = st.epigraph_t;
  for (int k = 0; k < users; ++k)
    value -= st.dual.lambda[k] *
             (st.epigraph_t - st.common_alloc[k] - s.g_p[k]);
  if (pd.has_common) {
    for (int k = 0; k < users; ++k)
      value -= st.dual.rho[k] * (st.common_alloc.sum() - s.g_c[k]);
    for (int k = 0; k < users; ++k)
      value += st.dual.mu[k] * st.common_alloc[k];
  }
  value -= st.dual.omega * (eval_tx_power(pd, st.beams) - pd.power_budget);
  return value;
}

}  // namespace

TEST_CASE("pack and unpack round trip exactly") {
  for (bool common : {true, false}) {
    const ProblemData pd = random_problem(3, 4, 11, common);
    const ViLayout layout = ViLayout::of(pd);
    const ViState st = random_state(pd, 77);
    const VectorXd x = pack(layout, st);
    CHECK(x.size() == layout.x_dim());
    const ViState back = unpack(layout, x);
    CHECK(back.beams == st.beams);
    CHECK(back.common_alloc == st.common_alloc);
    CHECK(back.epigraph_t == st.epigraph_t);
    CHECK(back.dual.lambda == st.dual.lambda);
    CHECK(back.dual.rho == st.dual.rho);
    CHECK(back.dual.mu == st.dual.mu);
    CHECK(back.dual.omega == st.dual.omega);
    CHECK(pack(layout, back) == x);
  }
}

TEST_CASE("stack dimensions match the stated layout") {
  const ProblemData pd = random_problem(3, 4, 1);
  const ViLayout layout = ViLayout::of(pd);
  CHECK(layout.y_dim() == 2 * 4 * (3 + 1) + 3 + 1);
  CHECK(layout.z_dim() == 3 * 3 + 1);
}

TEST_CASE("project_dual clamps only the dual block") {
  const ProblemData pd = random_problem(2, 2, 3);
  const ViLayout layout = ViLayout::of(pd);
  VectorXd x = VectorXd::Constant(layout.x_dim(), -1.0);
  const VectorXd p = project_dual(layout, x);
  CHECK(p.head(layout.y_dim()).minCoeff() == -1.0);
  CHECK(p.tail(layout.z_dim()).maxCoeff() == 0.0);
  CHECK(project_dual(layout, p) == p);  // idempotent

  VectorXd mixed(3);
  mixed << -1.0, 2.0, 0.0;
  VectorXd x2 = x;
  x2.tail(3) = mixed;
  const VectorXd p2 = project_dual(layout, x2);
  CHECK(p2[layout.x_dim() - 3] == 0.0);
  CHECK(p2[layout.x_dim() - 2] == 2.0);
  CHECK(p2[layout.x_dim() - 1] == 0.0);
}

TEST_CASE("lagrangian trivial identities") {
  const ProblemData pd = random_problem(3, 4, 5);
  ViState st = random_state(pd, 6);

  SUBCASE("all duals zero gives t") {
    st.dual.lambda.setZero();
    st.dual.rho.setZero();
    st.dual.mu.setZero();
    st.dual.omega = 0.0;
    const FpAuxiliaries aux = update_aux(pd, st.beams);
    CHECK(lagrangian_value(pd, st.beams, st.common_alloc, st.epigraph_t, st.dual,
                           aux) == doctest::Approx(st.epigraph_t));
  }

  SUBCASE("active epigraph constraint contributes nothing") {
    st.dual.lambda.setZero();
    st.dual.lambda[0] = 1.0;
    st.dual.rho.setZero();
    st.dual.mu.setZero();
    st.dual.omega = 0.0;
    const FpAuxiliaries aux = update_aux(pd, st.beams);
    const Surrogates s = eval_surrogates(pd, st.beams, aux);
    st.epigraph_t = st.common_alloc[0] + s.g_p[0];
    CHECK(lagrangian_value(pd, st.beams, st.common_alloc, st.epigraph_t, st.dual,
                           aux) == doctest::Approx(st.epigraph_t));
  }
}

TEST_CASE("lagrangian matches term-by-term recomputation") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const ProblemData pd = random_problem(3, 4, seed, seed % 2 == 0);
    const ViState st = random_state(pd, seed + 30);
    const FpAuxiliaries aux = update_aux(pd, st.beams);
    const double lhs = lagrangian_value(pd, st.beams, st.common_alloc,
                                        st.epigraph_t, st.dual, aux);
    CHECK(lhs == doctest::Approx(lagrangian_oracle(pd, st, aux)).epsilon(1e-12));
  }
}

TEST_CASE("beam gradient trivial cases") {
  const ProblemData pd = random_problem(3, 4, 9);
  ViState st = random_state(pd, 10);
  const FpAuxiliaries aux = update_aux(pd, st.beams);

  SUBCASE("all duals and omega zero kill the common gradient") {
    st.dual.lambda.setZero();
    st.dual.rho.setZero();
    st.dual.mu.setZero();
    st.dual.omega = 0.0;
    const MatrixXcd g = beam_gradient(pd, st.beams, st.dual, aux);
    CHECK(g.col(0).norm() == 0.0);
  }

  SUBCASE("pure power term gives -p_c") {
    st.dual.lambda.setZero();
    st.dual.rho.setZero();
    st.dual.mu.setZero();
    st.dual.omega = 1.0;
    const MatrixXcd g = beam_gradient(pd, st.beams, st.dual, aux);
    CHECK((g.col(0) + st.beams.col(0)).norm() < 1e-14);
  }
}

TEST_CASE("dual gradient blocks and the h stacking") {
  const ProblemData pd = random_problem(3, 4, 13);
  ViState st = random_state(pd, 14);
  const FpAuxiliaries aux = update_aux(pd, st.beams);
  const ViLayout layout = ViLayout::of(pd);
  const int users = pd.num_users();

  // Strictly interior point: t far below c_k + g_p,k makes dL/dlambda > 0.
  const Surrogates s = eval_surrogates(pd, st.beams, aux);
  st.common_alloc = VectorXd::Constant(users, 1.0);
  st.epigraph_t = (st.common_alloc + s.g_p).minCoeff() - 1.0;
  VectorXd h = h_map(pd, aux, pack(layout, st));
  // The h dual block carries +dL/dz, and dL/dlambda_k = c_k + g_p,k - t > 0
  // at a strictly interior point.
  const VectorXd h_lambda = h.segment(layout.y_dim(), users);
  CHECK(h_lambda.minCoeff() > 0.0);

  // Power at the budget zeroes the omega derivative.
  ViState at_budget = st;
  at_budget.beams = power_normalized(pd, at_budget.beams);
  h = h_map(pd, aux, pack(layout, at_budget));
  CHECK(std::abs(h[layout.x_dim() - 1]) < 1e-10);
}

TEST_CASE("gradients match central finite differences of the Lagrangian") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const bool common = seed != 3;
    const ProblemData pd = random_problem(3, 4, seed + 50, common);
    const ViLayout layout = ViLayout::of(pd);
    const ViState st = random_state(pd, seed + 60);
    const VectorXd x = pack(layout, st);
    const FpAuxiliaries aux = update_aux(pd, st.beams);

    const auto eval_l = [&](const VectorXd& v) {
      const ViState s = unpack(layout, v);
      return lagrangian_value(pd, s.beams, s.common_alloc, s.epigraph_t, s.dual,
                              aux);
    };
    const VectorXd h = h_map(pd, aux, x);
    // h = [-dL/dy; +dL/dz], so the full Lagrangian gradient is recovered by
    // flipping the primal block.
    VectorXd grad(layout.x_dim());
    grad.head(layout.y_dim()) = -h.head(layout.y_dim());
    grad.tail(layout.z_dim()) = h.tail(layout.z_dim());

    const FdCheckResult check = fd_gradient_check(eval_l, x, grad);
    CAPTURE(check.max_rel_error);
    CHECK(check.pass);
  }
}

TEST_CASE("h_map is monotone over sampled pairs") {
  const ProblemData pd = random_problem(3, 4, 70);
  const ViLayout layout = ViLayout::of(pd);
  const FpAuxiliaries aux = update_aux(pd, random_state(pd, 71).beams);
  for (int trial = 0; trial < 100; ++trial) {
    const ViState a = random_state(pd, 100 + trial);
    const ViState b = random_state(pd, 500 + trial);
    const VectorXd xa = pack(layout, a);
    const VectorXd xb = pack(layout, b);
    const double inner =
        (h_map(pd, aux, xa) - h_map(pd, aux, xb)).dot(xa - xb);
    CHECK(inner >= -1e-9);
  }
}

TEST_CASE("eg_step fixed point and hand-checked toy arithmetic") {
  SUBCASE("h = 0 is a fixed point") {
    const ProblemData pd = random_problem(2, 2, 80);
    const ViLayout layout = ViLayout::of(pd);
    ViState st = random_state(pd, 81);
    // Zero duals and zero beams give h = 0 except the t-slot: pick lambda
    // summing to one with matching epigraph slacks instead: simpler to verify
    // via the toy problem below; here check the algebraic property
    // x = Proj(x - 0 h) when alpha = 0 keeps the point.
    const VectorXd x = project_dual(layout, pack(layout, st));
    const auto [next, bar] = eg_step(pd, update_aux(pd, st.beams), x, 0.0);
    CHECK(next == x);
    CHECK(bar == x);
  }

  SUBCASE("toy prediction (0.9, 1.1) and correction (0.89, 1.09)") {
    const ToyTrajectory one =
        toy_minmax_demo({1.0, 1.0}, 0.1, 1, ToyMode::kOneStep);
    CHECK(one.points[1].x() == doctest::Approx(0.9));
    CHECK(one.points[1].y() == doctest::Approx(1.1));

    // With beta = 1 the Khobotov step keeps alpha = 0.1 on the linear toy
    // map, so the correction lands exactly at the hand-computed point.
    const ToyTrajectory eg =
        toy_minmax_demo({1.0, 1.0}, 0.1, 1, ToyMode::kExtragradient, 1.0);
    CHECK(eg.points[1].x() == doctest::Approx(0.89));
    CHECK(eg.points[1].y() == doctest::Approx(1.09));
  }
}

TEST_CASE("khobotov step size") {
  const ProblemData pd = random_problem(2, 3, 90);
  const FpAuxiliaries aux = update_aux(pd, random_state(pd, 91).beams);
  const ViLayout layout = ViLayout::of(pd);
  const ViState st = random_state(pd, 92);
  const VectorXd x = project_dual(layout, pack(layout, st));

  SUBCASE("x_bar = x returns alpha_init") {
    CHECK(khobotov_alpha(pd, aux, x, x, 0.37, 0.8) == 0.37);
  }

  SUBCASE("capped at alpha_init, matches the ratio otherwise") {
    const VectorXd hx = h_map(pd, aux, x);
    const VectorXd x_bar = project_dual(layout, x - 0.25 * hx);
    const double dh = (hx - h_map(pd, aux, x_bar)).norm();
    const double expect = std::min(0.8 * (x - x_bar).norm() / dh, 0.5);
    CHECK(khobotov_alpha(pd, aux, x, x_bar, 0.5, 0.8) ==
          doctest::Approx(expect));
    CHECK(khobotov_alpha(pd, aux, x, x_bar, 1e-6, 0.8) == doctest::Approx(1e-6));
  }
}

TEST_CASE("toy min-max trajectories") {
  SUBCASE("one-step gradient spirals outward, each step exactly") {
    const ToyTrajectory t =
        toy_minmax_demo({1.0, 1.0}, 0.1, 100, ToyMode::kOneStep);
    for (std::size_t i = 1; i < t.points.size(); ++i) {
      CHECK(t.points[i].norm() > t.points[i - 1].norm());
      CHECK(t.points[i].squaredNorm() ==
            doctest::Approx(1.01 * t.points[i - 1].squaredNorm()));
    }
  }

  SUBCASE("extragradient contracts strictly and reaches 1e-3") {
    const ToyTrajectory t =
        toy_minmax_demo({1.0, 1.0}, 0.5, 500, ToyMode::kExtragradient);
    for (std::size_t i = 1; i < t.points.size(); ++i)
      CHECK(t.points[i].norm() < t.points[i - 1].norm());
    CHECK(t.points.back().norm() < 1e-3);
  }

  SUBCASE("the saddle point is a fixed point") {
    const ToyTrajectory t =
        toy_minmax_demo({0.0, 0.0}, 0.5, 10, ToyMode::kExtragradient);
    CHECK(t.points.back().norm() == 0.0);
  }
}

TEST_CASE("solve_subproblem terminates fast at a fixed point") {
  // At an exact saddle h = 0 and the metric stalls immediately.
  const ProblemData pd = random_problem(2, 2, 95);
  ViState st;
  st.beams = mrt_initial_beams(pd);
  st.common_alloc = VectorXd::Zero(2);
  st.epigraph_t = mmf_metric(pd, st.beams, st.common_alloc);
  st.dual = DualState::initial(2, pd.power_budget);
  const FpAuxiliaries aux = update_aux(pd, st.beams);

  EgConfig cfg;
  cfg.inner_tol = 1e-3;
  const SubproblemResult first = solve_subproblem(pd, st, aux, cfg);
  // Re-solving from the solution with the same auxiliaries barely moves.
  EgConfig tight = cfg;
  tight.inner_tol = 1e-7;
  tight.max_inner_iters = 20000;
  const SubproblemResult converged = solve_subproblem(pd, st, aux, tight);
  const SubproblemResult resumed =
      solve_subproblem(pd, converged.state, aux, cfg);
  CHECK(resumed.iterations <= 2);
  CHECK(first.iterations >= 1);
}

TEST_CASE("solve_subproblem reaches small KKT residuals") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 10.0);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ChannelSet ch = gen_channel(cfg, seed);
    const ProblemData pd = build_problem(ch, cfg);

    // Converge the outer loop first, then polish the final subproblem.
    EgfpConfig outer_cfg;
    outer_cfg.outer_tol = 1e-6;
    outer_cfg.eg.inner_tol = 1e-7;
    outer_cfg.eg.max_inner_iters = 20000;
    const SolverReport report = egfp_solve_problem(pd, outer_cfg, seed);

    ViState st;
    st.beams = report.solution.beams;
    st.common_alloc = report.solution.common_alloc;
    st.epigraph_t = mmf_metric(pd, st.beams, st.common_alloc);
    st.dual = report.duals;
    const FpAuxiliaries aux = update_aux(pd, st.beams);
    EgConfig inner_cfg;
    inner_cfg.inner_tol = 1e-9;
    inner_cfg.max_inner_iters = 50000;
    const SubproblemResult sub = solve_subproblem(pd, st, aux, inner_cfg);

    const KktResiduals res = kkt_residuals(pd, sub.state, aux);
    CAPTURE(seed);
    CAPTURE(res.stationarity_norm);
    CAPTURE(res.primal_infeas);
    CAPTURE(res.dual_infeas);
    CAPTURE(res.compl_slack);
    CHECK(res.max() < 1e-2);
  }
}

TEST_CASE("tighter inner tolerance does not lose objective") {
  const SystemConfig cfg = SystemConfig::uniform_noise(2, 2, 10.0);
  const ChannelSet ch = gen_channel(cfg, 7);
  const ProblemData pd = build_problem(ch, cfg);
  ViState st;
  st.beams = mrt_initial_beams(pd);
  st.common_alloc = VectorXd::Zero(2);
  st.epigraph_t = mmf_metric(pd, st.beams, st.common_alloc);
  st.dual = DualState::initial(2, pd.power_budget);
  const FpAuxiliaries aux = update_aux(pd, st.beams);

  EgConfig loose;
  loose.inner_tol = 1e-3;
  EgConfig tight;
  tight.inner_tol = 1e-5;
  tight.max_inner_iters = 20000;
  const SubproblemResult a = solve_subproblem(pd, st, aux, loose);
  const SubproblemResult b = solve_subproblem(pd, st, aux, tight);
  const double obj_a = mmf_metric(pd, a.state.beams, a.state.common_alloc);
  const double obj_b = mmf_metric(pd, b.state.beams, b.state.common_alloc);
  CHECK(obj_b >= obj_a - 1e-4);
}

TEST_CASE("divergence is detected and reported") {
  const ProblemData pd = random_problem(2, 2, 99);
  ViState st = random_state(pd, 99);
  st.beams *= std::numeric_limits<double>::quiet_NaN();
  EgConfig cfg;
  CHECK_THROWS_AS(
      solve_subproblem(pd, st, update_aux(pd, mrt_initial_beams(pd)), cfg),
      DivergenceError);
}
