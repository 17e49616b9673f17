#include "rsma/vi.hpp"

#include <cmath>

namespace rsma {

VectorXd pack(const ViLayout& layout, const ViState& state) {
  const int n = layout.dim;
  const int users = layout.users;
  VectorXd x(layout.x_dim());
  int pos = 0;
  const auto put_beam = [&](const VectorXcd& p, int re_at, int im_at) {
    x.segment(re_at, n) = p.real();
    x.segment(im_at, n) = p.imag();
  };
  if (layout.has_common) {
    put_beam(state.beams.col(0), pos, pos + n);
    pos += 2 * n;
  }
  for (int k = 0; k < users; ++k)
    put_beam(state.beams.col(k + 1), pos + k * n, pos + users * n + k * n);
  pos += 2 * n * users;
  if (layout.has_common) {
    x.segment(pos, users) = state.common_alloc;
    pos += users;
  }
  x[pos++] = state.epigraph_t;
  x.segment(pos, users) = state.dual.lambda;
  pos += users;
  if (layout.has_common) {
    x.segment(pos, users) = state.dual.rho;
    pos += users;
    x.segment(pos, users) = state.dual.mu;
    pos += users;
  }
  x[pos++] = state.dual.omega;
  return x;
}

ViState unpack(const ViLayout& layout, const VectorXd& x) {
  const int n = layout.dim;
  const int users = layout.users;
  ViState state;
  state.beams = MatrixXcd::Zero(n, users + 1);
  int pos = 0;
  const auto get_beam = [&](int re_at, int im_at) {
    VectorXcd p(n);
    p.real() = x.segment(re_at, n);
    p.imag() = x.segment(im_at, n);
    return p;
  };
  if (layout.has_common) {
    state.beams.col(0) = get_beam(pos, pos + n);
    pos += 2 * n;
  }
  for (int k = 0; k < users; ++k)
    state.beams.col(k + 1) = get_beam(pos + k * n, pos + users * n + k * n);
  pos += 2 * n * users;
  if (layout.has_common) {
    state.common_alloc = x.segment(pos, users);
    pos += users;
  } else {
    state.common_alloc = VectorXd::Zero(users);
  }
  state.epigraph_t = x[pos++];
  state.dual.lambda = x.segment(pos, users);
  pos += users;
  if (layout.has_common) {
    state.dual.rho = x.segment(pos, users);
    pos += users;
    state.dual.mu = x.segment(pos, users);
    pos += users;
  } else {
    state.dual.rho = VectorXd::Zero(users);
    state.dual.mu = VectorXd::Zero(users);
  }
  state.dual.omega = x[pos++];
  return state;
}

VectorXd project_dual(const ViLayout& layout, const VectorXd& x) {
  VectorXd out = x;
  out.tail(layout.z_dim()) = out.tail(layout.z_dim()).cwiseMax(0.0);
  return out;
}

VectorXd h_map(const ProblemData& pd, const FpAuxiliaries& aux,
               const VectorXd& x) {
  const ViLayout layout = ViLayout::of(pd);
  const ViState state = unpack(layout, x);
  const int n = layout.dim;
  const int users = layout.users;

  const MatrixXcd bgrad = beam_gradient(pd, state.beams, state.dual, aux);
  const Surrogates s = eval_surrogates(pd, state.beams, aux);

  VectorXd h(layout.x_dim());
  int pos = 0;
  // Primal block: -dL/dy with the factor-2 real-stack convention.
  const auto put_beam_grad = [&](const VectorXcd& g, int re_at, int im_at) {
    h.segment(re_at, n) = -2.0 * g.real();
    h.segment(im_at, n) = -2.0 * g.imag();
  };
  if (layout.has_common) {
    put_beam_grad(bgrad.col(0), pos, pos + n);
    pos += 2 * n;
  }
  for (int k = 0; k < users; ++k)
    put_beam_grad(bgrad.col(k + 1), pos + k * n, pos + users * n + k * n);
  pos += 2 * n * users;
  if (layout.has_common) {
    // dL/dc_k = lambda_k + mu_k - sum_j rho_j
    h.segment(pos, users) =
        -(state.dual.lambda + state.dual.mu -
          VectorXd::Constant(users, state.dual.rho.sum()));
    pos += users;
  }
  // dL/dt = 1 - sum_j lambda_j
  h[pos++] = -(1.0 - state.dual.lambda.sum());

  // Dual block: +dL/dz.
  h.segment(pos, users) = -(VectorXd::Constant(users, state.epigraph_t) -
                            state.common_alloc - s.g_p);
  pos += users;
  if (layout.has_common) {
    const double alloc_sum = state.common_alloc.sum();
    h.segment(pos, users) = -(VectorXd::Constant(users, alloc_sum) - s.g_c);
    pos += users;
    h.segment(pos, users) = state.common_alloc;
    pos += users;
  }
  h[pos++] = -(eval_tx_power(pd, state.beams) - pd.power_budget);
  return h;
}

std::pair<VectorXd, VectorXd> eg_step(const ProblemData& pd,
                                      const FpAuxiliaries& aux,
                                      const VectorXd& x, double alpha) {
  const ViLayout layout = ViLayout::of(pd);
  const VectorXd x_bar = project_dual(layout, x - alpha * h_map(pd, aux, x));
  const VectorXd x_next = project_dual(layout, x - alpha * h_map(pd, aux, x_bar));
  return {x_next, x_bar};
}

double khobotov_alpha(const ProblemData& pd, const FpAuxiliaries& aux,
                      const VectorXd& x, const VectorXd& x_bar,
                      double alpha_init, double beta) {
  const double dh = (h_map(pd, aux, x) - h_map(pd, aux, x_bar)).norm();
  if (dh == 0.0) return alpha_init;
  return std::min(beta * (x - x_bar).norm() / dh, alpha_init);
}

}  // namespace rsma
