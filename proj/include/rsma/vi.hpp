#pragma once

#include <utility>

#include "rsma/problem.hpp"
#include "rsma/types.hpp"

namespace rsma {

// Variational-inequality view of the dual saddle problem. The primal stack y
// splits the complex beams into real and imaginary parts,
//   y = [Re p_c; Im p_c; Re p_1..K; Im p_1..K; c; t],
// the dual stack is z = [lambda; rho; mu; omega], and x = [y; z]. Without the
// common stream the p_c, c, rho and mu blocks are absent. The beam blocks use
// the factor-2 Wirtinger convention: the y-gradient of L equals 2 dL/dp^* per
// beam, so a step of alpha on the real stack reproduces p + 2 alpha dL/dp^*.
struct ViLayout {
  int dim = 0;   // beam length N
  int users = 0; // K
  bool has_common = true;

  static ViLayout of(const ProblemData& pd) {
    return ViLayout{pd.dim(), pd.num_users(), pd.has_common};
  }
  int y_dim() const {
    return has_common ? 2 * dim * (users + 1) + users + 1 : 2 * dim * users + 1;
  }
  int z_dim() const { return has_common ? 3 * users + 1 : users + 1; }
  int x_dim() const { return y_dim() + z_dim(); }
};

struct ViState {
  MatrixXcd beams;  // N x (K+1); column 0 stays zero when has_common is false
  VectorXd common_alloc;
  double epigraph_t = 0.0;
  DualState dual;
};

VectorXd pack(const ViLayout& layout, const ViState& state);
ViState unpack(const ViLayout& layout, const VectorXd& x);

/// Elementwise max(0, .) on the dual block; the primal block is untouched.
VectorXd project_dual(const ViLayout& layout, const VectorXd& x);

/// h(x) = [-dL/dy; +dL/dz] at fixed auxiliaries; monotone on {z >= 0}.
VectorXd h_map(const ProblemData& pd, const FpAuxiliaries& aux,
               const VectorXd& x);

/// Prediction x_bar = Proj(x - alpha h(x)), correction
/// x_next = Proj(x - alpha h(x_bar)). Returns (x_next, x_bar).
std::pair<VectorXd, VectorXd> eg_step(const ProblemData& pd,
                                      const FpAuxiliaries& aux,
                                      const VectorXd& x, double alpha);

/// Khobotov rule: alpha' = beta ||x - x_bar|| / ||h(x) - h(x_bar)||, capped at
/// alpha_init; returns alpha_init when the denominator vanishes.
double khobotov_alpha(const ProblemData& pd, const FpAuxiliaries& aux,
                      const VectorXd& x, const VectorXd& x_bar,
                      double alpha_init, double beta);

}  // namespace rsma
