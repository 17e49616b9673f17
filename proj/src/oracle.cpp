#include "rsma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "rsma/model.hpp"
#include "rsma/vi.hpp"

namespace rsma {

VectorXd optimal_c_given_P(const VectorXd& private_rates, double common_pool) {
  const int users = static_cast<int>(private_rates.size());
  if ((private_rates.array() < 0.0).any() || common_pool < 0.0)
    throw std::invalid_argument("rates and pool must be nonnegative");

  // Level-filling: raise the worst users to a common level L with
  // sum_k max(0, L - r_k) = pool. Walking the sorted rates finds the unique
  // valid segment.
  std::vector<double> sorted(private_rates.data(),
                             private_rates.data() + users);
  std::sort(sorted.begin(), sorted.end());
  double level = sorted.front();
  double prefix = 0.0;
  for (int i = 1; i <= users; ++i) {
    prefix += sorted[i - 1];
    const double candidate = (common_pool + prefix) / i;
    if (i == users || candidate <= sorted[i]) {
      level = candidate;
      break;
    }
  }
  return (level - private_rates.array()).max(0.0).matrix();
}

FdCheckResult fd_gradient_check(const std::function<double(const VectorXd&)>& eval_fn,
                                const VectorXd& point, const VectorXd& analytic,
                                double step, double tolerance) {
  const int dim = static_cast<int>(point.size());
  VectorXd fd(dim);
  VectorXd x = point;
  for (int i = 0; i < dim; ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = eval_fn(x);
    x[i] = saved - step;
    const double down = eval_fn(x);
    x[i] = saved;
    fd[i] = (up - down) / (2.0 * step);
  }
  // Per-entry deviation over the gradient scale, floored to avoid blowups at
  // zero-gradient points.
  const double scale = std::max({1e-8, fd.cwiseAbs().maxCoeff(),
                                 analytic.cwiseAbs().maxCoeff()});
  FdCheckResult result;
  for (int i = 0; i < dim; ++i) {
    const double rel = std::abs(fd[i] - analytic[i]) / scale;
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = i;
    }
  }
  result.pass = result.max_rel_error < tolerance;
  return result;
}

double KktResiduals::max() const {
  return std::max({stationarity_norm, primal_infeas, dual_infeas, compl_slack});
}

KktResiduals kkt_residuals(const ProblemData& pd, const ViState& state,
                           const FpAuxiliaries& aux) {
  const ViLayout layout = ViLayout::of(pd);
  const int users = pd.num_users();
  const VectorXd x = pack(layout, state);
  const VectorXd h = h_map(pd, aux, x);
  const Surrogates s = eval_surrogates(pd, state.beams, aux);

  KktResiduals res;
  res.stationarity_norm = h.head(layout.y_dim()).norm();

  const VectorXd slack_t = state.common_alloc + s.g_p -
                           VectorXd::Constant(users, state.epigraph_t);
  const double power_slack = pd.power_budget - eval_tx_power(pd, state.beams);
  double infeas = std::max(0.0, -slack_t.minCoeff());
  infeas = std::max(infeas, std::max(0.0, -power_slack));
  double compl_slack =
      (state.dual.lambda.array() * slack_t.array()).abs().maxCoeff();
  compl_slack = std::max(compl_slack, std::abs(state.dual.omega * power_slack));
  double dual_min = std::min(state.dual.lambda.minCoeff(), state.dual.omega);

  if (pd.has_common) {
    const VectorXd slack_rc =
        s.g_c - VectorXd::Constant(users, state.common_alloc.sum());
    infeas = std::max(infeas, std::max(0.0, -slack_rc.minCoeff()));
    infeas = std::max(infeas, std::max(0.0, -state.common_alloc.minCoeff()));
    compl_slack = std::max(
        compl_slack, (state.dual.rho.array() * slack_rc.array()).abs().maxCoeff());
    compl_slack = std::max(
        compl_slack,
        (state.dual.mu.array() * state.common_alloc.array()).abs().maxCoeff());
    dual_min = std::min({dual_min, state.dual.rho.minCoeff(),
                         state.dual.mu.minCoeff()});
  }
  res.primal_infeas = infeas;
  res.dual_infeas = std::max(0.0, -dual_min);
  res.compl_slack = compl_slack;
  return res;
}

KktResiduals kkt_residuals(const ChannelSet& ch, const SystemConfig& cfg,
                           const BeamformingState& bf, const FpAuxiliaries& aux,
                           const DualState& dual) {
  const ProblemData pd = build_problem(ch, cfg);
  ViState state;
  state.beams = bf.beams;
  state.common_alloc = bf.common_alloc;
  state.epigraph_t = bf.epigraph_t;
  state.dual = dual;
  return kkt_residuals(pd, state, aux);
}

namespace {

// PSD square root via eigendecomposition, clamping tiny negative eigenvalues.
MatrixXcd psd_sqrt(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  const VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

double instantaneous_rate(const ImperfectChannelSet& ics,
                          const BeamformingState& bf, const SystemConfig& cfg,
                          const VectorXcd& h, int k, Stream stream) {
  const int users = ics.num_users();
  double interference = cfg.noise_powers[k];
  for (int j = 1; j <= users; ++j) {
    if (stream == Stream::kPrivate && j == k + 1) continue;
    interference += std::norm(h.dot(bf.beams.col(j)));
  }
  const int signal_col = stream == Stream::kCommon ? 0 : k + 1;
  return std::log1p(std::norm(h.dot(bf.beams.col(signal_col))) / interference);
}

}  // namespace

McEstimate monte_carlo_ar(const ImperfectChannelSet& ics, const BeamformingState& bf,
                          const SystemConfig& cfg, int k, Stream stream,
                          int num_draws, std::uint64_t seed) {
  if (num_draws < 1) throw std::invalid_argument("num_draws must be >= 1");
  const int n = ics.num_tx_antennas();
  const MatrixXcd root = psd_sqrt(ics.error_covariances[k]);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);

  double sum = 0.0, sum_sq = 0.0;
  VectorXcd g(n);
  for (int d = 0; d < num_draws; ++d) {
    for (int i = 0; i < n; ++i)
      g[i] = Complex(normal(rng) * scale, normal(rng) * scale);
    const VectorXcd h = ics.estimates.col(k) + root * g;
    const double rate = instantaneous_rate(ics, bf, cfg, h, k, stream);
    sum += rate;
    sum_sq += rate * rate;
  }
  McEstimate est;
  est.mean = sum / num_draws;
  const double var =
      std::max(0.0, (sum_sq - sum * sum / num_draws) / std::max(1, num_draws - 1));
  est.std_error = std::sqrt(var / num_draws);
  return est;
}

McEstimate monte_carlo_ergodic_mmf(const ImperfectChannelSet& ics,
                                   const BeamformingState& bf,
                                   const SystemConfig& cfg, int num_draws,
                                   std::uint64_t seed) {
  if (num_draws < 1) throw std::invalid_argument("num_draws must be >= 1");
  const int users = ics.num_users();
  const int n = ics.num_tx_antennas();
  std::vector<MatrixXcd> roots;
  roots.reserve(users);
  for (int k = 0; k < users; ++k) roots.push_back(psd_sqrt(ics.error_covariances[k]));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);

  double sum = 0.0, sum_sq = 0.0;
  VectorXcd g(n);
  VectorXd rp(users), rc(users);
  for (int d = 0; d < num_draws; ++d) {
    for (int k = 0; k < users; ++k) {
      for (int i = 0; i < n; ++i)
        g[i] = Complex(normal(rng) * scale, normal(rng) * scale);
      const VectorXcd h = ics.estimates.col(k) + roots[k] * g;
      rc[k] = instantaneous_rate(ics, bf, cfg, h, k, Stream::kCommon);
      rp[k] = instantaneous_rate(ics, bf, cfg, h, k, Stream::kPrivate);
    }
    const VectorXd c = clip_common_alloc(bf.common_alloc, rc.minCoeff());
    const double mmf = (rp + c).minCoeff();
    sum += mmf;
    sum_sq += mmf * mmf;
  }
  McEstimate est;
  est.mean = sum / num_draws;
  const double var =
      std::max(0.0, (sum_sq - sum * sum / num_draws) / std::max(1, num_draws - 1));
  est.std_error = std::sqrt(var / num_draws);
  return est;
}

double grid_search_2user(const ChannelSet& ch, const SystemConfig& cfg,
                         GridDirections directions, double resolution) {
  if (ch.num_users() != 2)
    throw std::invalid_argument("grid search supports exactly two users");
  if (!(resolution > 0.0 && resolution <= 1.0))
    throw std::invalid_argument("resolution must be in (0, 1]");

  const VectorXcd h1 = ch.channels.col(0);
  const VectorXcd h2 = ch.channels.col(1);
  VectorXcd d1, d2;
  if (directions == GridDirections::kMrt) {
    d1 = h1.normalized();
    d2 = h2.normalized();
  } else {
    // Zero-forcing: project each channel off the other user's direction.
    const VectorXcd u2 = h2.normalized();
    const VectorXcd u1 = h1.normalized();
    d1 = h1 - u2 * u2.dot(h1);
    d2 = h2 - u1 * u1.dot(h2);
    // Colinear channels leave nothing orthogonal; fall back to MRT there.
    if (d1.norm() < 1e-12 || d2.norm() < 1e-12) {
      d1 = h1.normalized();
      d2 = h2.normalized();
    } else {
      d1.normalize();
      d2.normalize();
    }
  }
  VectorXcd dc = h1.normalized() + h2.normalized();
  if (dc.norm() < 1e-12) dc = h1.normalized();
  dc.normalize();

  const double budget = cfg.tx_power_budget;
  const int steps = static_cast<int>(std::round(1.0 / resolution));
  BeamformingState bf;
  bf.beams.resize(ch.num_tx_antennas(), 3);
  bf.common_alloc = VectorXd::Zero(2);

  double best = 0.0;
  for (int ic = 0; ic <= steps; ++ic) {
    const double qc = budget * ic / steps;
    for (int i1 = 0; ic + i1 <= steps; ++i1) {
      const double q1 = budget * i1 / steps;
      const double q2 = budget - qc - q1;
      bf.beams.col(0) = std::sqrt(qc) * dc;
      bf.beams.col(1) = std::sqrt(q1) * d1;
      bf.beams.col(2) = std::sqrt(q2) * d2;
      const RateVector rv = rates(ch, bf, cfg);
      const VectorXd c = optimal_c_given_P(rv.private_rates, rv.common_rate);
      best = std::max(best, (rv.private_rates + c).minCoeff());
    }
  }
  return best;
}

}  // namespace rsma
