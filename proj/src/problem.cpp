#include "rsma/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace rsma {

namespace {

constexpr double kDegenerateDir = 1e-14;

bool is_exact_identity(const MatrixXcd& m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) {
      const Complex want = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      if (m(i, j) != want) return false;
    }
  return true;
}

// R_k proportional to the metric keeps the gradient cost low; detect the
// isotropic generator output exactly so kappa = 0 reduces to the perfect
// pipeline bit for bit.
void attach_error_model(ProblemData& pd, const ImperfectChannelSet& ics,
                        bool lowdim) {
  const int users = ics.num_users();
  const int n = ics.num_tx_antennas();
  VectorXd tau(users);
  bool isotropic = true;
  for (int k = 0; k < users && isotropic; ++k) {
    const MatrixXcd& r = ics.error_covariances[k];
    if (r.rows() != n || r.cols() != n)
      throw std::invalid_argument("error covariance dimension mismatch");
    tau[k] = r(0, 0).real();
    isotropic = (r - tau[k] * MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <=
                1e-14 * std::max(1.0, std::abs(tau[k]));
  }
  if (isotropic) {
    if ((tau.array() == 0.0).all()) return;  // exact perfect-CSIT reduction
    pd.err_scale = tau;
  } else {
    pd.err_cov.reserve(users);
    for (int k = 0; k < users; ++k) {
      // In the low-dimensional space R_k becomes H^H R_k H.
      if (lowdim)
        pd.err_cov.push_back(ics.estimates.adjoint() *
                             (ics.error_covariances[k] * ics.estimates));
      else
        pd.err_cov.push_back(ics.error_covariances[k]);
    }
  }
}

}  // namespace

ProblemData build_problem(const ChannelSet& ch, const SystemConfig& cfg,
                          bool with_common) {
  cfg.validate();
  if (ch.num_users() != cfg.num_users || ch.num_tx_antennas() != cfg.num_tx_antennas)
    throw std::invalid_argument("channel dimension mismatch");
  ProblemData pd;
  pd.signal = ch.channels;
  pd.mrt_dirs = ch.channels;
  pd.metric = MatrixXcd();
  pd.identity_metric = true;
  pd.noise = cfg.noise_powers;
  pd.power_budget = cfg.tx_power_budget;
  pd.has_common = with_common;
  return pd;
}

ProblemData build_problem(const ImperfectChannelSet& ics, const SystemConfig& cfg,
                          bool with_common) {
  ChannelSet est;
  est.channels = ics.estimates;
  ProblemData pd = build_problem(est, cfg, with_common);
  attach_error_model(pd, ics, false);
  return pd;
}

ProblemData build_lowdim_problem(const ChannelSet& ch, const SystemConfig& cfg,
                                 bool with_common) {
  cfg.validate();
  if (ch.num_users() != cfg.num_users || ch.num_tx_antennas() != cfg.num_tx_antennas)
    throw std::invalid_argument("channel dimension mismatch");
  const int users = ch.num_users();
  ProblemData pd;
  pd.metric = ch.channels.adjoint() * ch.channels;  // G = H^H H
  pd.signal = pd.metric;                             // g_k is the k-th column
  pd.mrt_dirs = MatrixXcd::Identity(users, users);   // q = e_k maps to p = h_k
  pd.identity_metric = is_exact_identity(pd.metric);
  pd.noise = cfg.noise_powers;
  pd.power_budget = cfg.tx_power_budget;
  pd.has_common = with_common;
  return pd;
}

ProblemData build_lowdim_problem(const ImperfectChannelSet& ics,
                                 const SystemConfig& cfg, bool with_common) {
  ChannelSet est;
  est.channels = ics.estimates;
  ProblemData pd = build_lowdim_problem(est, cfg, with_common);
  attach_error_model(pd, ics, true);
  return pd;
}

LowDimProblem build_lowdim(const ChannelSet& ch) {
  LowDimProblem ld;
  ld.gram = ch.channels.adjoint() * ch.channels;
  ld.weights = MatrixXcd::Zero(ch.num_users(), ch.num_users() + 1);
  return ld;
}

BeamformingState recover_beams(const ChannelSet& ch, const MatrixXcd& weights) {
  if (weights.rows() != ch.num_users())
    throw std::invalid_argument("weight matrix must have K rows");
  BeamformingState bf;
  bf.beams = ch.channels * weights;
  bf.common_alloc = VectorXd::Zero(ch.num_users());
  bf.epigraph_t = 0.0;
  return bf;
}

namespace {

// Per-user quadratic forms shared by the rate, surrogate and Lagrangian
// evaluations: inner products W = A^H P, the per-beam metric powers, and the
// error-leakage terms.
struct Quadratics {
  MatrixXcd inner;    // K x (K+1), (k, j) = a_k^H p_j (column 0 = common)
  VectorXd beam_pow;  // K+1, p_j^H M p_j
  MatrixXd err_quad;  // K x (K+1), p_j^H R_k p_j (zero when perfect)
  VectorXd s_full;    // K, noise + sum over private beams of |a^H p|^2 + err
};

Quadratics compute_quadratics(const ProblemData& pd, const MatrixXcd& beams) {
  const int users = pd.num_users();
  Quadratics q;
  q.inner = pd.signal.adjoint() * beams;
  if (pd.identity_metric)
    q.beam_pow = beams.colwise().squaredNorm().transpose();
  else
    q.beam_pow = (beams.adjoint() * (pd.metric * beams)).diagonal().real();

  if (pd.err_scale.size() > 0) {
    q.err_quad = pd.err_scale * q.beam_pow.transpose();
  } else if (!pd.err_cov.empty()) {
    q.err_quad.resize(users, users + 1);
    for (int k = 0; k < users; ++k)
      q.err_quad.row(k) =
          (beams.adjoint() * (pd.err_cov[k] * beams)).diagonal().real().transpose();
  } else {
    q.err_quad = MatrixXd::Zero(users, users + 1);
  }

  q.s_full.resize(users);
  for (int k = 0; k < users; ++k) {
    double s = pd.noise[k];
    for (int j = 1; j <= users; ++j)
      s += std::norm(q.inner(k, j)) + q.err_quad(k, j);
    q.s_full[k] = s;
  }
  return q;
}

}  // namespace

EffRates eval_rates(const ProblemData& pd, const MatrixXcd& beams) {
  const Quadratics q = compute_quadratics(pd, beams);
  const int users = pd.num_users();
  EffRates r;
  r.common.resize(users);
  r.priv.resize(users);
  for (int k = 0; k < users; ++k) {
    const double sig_c = std::norm(q.inner(k, 0));
    const double denom_c = q.s_full[k] + q.err_quad(k, 0);
    r.common[k] = std::log1p(sig_c / denom_c);
    const double sig_p = std::norm(q.inner(k, k + 1));
    r.priv[k] = std::log1p(sig_p / (q.s_full[k] - sig_p));
  }
  r.common_min = r.common.minCoeff();
  return r;
}

double eval_tx_power(const ProblemData& pd, const MatrixXcd& beams) {
  if (pd.identity_metric) return beams.squaredNorm();
  return (beams.adjoint() * (pd.metric * beams)).trace().real();
}

MatrixXcd power_normalized(const ProblemData& pd, const MatrixXcd& beams) {
  const double pow = eval_tx_power(pd, beams);
  if (pow <= 0.0)
    throw std::domain_error("cannot normalize an all-zero beam matrix");
  return beams * std::sqrt(pd.power_budget / pow);
}

VectorXd clip_common_alloc(const VectorXd& common_alloc, double common_rate) {
  VectorXd c = common_alloc.cwiseMax(0.0);
  const double total = c.sum();
  if (total > common_rate) c *= common_rate / total;
  return c;
}

double mmf_metric(const ProblemData& pd, const MatrixXcd& beams,
                  const VectorXd& common_alloc) {
  const EffRates r = eval_rates(pd, beams);
  if (!pd.has_common) return r.priv.minCoeff();
  const VectorXd c = clip_common_alloc(common_alloc, r.common_min);
  return (r.priv + c).minCoeff();
}

FpAuxiliaries update_aux(const ProblemData& pd, const MatrixXcd& beams) {
  const Quadratics q = compute_quadratics(pd, beams);
  const int users = pd.num_users();
  FpAuxiliaries aux;
  aux.theta_c.resize(users);
  aux.theta_p.resize(users);
  aux.phi_c.resize(users);
  aux.phi_p.resize(users);
  for (int k = 0; k < users; ++k) {
    const double sig_c = std::norm(q.inner(k, 0));
    const double c_full = q.s_full[k] + q.err_quad(k, 0) + sig_c;
    const double sig_p = std::norm(q.inner(k, k + 1));
    aux.theta_c[k] = sig_c / (c_full - sig_c);
    aux.theta_p[k] = sig_p / (q.s_full[k] - sig_p);
    aux.phi_c[k] = std::sqrt(1.0 + aux.theta_c[k]) * q.inner(k, 0) / c_full;
    aux.phi_p[k] = std::sqrt(1.0 + aux.theta_p[k]) * q.inner(k, k + 1) / q.s_full[k];
  }
  return aux;
}

Surrogates eval_surrogates(const ProblemData& pd, const MatrixXcd& beams,
                           const FpAuxiliaries& aux) {
  const Quadratics q = compute_quadratics(pd, beams);
  const int users = pd.num_users();
  Surrogates s;
  s.g_c.resize(users);
  s.g_p.resize(users);
  for (int k = 0; k < users; ++k) {
    const double c_full = q.s_full[k] + q.err_quad(k, 0) + std::norm(q.inner(k, 0));
    s.g_c[k] = std::log1p(aux.theta_c[k]) - aux.theta_c[k] +
               2.0 * std::sqrt(1.0 + aux.theta_c[k]) *
                   std::real(std::conj(aux.phi_c[k]) * q.inner(k, 0)) -
               std::norm(aux.phi_c[k]) * c_full;
    s.g_p[k] = std::log1p(aux.theta_p[k]) - aux.theta_p[k] +
               2.0 * std::sqrt(1.0 + aux.theta_p[k]) *
                   std::real(std::conj(aux.phi_p[k]) * q.inner(k, k + 1)) -
               std::norm(aux.phi_p[k]) * q.s_full[k];
  }
  return s;
}

double lagrangian_value(const ProblemData& pd, const MatrixXcd& beams,
                        const VectorXd& common_alloc, double epigraph_t,
                        const DualState& dual, const FpAuxiliaries& aux) {
  const Surrogates s = eval_surrogates(pd, beams, aux);
  const int users = pd.num_users();
  double value = epigraph_t;
  value -= dual.lambda.dot(
      (VectorXd::Constant(users, epigraph_t) - common_alloc - s.g_p).eval());
  if (pd.has_common) {
    const double alloc_sum = common_alloc.sum();
    value -= dual.rho.dot((VectorXd::Constant(users, alloc_sum) - s.g_c).eval());
    value += dual.mu.dot(common_alloc);
  }
  value -= dual.omega * (eval_tx_power(pd, beams) - pd.power_budget);
  return value;
}

MatrixXcd beam_gradient(const ProblemData& pd, const MatrixXcd& beams,
                        const DualState& dual, const FpAuxiliaries& aux) {
  const int users = pd.num_users();
  const MatrixXcd inner = pd.signal.adjoint() * beams;  // K x (K+1)

  // Coefficients of the cross terms T_j = a_j a_j^H + R_j in each beam's
  // gradient: rho_j |phi_c,j|^2 for the common beam, plus lambda_j |phi_p,j|^2
  // for the private beams.
  VectorXd coef_c = VectorXd::Zero(users);
  if (pd.has_common)
    coef_c = (dual.rho.array() * aux.phi_c.array().abs2()).matrix();
  const VectorXd coef_p =
      (dual.lambda.array() * aux.phi_p.array().abs2()).matrix() + coef_c;

  MatrixXcd grad = MatrixXcd::Zero(pd.dim(), users + 1);

  // Linear (signal) parts.
  if (pd.has_common) {
    const VectorXcd w_c =
        (aux.phi_c.array() *
         (dual.rho.array() * (1.0 + aux.theta_c.array()).sqrt()))
            .matrix();
    grad.col(0) = pd.signal * w_c;
  }
  const VectorXcd w_p =
      (aux.phi_p.array() *
       (dual.lambda.array() * (1.0 + aux.theta_p.array()).sqrt()))
          .matrix();
  for (int k = 0; k < users; ++k) grad.col(k + 1) = w_p[k] * pd.signal.col(k);

  // Quadratic (interference) parts: sum_j coef_j a_j a_j^H p per beam.
  if (pd.has_common) {
    const VectorXcd scaled = (inner.col(0).array() * coef_c.array()).matrix();
    grad.col(0) -= pd.signal * scaled;
  }
  {
    MatrixXcd scaled = inner.rightCols(users);
    scaled.array().colwise() *= coef_p.array().cast<Complex>();
    grad.rightCols(users) -= pd.signal * scaled;
  }

  // Error-leakage and power terms, both metric-weighted.
  const auto metric_apply = [&](const MatrixXcd& cols) -> MatrixXcd {
    return pd.identity_metric ? cols : MatrixXcd(pd.metric * cols);
  };
  if (pd.err_scale.size() > 0) {
    const double tc = pd.has_common ? coef_c.dot(pd.err_scale) : 0.0;
    const double tp = coef_p.dot(pd.err_scale);
    if (pd.has_common && tc != 0.0)
      grad.col(0) -= tc * metric_apply(beams.col(0));
    if (tp != 0.0)
      grad.rightCols(users) -= tp * metric_apply(beams.rightCols(users));
  } else if (!pd.err_cov.empty()) {
    for (int j = 0; j < users; ++j) {
      if (pd.has_common && coef_c[j] != 0.0)
        grad.col(0) -= coef_c[j] * (pd.err_cov[j] * beams.col(0));
      if (coef_p[j] != 0.0)
        grad.rightCols(users) -= coef_p[j] * (pd.err_cov[j] * beams.rightCols(users));
    }
  }
  if (pd.has_common) grad.col(0) -= dual.omega * metric_apply(beams.col(0));
  grad.rightCols(users) -= dual.omega * metric_apply(beams.rightCols(users));
  return grad;
}

MatrixXcd mrt_initial_beams(const ProblemData& pd) {
  const int users = pd.num_users();
  const int n = pd.dim();
  const auto metric_norm = [&](const VectorXcd& v) {
    if (pd.identity_metric) return v.norm();
    return std::sqrt(std::real(v.dot(pd.metric * v)));
  };

  MatrixXcd beams = MatrixXcd::Zero(n, users + 1);
  const double private_power =
      pd.has_common ? pd.power_budget / 2.0 : pd.power_budget;
  VectorXcd dir_sum = VectorXcd::Zero(n);
  for (int k = 0; k < users; ++k) {
    const VectorXcd dir = pd.mrt_dirs.col(k);
    const double norm = metric_norm(dir);
    if (norm <= kDegenerateDir)
      throw std::domain_error("degenerate channel direction in initialization");
    beams.col(k + 1) = std::sqrt(private_power / users) * dir / norm;
    dir_sum += dir / norm;
  }
  if (pd.has_common) {
    double sum_norm = metric_norm(dir_sum);
    if (sum_norm <= kDegenerateDir) {
      dir_sum = pd.mrt_dirs.col(0);  // cancelling directions; fall back to user 1
      sum_norm = metric_norm(dir_sum);
    }
    beams.col(0) = std::sqrt(pd.power_budget / 2.0) * dir_sum / sum_norm;
  }
  return beams;
}

}  // namespace rsma
