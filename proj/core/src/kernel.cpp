#include "mixedergo/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixedergo/error.hpp"

namespace mixedergo {

namespace {

void require_variances(const DesignSummary& summary, const VarianceComponents& sigma2) {
  if (sigma2.sigma2_u.size() != static_cast<Eigen::Index>(summary.r)) {
    fail(Errc::dimension_mismatch, "need one variance per random-effect block");
  }
  if (!std::isfinite(sigma2.sigma2_e) || !sigma2.sigma2_u.allFinite()) {
    fail(Errc::non_finite, "variance components must be finite");
  }
  if (!sigma2.valid()) fail(Errc::singular_q, "variance components must be strictly positive");
}

void require_prior(const DesignSummary& summary, const PriorSpec& prior) {
  if (prior.a.size() != summary.r || prior.b.size() != summary.r) {
    fail(Errc::dimension_mismatch, "prior has " + std::to_string(prior.a.size()) +
                                       " block hyperparameters, design has " +
                                       std::to_string(summary.r) + " blocks");
  }
}

// Cholesky of Q, retried once with a small diagonal jitter.
Eigen::LLT<Matrix> factor_q(const Matrix& q) {
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-12 * q.trace() / static_cast<double>(q.rows());
  Matrix jittered = q;
  jittered.diagonal().array() += jitter;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success || !std::isfinite(jitter)) {
    fail(Errc::singular_q, "Q is not numerically positive definite");
  }
  return llt;
}

double sum_sq_residual(const GlmmDesign& design, const Vector& theta) {
  const Eigen::Index p = design.n_fixed();
  const Vector fitted = design.x() * theta.head(p) + design.z_times(theta.tail(design.n_random()));
  return (design.y() - fitted).squaredNorm();
}

}  // namespace

bool VarianceComponents::valid() const noexcept {
  if (!(sigma2_e > 0.0) || !std::isfinite(sigma2_e)) return false;
  for (Eigen::Index i = 0; i < sigma2_u.size(); ++i) {
    if (!(sigma2_u(i) > 0.0) || !std::isfinite(sigma2_u(i))) return false;
  }
  return true;
}

bool ParamState::valid(const DesignSummary& summary) const noexcept {
  return beta.size() == summary.p && u.size() == summary.q && beta.allFinite() &&
         u.allFinite() && sigma2.sigma2_u.size() == static_cast<Eigen::Index>(summary.r) &&
         sigma2.valid();
}

Matrix precision_q(const DesignSummary& summary, const VarianceComponents& sigma2) {
  require_variances(summary, sigma2);
  Matrix q = summary.ztz_tilde / sigma2.sigma2_e;
  for (std::size_t i = 0; i < summary.r; ++i) {
    q.diagonal().segment(summary.q_offsets[i], summary.q_sizes[i]).array() +=
        1.0 / sigma2.sigma2_u(static_cast<Eigen::Index>(i));
  }
  return q;
}

ThetaMoments theta_conditional_moments(const DesignSummary& summary, const GlmmDesign& design,
                                       const VarianceComponents& sigma2) {
  if (design.n_fixed() != summary.p || design.n_random() != summary.q) {
    fail(Errc::dimension_mismatch, "summary does not belong to this design");
  }
  const Eigen::Index p = summary.p;
  const Eigen::Index q = summary.q;
  const auto llt = factor_q(precision_q(summary, sigma2));
  const Matrix q_inv = llt.solve(Matrix::Identity(q, q));

  ThetaMoments out;
  out.mean.resize(p + q);
  const Vector u_mean = llt.solve(summary.ztilde_y) / sigma2.sigma2_e;
  out.mean.tail(q) = u_mean;
  out.mean.head(p) = summary.beta_ols - summary.r_coef * u_mean;

  const Matrix rq = summary.r_coef * q_inv;
  out.cov.resize(p + q, p + q);
  out.cov.topLeftCorner(p, p) = sigma2.sigma2_e * summary.xtx_inv + rq * summary.r_coef.transpose();
  out.cov.topRightCorner(p, q) = -rq;
  out.cov.bottomLeftCorner(q, p) = -rq.transpose();
  out.cov.bottomRightCorner(q, q) = q_inv;
  return out;
}

Vector sample_theta(const DesignSummary& summary, const GlmmDesign& design,
                    const VarianceComponents& sigma2, RngStream& rng) {
  if (design.n_fixed() != summary.p || design.n_random() != summary.q) {
    fail(Errc::dimension_mismatch, "summary does not belong to this design");
  }
  const Eigen::Index p = summary.p;
  const Eigen::Index q = summary.q;
  const auto llt = factor_q(precision_q(summary, sigma2));

  // u = Q^{-1} b / s2_e + L^{-T} z has covariance (L L^T)^{-1} = Q^{-1}.
  Vector z(q);
  for (Eigen::Index k = 0; k < q; ++k) z(k) = rng.normal();
  Vector u = llt.solve(summary.ztilde_y) / sigma2.sigma2_e;
  u.noalias() += llt.matrixU().solve(z);

  // beta | u ~ N((X^TX)^{-1} X^T (y - Z u), s2_e (X^TX)^{-1}).
  Vector zb(p);
  for (Eigen::Index k = 0; k < p; ++k) zb(k) = rng.normal();
  Vector theta(p + q);
  theta.head(p) = summary.beta_ols - summary.r_coef * u +
                  std::sqrt(sigma2.sigma2_e) * (summary.xtx_inv_chol * zb);
  theta.tail(q) = u;
  return theta;
}

bool in_null_set(const DesignSummary& summary, const PriorSpec& prior, const Vector& theta) {
  require_prior(summary, prior);
  for (std::size_t i = 0; i < summary.r; ++i) {
    if (prior.b[i] != 0.0) continue;
    const double norm2 =
        theta.segment(summary.p + summary.q_offsets[i], summary.q_sizes[i]).squaredNorm();
    if (norm2 == 0.0) return true;
  }
  return false;
}

VarianceComponents sample_sigma2(const DesignSummary& summary, const GlmmDesign& design,
                                 const PriorSpec& prior, const Vector& theta, RngStream& rng) {
  require_prior(summary, prior);
  if (theta.size() != summary.p + summary.q) fail(Errc::dimension_mismatch, "theta has wrong length");
  if (!theta.allFinite()) fail(Errc::non_finite, "theta must be finite");

  VarianceComponents out;
  out.sigma2_u.resize(static_cast<Eigen::Index>(summary.r));

  if (in_null_set(summary, prior, theta)) {
    out.sigma2_e = rng.inverse_gamma(1.0, 1.0);
    for (Eigen::Index i = 0; i < out.sigma2_u.size(); ++i) {
      out.sigma2_u(i) = rng.inverse_gamma(1.0, 1.0);
    }
    return out;
  }

  const double shape_e = 0.5 * static_cast<double>(summary.n_obs) + prior.a_e;
  const double rate_e = prior.b_e + 0.5 * sum_sq_residual(design, theta);
  if (!(shape_e > 0.0) || !(rate_e > 0.0)) {
    fail(Errc::invalid_shape, "error-variance conditional has shape " + std::to_string(shape_e) +
                                  ", rate " + std::to_string(rate_e));
  }
  out.sigma2_e = rng.inverse_gamma(shape_e, rate_e);

  for (std::size_t i = 0; i < summary.r; ++i) {
    const double shape = 0.5 * static_cast<double>(summary.q_sizes[i]) + prior.a[i];
    const double rate =
        prior.b[i] +
        0.5 * theta.segment(summary.p + summary.q_offsets[i], summary.q_sizes[i]).squaredNorm();
    if (!(shape > 0.0) || !(rate > 0.0)) {
      fail(Errc::invalid_shape, "block " + std::to_string(i + 1) + " conditional has shape " +
                                    std::to_string(shape) + ", rate " + std::to_string(rate));
    }
    out.sigma2_u(static_cast<Eigen::Index>(i)) = rng.inverse_gamma(shape, rate);
  }
  return out;
}

double inverse_gamma_logpdf(double v, double c, double d) {
  if (!(c > 0.0) || !(d > 0.0) || !std::isfinite(c) || !std::isfinite(d)) {
    fail(Errc::invalid_shape, "inverse gamma needs c > 0 and d > 0");
  }
  if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
  return c * std::log(d) - std::lgamma(c) - (c + 1.0) * std::log(v) - d / v;
}

ParamState gibbs_step(const ParamState& state, const DesignSummary& summary,
                      const GlmmDesign& design, const PriorSpec& prior, RngStream& rng) {
  ParamState next;
  const Vector theta = sample_theta(summary, design, state.sigma2, rng);
  next.beta = theta.head(summary.p);
  next.u = theta.tail(summary.q);
  next.sigma2 = sample_sigma2(summary, design, prior, theta, rng);
  return next;
}

double log_unnormalized_posterior(const GlmmDesign& design, const PriorSpec& prior,
                                  const Vector& theta, const VarianceComponents& sigma2) {
  const auto r = design.n_blocks();
  if (prior.a.size() != r || prior.b.size() != r ||
      sigma2.sigma2_u.size() != static_cast<Eigen::Index>(r) ||
      theta.size() != design.n_fixed() + design.n_random()) {
    fail(Errc::dimension_mismatch, "theta, sigma2 and prior must match the design");
  }
  if (!theta.allFinite() || !std::isfinite(sigma2.sigma2_e) || !sigma2.sigma2_u.allFinite()) {
    fail(Errc::non_finite, "theta and sigma2 must be finite");
  }
  if (!sigma2.valid()) fail(Errc::domain_error, "variance components must be positive");

  constexpr double log_2pi = 1.8378770664093454836;
  const auto n = static_cast<double>(design.n_obs());
  const double se = sigma2.sigma2_e;
  double lp = -0.5 * n * (log_2pi + std::log(se)) - 0.5 * sum_sq_residual(design, theta) / se;
  lp += -(prior.a_e + 1.0) * std::log(se) - prior.b_e / se;
  for (std::size_t i = 0; i < r; ++i) {
    const double su = sigma2.sigma2_u(static_cast<Eigen::Index>(i));
    const auto qi = static_cast<double>(design.block_size(i));
    const double u2 =
        theta.segment(design.n_fixed() + design.block_offset(i), design.block_size(i))
            .squaredNorm();
    lp += -0.5 * qi * (log_2pi + std::log(su)) - 0.5 * u2 / su;
    lp += -(prior.a[i] + 1.0) * std::log(su) - prior.b[i] / su;
  }
  return lp;
}

ParamState default_initial_state(const DesignSummary& summary) {
  ParamState s;
  s.u = Vector::Ones(summary.q);
  s.beta = summary.beta_ols;
  s.sigma2.sigma2_e = 1.0;
  s.sigma2.sigma2_u = Vector::Ones(static_cast<Eigen::Index>(summary.r));
  return s;
}

Vector theta_of(const ParamState& state) {
  Vector theta(state.beta.size() + state.u.size());
  theta << state.beta, state.u;
  return theta;
}

}  // namespace mixedergo
