#pragma once

#include <vector>

#include "mixedergo/model.hpp"
#include "mixedergo/rng.hpp"

namespace mixedergo {

/// Variance components (s2_e, s2_u1, ..., s2_ur).
struct VarianceComponents {
  double sigma2_e = 1.0;
  Vector sigma2_u;

  bool valid() const noexcept;
};

/// Gibbs state: theta = (beta, u) plus the variance components.
struct ParamState {
  Vector beta;
  Vector u;
  VarianceComponents sigma2;

  /// All variances strictly positive and finite, vectors sized for `summary`.
  bool valid(const DesignSummary& summary) const noexcept;
};

/// Mean m and covariance V of theta | sigma^2, y (normal).
struct ThetaMoments {
  Vector mean;  // (beta, u), length p + q
  Matrix cov;   // (p + q) x (p + q)
};

/// Q = (s2_e)^{-1} Z^T (I - P_X) Z + D^{-1}.
Matrix precision_q(const DesignSummary& summary, const VarianceComponents& sigma2);

/// Closed-form conditional moments:
///   m = ((X^TX)^{-1}X^T(I - s2_e^{-1} Z Q^{-1} Z^T(I-P_X)) y ; s2_e^{-1} Q^{-1} Z^T(I-P_X) y)
///   V = [s2_e (X^TX)^{-1} + R Q^{-1} R^T, -R Q^{-1}; -Q^{-1} R^T, Q^{-1}]
ThetaMoments theta_conditional_moments(const DesignSummary& summary, const GlmmDesign& design,
                                       const VarianceComponents& sigma2);

/// Draws theta ~ N(m, V) by composition: u from its marginal through a
/// Cholesky factor of Q, then beta | u.
Vector sample_theta(const DesignSummary& summary, const GlmmDesign& design,
                    const VarianceComponents& sigma2, RngStream& rng);

/// True when some block with b_i = 0 has u_i exactly zero (the null set on
/// which the variance conditional falls back to IG(1, 1) components).
bool in_null_set(const DesignSummary& summary, const PriorSpec& prior, const Vector& theta);

/// Draws sigma^2 | theta, y as independent inverted gammas.
VarianceComponents sample_sigma2(const DesignSummary& summary, const GlmmDesign& design,
                                 const PriorSpec& prior, const Vector& theta, RngStream& rng);

/// log f_IG(v; c, d); -inf for v <= 0. Throws Errc::invalid_shape unless c, d > 0.
double inverse_gamma_logpdf(double v, double c, double d);

/// One Gibbs transition: theta | sigma^2 first, then sigma^2 | theta.
ParamState gibbs_step(const ParamState& state, const DesignSummary& summary,
                      const GlmmDesign& design, const PriorSpec& prior, RngStream& rng);

/// log pi*(theta, sigma^2 | y) = log N_N(y; W theta, s2_e I) + log N_q(u; 0, D)
///                              + log p(beta, sigma^2; a, b).
double log_unnormalized_posterior(const GlmmDesign& design, const PriorSpec& prior,
                                  const Vector& theta, const VarianceComponents& sigma2);

/// Least-squares beta, u = 1 and unit variances. u = 0 would sit in the null
/// set whenever some b_i = 0.
ParamState default_initial_state(const DesignSummary& summary);

/// Concatenates (beta, u).
Vector theta_of(const ParamState& state);

}  // namespace mixedergo
