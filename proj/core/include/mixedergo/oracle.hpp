#pragma once

#include <cstdint>
#include <vector>

#include "mixedergo/ergodicity.hpp"
#include "mixedergo/kernel.hpp"
#include "mixedergo/model.hpp"

namespace mixedergo {

/// Uniform grid in log(sigma^2) between lo and hi (both on the sigma^2 scale).
struct LogGridAxis {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 201;
};

/// axes[0] is sigma2_e, axes[1 + i] is sigma2_u_i.
struct QuadratureSpec {
  std::vector<LogGridAxis> axes;
  double boundary_tolerance = 1e-6;

  /// Same axis for every coordinate.
  static QuadratureSpec uniform(std::size_t r, LogGridAxis axis);
};

inline constexpr double kMaxQuadraturePoints = 1e7;

struct ComponentMoments {
  double mean = 0.0;
  double variance = 0.0;
  // Share of the weighted integrand sitting on the faces of the grid box. A
  // moment is trusted only when its share is within the configured tolerance.
  double mean_boundary_fraction = 0.0;
  double variance_boundary_fraction = 0.0;
  bool mean_resolved = false;
  bool variance_resolved = false;
};

struct QuadratureResult {
  double log_m_y = 0.0;
  double boundary_fraction = 0.0;
  std::vector<ComponentMoments> moments;  // sigma2_e first
  std::size_t points = 0;
};

/// log of the theta-integrated joint density, up to no constant:
///   log int pi*(theta, sigma^2 | y) dtheta.
double log_sigma2_marginal_density(const DesignSummary& summary, const PriorSpec& prior,
                                   const VarianceComponents& sigma2);

/// Trapezoid quadrature of the sigma^2 marginal in log space. Throws
/// Errc::grid_too_coarse if the normalizing mass on the grid faces exceeds
/// spec.boundary_tolerance; per-moment boundary shares are reported instead
/// of thrown so unbounded moments are visible.
QuadratureResult sigma2_marginal_quadrature(const GlmmDesign& design, const PriorSpec& prior,
                                            const QuadratureSpec& spec);

struct DriftPointCheck {
  VarianceComponents sigma2;
  double v_current = 0.0;
  double estimate = 0.0;  // Monte Carlo E[v(next) | current]
  double std_error = 0.0;
  double bound = 0.0;  // rho v_current + L
  bool violated = false;
};

struct DriftCheckReport {
  double rho_used = 0.0;
  std::vector<DriftPointCheck> points;
  int violations = 0;
};

/// Monte Carlo check of the drift inequality at n_points log-uniform states
/// in [1e-4, 1e4]^{r+1}. `rho_scale` multiplies the certified rho (negative
/// controls use values below one).
DriftCheckReport mc_check_drift(const DesignSummary& summary, const GlmmDesign& design,
                                const PriorSpec& prior, const DriftCertificate& cert, int n_points,
                                int n_mc, std::uint64_t seed, double rho_scale = 1.0);

struct LemmaA1Report {
  double scale = 0.0;
  double stmt1_min_eig = 0.0;
  bool stmt1 = false;
  double stmt2_lhs = 0.0;
  double stmt2_rhs = 0.0;
  bool stmt2 = false;
  std::vector<double> stmt3_min_eig;
  bool stmt3 = false;
  bool all() const { return stmt1 && stmt2 && stmt3; }
};

/// Numerical check of three matrix inequalities:
///  (1) M^+ s2_e + (I - P_M) sum_j s2_uj - Q^{-1} is PSD
///  (2) tr((I - P_X) Z Q^{-1} Z^T (I - P_X)) <= t s2_e
///  (3) (lambda_max / s2_e + 1 / s2_ui) I - (Q^{-1}_{ii})^{-1} is PSD for every block
/// with slack 1e-8 times a problem scale.
LemmaA1Report check_lemma_a1(const DesignSummary& summary, const VarianceComponents& sigma2);

struct ChisqMomentReport {
  int k = 0;
  double mu = 0.0;
  double gamma = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Monte Carlo E[J^{-gamma}] for J ~ chi2_k(mu), with the noncentral law
/// taken as a Poisson(mu) mixture of chi2_{k + 2i}, against
/// 2^{-gamma} Gamma(k/2 - gamma) / Gamma(k/2).
ChisqMomentReport check_chisq_moment_bound(int k, double mu, double gamma, int n_mc,
                                           std::uint64_t seed);

struct BlockMomentCheck {
  double second_moment_exact = 0.0;  // E[||u_i||^2 | s2]
  double second_moment_bound = 0.0;  // with K
  double second_moment_bound_h = 0.0;
  bool second_moment_ok = false;
  bool second_moment_ok_h = false;
  double neg_moment_estimate = 0.0;  // E[||u_i||^{-2c} | s2], Monte Carlo
  double neg_moment_std_error = 0.0;
  double neg_moment_bound = 0.0;
  bool neg_moment_ok = false;
};

struct ExpectationBoundsReport {
  double k_estimate = 0.0;
  double h = 0.0;
  double c = 0.0;
  double resid_exact = 0.0;  // E[||y - W theta||^2 | s2]
  double resid_bound = 0.0;
  double resid_bound_h = 0.0;  // same bound with K replaced by h(s2)
  bool resid_ok = false;
  bool resid_ok_h = false;
  std::vector<BlockMomentCheck> blocks;
  /// Every check passes with K (exact moments) and within 3 sigma (Monte Carlo).
  bool all() const;
  /// A failure with K that disappears with h(s2) points at the K estimate.
  bool k_attributable() const;
};

ExpectationBoundsReport check_expectation_bounds(const DesignSummary& summary,
                                                 const GlmmDesign& design,
                                                 const VarianceComponents& sigma2,
                                                 double k_estimate, double c, int n_mc,
                                                 std::uint64_t seed);

}  // namespace mixedergo
