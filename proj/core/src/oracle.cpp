#include "mixedergo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "mixedergo/error.hpp"
#include "mixedergo/rng.hpp"
#include "mixedergo/special.hpp"

namespace mixedergo {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(const std::vector<double>& v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (const double x : v) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

Matrix inverse_spd(const Matrix& a) {
  const Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) fail(Errc::singular_q, "matrix is not positive definite");
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()),
                                                 Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_positive(const VarianceComponents& sigma2, std::size_t r) {
  if (sigma2.sigma2_u.size() != static_cast<Eigen::Index>(r)) {
    fail(Errc::dimension_mismatch, "sigma2 does not match the number of blocks");
  }
  if (!sigma2.valid()) fail(Errc::domain_error, "variance components must be positive and finite");
}

}  // namespace

QuadratureSpec QuadratureSpec::uniform(std::size_t r, LogGridAxis axis) {
  QuadratureSpec spec;
  spec.axes.assign(r + 1, axis);
  return spec;
}

double log_sigma2_marginal_density(const DesignSummary& summary, const PriorSpec& prior,
                                   const VarianceComponents& sigma2) {
  require_positive(sigma2, summary.r);
  if (prior.a.size() != summary.r || prior.b.size() != summary.r) {
    fail(Errc::dimension_mismatch, "prior does not match the design");
  }
  const double se = sigma2.sigma2_e;
  const auto n = static_cast<double>(summary.n_obs);
  const auto p = static_cast<double>(summary.p);

  // Q = M / s2_e + D^{-1} is split along the eigenbasis U = [U_t, U_0] of M
  // so the null directions of M never meet rounding noise scaled by 1/s2_e:
  //   log|Q| = log|U_0^T D^{-1} U_0| + log|Lambda_t / s2_e + (U_t^T D U_t)^{-1}|.
  // Z~^T y lies in span(U_t), so only the second block enters the quadratic
  // form. Both Gram matrices are factored through QR of their square roots.
  const Eigen::Index t = summary.t;
  Vector d_half(summary.q);
  for (std::size_t i = 0; i < summary.r; ++i) {
    d_half.segment(summary.q_offsets[i], summary.q_sizes[i])
        .setConstant(std::sqrt(sigma2.sigma2_u(static_cast<Eigen::Index>(i))));
  }
  const auto log_abs_diag = [](const Matrix& r) {
    return r.diagonal().cwiseAbs().array().log().sum();
  };

  double log_det_null = 0.0;
  if (t < summary.q) {
    const Matrix root = d_half.cwiseInverse().asDiagonal() * summary.eigvecs.rightCols(summary.q - t);
    const Eigen::HouseholderQR<Matrix> qr(root);
    log_det_null = 2.0 * log_abs_diag(qr.matrixQR().topRows(summary.q - t));
  }

  double log_det_range = 0.0;
  double quad = 0.0;
  if (t > 0) {
    const Matrix root = d_half.asDiagonal() * summary.eigvecs.leftCols(t);
    const Eigen::HouseholderQR<Matrix> qr(root);
    const Matrix r_up = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();
    // U_t^T D U_t = F F^T with F = R^T.
    Matrix inner = r_up * (summary.eigvals.head(t) / se).asDiagonal() * r_up.transpose();
    inner.diagonal().array() += 1.0;
    const Eigen::LLT<Matrix> llt(inner);
    if (llt.info() != Eigen::Success) fail(Errc::singular_q, "range block of Q is not positive definite");
    const Matrix& h = llt.matrixL();
    log_det_range = 2.0 * h.diagonal().array().log().sum() - 2.0 * log_abs_diag(r_up);
    const Vector c = summary.eigvecs.leftCols(t).transpose() * summary.ztilde_y / se;
    quad = h.triangularView<Eigen::Lower>().solve(r_up * c).squaredNorm();
  }

  double out = -0.5 * (n - p) * (kLog2Pi + std::log(se)) - 0.5 * summary.log_det_xtx -
               0.5 * (log_det_null + log_det_range) + 0.5 * quad -
               0.5 * summary.norm_izx_y * summary.norm_izx_y / se;
  for (std::size_t i = 0; i < summary.r; ++i) {
    out -= 0.5 * static_cast<double>(summary.q_sizes[i]) *
           std::log(sigma2.sigma2_u(static_cast<Eigen::Index>(i)));
  }
  out += -(prior.a_e + 1.0) * std::log(se) - prior.b_e / se;
  for (std::size_t i = 0; i < summary.r; ++i) {
    const double su = sigma2.sigma2_u(static_cast<Eigen::Index>(i));
    out += -(prior.a[i] + 1.0) * std::log(su) - prior.b[i] / su;
  }
  return out;
}

QuadratureResult sigma2_marginal_quadrature(const GlmmDesign& design, const PriorSpec& prior,
                                            const QuadratureSpec& spec) {
  const std::size_t r = design.n_blocks();
  if (r < 1 || r > 2) fail(Errc::invalid_argument, "quadrature supports one or two blocks");
  if (spec.axes.size() != r + 1) {
    fail(Errc::dimension_mismatch, "quadrature needs one axis per variance component");
  }
  double total = 1.0;
  for (const auto& ax : spec.axes) {
    if (!(ax.lo > 0.0) || !(ax.hi > ax.lo) || ax.points < 2 || !std::isfinite(ax.hi)) {
      fail(Errc::invalid_argument, "grid axes must satisfy 0 < lo < hi with at least 2 points");
    }
    total *= ax.points;
  }
  if (total > kMaxQuadraturePoints) fail(Errc::invalid_argument, "quadrature grid exceeds 1e7 points");

  const DesignSummary summary = summarize_design(design);
  const std::size_t dims = r + 1;
  std::vector<std::vector<double>> values(dims);
  std::vector<std::vector<double>> log_weights(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& ax = spec.axes[d];
    const double t0 = std::log(ax.lo);
    const double step = (std::log(ax.hi) - t0) / (ax.points - 1);
    for (int k = 0; k < ax.points; ++k) {
      const double tau = t0 + step * k;
      values[d].push_back(std::exp(tau));
      const double w = (k == 0 || k == ax.points - 1) ? 0.5 * step : step;
      // d sigma^2 = sigma^2 d tau
      log_weights[d].push_back(std::log(w) + tau);
    }
  }

  const auto n_points = static_cast<std::size_t>(total);
  std::vector<double> log_mass(n_points);
  std::vector<bool> on_face(n_points);
  std::vector<std::vector<double>> coords(dims, std::vector<double>(n_points));
  std::vector<int> idx(dims, 0);
  VarianceComponents s2;
  s2.sigma2_u.resize(static_cast<Eigen::Index>(r));
  for (std::size_t flat = 0; flat < n_points; ++flat) {
    double lw = 0.0;
    bool face = false;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto k = static_cast<std::size_t>(idx[d]);
      coords[d][flat] = values[d][k];
      lw += log_weights[d][k];
      face = face || idx[d] == 0 || idx[d] == spec.axes[d].points - 1;
    }
    s2.sigma2_e = coords[0][flat];
    for (std::size_t i = 0; i < r; ++i) s2.sigma2_u(static_cast<Eigen::Index>(i)) = coords[i + 1][flat];
    log_mass[flat] = lw + log_sigma2_marginal_density(summary, prior, s2);
    on_face[flat] = face;
    for (std::size_t d = dims; d-- > 0;) {
      if (++idx[d] < spec.axes[d].points) break;
      idx[d] = 0;
    }
  }

  QuadratureResult out;
  out.points = n_points;
  out.log_m_y = log_sum_exp(log_mass);
  if (!std::isfinite(out.log_m_y)) fail(Errc::non_finite, "quadrature mass is not finite");

  // Normalised weights.
  std::vector<double> w(n_points);
  double face_mass = 0.0;
  for (std::size_t k = 0; k < n_points; ++k) {
    w[k] = std::exp(log_mass[k] - out.log_m_y);
    if (on_face[k]) face_mass += w[k];
  }
  out.boundary_fraction = face_mass;
  if (face_mass > spec.boundary_tolerance) {
    fail(Errc::grid_too_coarse, "boundary mass fraction " + std::to_string(face_mass) +
                                    " exceeds " + std::to_string(spec.boundary_tolerance));
  }

  for (std::size_t d = 0; d < dims; ++d) {
    ComponentMoments m;
    double mean = 0.0;
    for (std::size_t k = 0; k < n_points; ++k) mean += w[k] * coords[d][k];
    double mean_face = 0.0;
    for (std::size_t k = 0; k < n_points; ++k) {
      if (on_face[k]) mean_face += w[k] * coords[d][k];
    }
    double var = 0.0;
    double var_face = 0.0;
    for (std::size_t k = 0; k < n_points; ++k) {
      const double dev = coords[d][k] - mean;
      var += w[k] * dev * dev;
      if (on_face[k]) var_face += w[k] * dev * dev;
    }
    m.mean = mean;
    m.variance = var;
    m.mean_boundary_fraction = mean > 0.0 ? mean_face / mean : 1.0;
    m.variance_boundary_fraction = var > 0.0 ? var_face / var : 1.0;
    m.mean_resolved = m.mean_boundary_fraction <= spec.boundary_tolerance;
    m.variance_resolved = m.variance_boundary_fraction <= spec.boundary_tolerance;
    out.moments.push_back(m);
  }
  return out;
}

DriftCheckReport mc_check_drift(const DesignSummary& summary, const GlmmDesign& design,
                                const PriorSpec& prior, const DriftCertificate& cert, int n_points,
                                int n_mc, std::uint64_t seed, double rho_scale) {
  if (n_points < 1 || n_mc < 2) fail(Errc::invalid_argument, "need n_points >= 1 and n_mc >= 2");
  DriftCheckReport out;
  out.rho_used = cert.rho * rho_scale;
  const RngStream root(seed);
  RngStream locator = root.split(0);
  const auto r = static_cast<Eigen::Index>(summary.r);
  const double lo = std::log(1e-4);
  const double span = std::log(1e4) - lo;

  for (int pt = 0; pt < n_points; ++pt) {
    DriftPointCheck check;
    check.sigma2.sigma2_e = std::exp(lo + span * locator.uniform());
    check.sigma2.sigma2_u.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) check.sigma2.sigma2_u(i) = std::exp(lo + span * locator.uniform());
    check.v_current = drift_function(cert, check.sigma2);

    RngStream rng = root.split(static_cast<std::uint64_t>(pt) + 1);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int j = 0; j < n_mc; ++j) {
      const Vector theta = sample_theta(summary, design, check.sigma2, rng);
      const double v = drift_function(cert, sample_sigma2(summary, design, prior, theta, rng));
      sum += v;
      sum_sq += v * v;
    }
    const double n = n_mc;
    check.estimate = sum / n;
    const double var = std::max(0.0, (sum_sq - n * check.estimate * check.estimate) / (n - 1.0));
    check.std_error = std::sqrt(var / n);
    check.bound = out.rho_used * check.v_current + cert.L;
    check.violated = check.estimate > check.bound + 3.0 * check.std_error;
    if (check.violated) ++out.violations;
    out.points.push_back(check);
  }
  return out;
}

LemmaA1Report check_lemma_a1(const DesignSummary& summary, const VarianceComponents& sigma2) {
  require_positive(sigma2, summary.r);
  constexpr double slack = 1e-8;
  LemmaA1Report rep;
  const Matrix q_inv = inverse_spd(precision_q(summary, sigma2));
  const Eigen::Index q = summary.q;
  const double su_sum = sigma2.sigma2_u.sum();

  const Matrix complement = Matrix::Identity(q, q) - summary.projection;
  const Matrix upper = summary.pinv * sigma2.sigma2_e + complement * su_sum;
  rep.scale = std::max({upper.norm(), q_inv.norm(), std::numeric_limits<double>::min()});
  rep.stmt1_min_eig = min_eigenvalue(upper - q_inv);
  rep.stmt1 = rep.stmt1_min_eig >= -slack * rep.scale;

  rep.stmt2_lhs = (q_inv * summary.ztz_tilde).trace();
  rep.stmt2_rhs = static_cast<double>(summary.t) * sigma2.sigma2_e;
  // The trace is at most q s2_e whatever t is, which sets the scale even when
  // M is rounding noise and t = 0.
  const double scale2 = std::max(std::abs(rep.stmt2_lhs), sigma2.sigma2_e * static_cast<double>(q));
  rep.stmt2 = rep.stmt2_lhs <= rep.stmt2_rhs + slack * scale2;

  rep.stmt3 = true;
  for (std::size_t i = 0; i < summary.r; ++i) {
    const auto off = summary.q_offsets[i];
    const auto qi = summary.q_sizes[i];
    const double level =
        summary.lambda_max / sigma2.sigma2_e + 1.0 / sigma2.sigma2_u(static_cast<Eigen::Index>(i));
    const Matrix block_inv = inverse_spd(q_inv.block(off, off, qi, qi));
    const double eig = min_eigenvalue(level * Matrix::Identity(qi, qi) - block_inv);
    rep.stmt3_min_eig.push_back(eig);
    rep.stmt3 = rep.stmt3 && eig >= -slack * std::max(level, block_inv.norm());
  }
  return rep;
}

ChisqMomentReport check_chisq_moment_bound(int k, double mu, double gamma, int n_mc,
                                           std::uint64_t seed) {
  if (k < 1) fail(Errc::domain_error, "k must be a positive integer");
  if (!(mu >= 0.0) || !std::isfinite(mu)) fail(Errc::domain_error, "mu must be >= 0");
  if (!(gamma > 0.0) || !(gamma < 0.5 * k)) fail(Errc::domain_error, "gamma must lie in (0, k/2)");
  if (n_mc < 2) fail(Errc::domain_error, "n_mc must be at least 2");

  ChisqMomentReport rep;
  rep.k = k;
  rep.mu = mu;
  rep.gamma = gamma;
  rep.bound = gamma_ratio(0.5 * k, gamma);
  RngStream rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int j = 0; j < n_mc; ++j) {
    const double dof = k + 2.0 * static_cast<double>(mu > 0.0 ? rng.poisson(mu) : 0);
    const double v = std::pow(rng.chi_square(dof), -gamma);
    sum += v;
    sum_sq += v * v;
  }
  const double n = n_mc;
  rep.estimate = sum / n;
  rep.std_error = std::sqrt(std::max(0.0, (sum_sq - n * rep.estimate * rep.estimate) / (n - 1.0)) / n);
  rep.pass = rep.estimate <= rep.bound + 3.0 * rep.std_error;
  return rep;
}

bool ExpectationBoundsReport::all() const {
  return resid_ok && std::all_of(blocks.begin(), blocks.end(), [](const BlockMomentCheck& b) {
           return b.second_moment_ok && b.neg_moment_ok;
         });
}

bool ExpectationBoundsReport::k_attributable() const {
  bool any = !resid_ok && resid_ok_h;
  for (const auto& b : blocks) any = any || (!b.second_moment_ok && b.second_moment_ok_h);
  return any;
}

ExpectationBoundsReport check_expectation_bounds(const DesignSummary& summary,
                                                 const GlmmDesign& design,
                                                 const VarianceComponents& sigma2,
                                                 double k_estimate, double c, int n_mc,
                                                 std::uint64_t seed) {
  require_positive(sigma2, summary.r);
  if (!(c > 0.0) || !(c < 0.5)) fail(Errc::domain_error, "c must lie in (0, 1/2)");
  if (n_mc < 2) fail(Errc::domain_error, "n_mc must be at least 2");
  ExpectationBoundsReport rep;
  rep.k_estimate = k_estimate;
  rep.c = c;
  rep.h = h_norm(summary, sigma2);

  const ThetaMoments mom = theta_conditional_moments(summary, design, sigma2);
  const Matrix w = design.w();
  rep.resid_exact = ((w * mom.cov).cwiseProduct(w)).sum() + (design.y() - w * mom.mean).squaredNorm();
  const double pt = static_cast<double>(summary.p + summary.t) * sigma2.sigma2_e;
  const auto resid_bound = [&](double k) {
    const double a = summary.norm_izx_y + summary.fro_izx_z * k;
    return pt + a * a;
  };
  rep.resid_bound = resid_bound(k_estimate);
  rep.resid_bound_h = resid_bound(rep.h);
  const double tol = 1e-10;
  rep.resid_ok = rep.resid_exact <= rep.resid_bound * (1.0 + tol);
  rep.resid_ok_h = rep.resid_exact <= rep.resid_bound_h * (1.0 + tol);

  const double su_sum = sigma2.sigma2_u.sum();
  RngStream rng(seed);
  std::vector<double> sums(summary.r, 0.0);
  std::vector<double> sums_sq(summary.r, 0.0);
  for (int j = 0; j < n_mc; ++j) {
    const Vector theta = sample_theta(summary, design, sigma2, rng);
    for (std::size_t i = 0; i < summary.r; ++i) {
      const double sq = theta.segment(summary.p + summary.q_offsets[i], summary.q_sizes[i]).squaredNorm();
      const double v = std::pow(sq, -c);
      sums[i] += v;
      sums_sq[i] += v * v;
    }
  }

  for (std::size_t i = 0; i < summary.r; ++i) {
    BlockMomentCheck b;
    const auto off = summary.p + summary.q_offsets[i];
    const auto qi = summary.q_sizes[i];
    const auto ii = static_cast<Eigen::Index>(i);
    b.second_moment_exact = mom.cov.block(off, off, qi, qi).trace() + mom.mean.segment(off, qi).squaredNorm();
    const double base = summary.xi(ii) * sigma2.sigma2_e + summary.zeta(ii) * su_sum;
    const double root_q = std::sqrt(static_cast<double>(qi));
    b.second_moment_bound = base + (root_q * k_estimate) * (root_q * k_estimate);
    b.second_moment_bound_h = base + (root_q * rep.h) * (root_q * rep.h);
    b.second_moment_ok = b.second_moment_exact <= b.second_moment_bound * (1.0 + tol);
    b.second_moment_ok_h = b.second_moment_exact <= b.second_moment_bound_h * (1.0 + tol);

    const double n = n_mc;
    b.neg_moment_estimate = sums[i] / n;
    b.neg_moment_std_error = std::sqrt(
        std::max(0.0, (sums_sq[i] - n * b.neg_moment_estimate * b.neg_moment_estimate) / (n - 1.0)) / n);
    const double level = summary.lambda_max / sigma2.sigma2_e + 1.0 / sigma2.sigma2_u(ii);
    b.neg_moment_bound = std::pow(level, c) * gamma_ratio(0.5 * static_cast<double>(qi), c);
    b.neg_moment_ok = b.neg_moment_estimate <= b.neg_moment_bound + 3.0 * b.neg_moment_std_error;
    rep.blocks.push_back(b);
  }
  return rep;
}

}  // namespace mixedergo
