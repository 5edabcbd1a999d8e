#include "mixedergo/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mixedergo/error.hpp"
#include "mixedergo/rng.hpp"
#include "mixedergo/special.hpp"

namespace mixedergo {

namespace {

void require_prior(const DesignSummary& summary, const PriorSpec& prior) {
  if (prior.a.size() != summary.r || prior.b.size() != summary.r) {
    fail(Errc::dimension_mismatch, "prior does not match the number of random-effect blocks");
  }
}

void require_s(double s, const DesignSummary& summary, const PriorSpec& prior) {
  const double half = 0.5 * s_tilde(summary, prior);
  if (!(s > 0.0) || !(s <= 1.0) || !(s < half)) {
    fail(Errc::domain_error, "s = " + std::to_string(s) + " is outside (0, 1] and (0, " +
                                 std::to_string(half) + ")");
  }
}

double dbl(Eigen::Index v) { return static_cast<double>(v); }

// Gamma(x - c) / Gamma(x) without the 2^{-c} factor.
double plain_gamma_ratio(double x, double c) { return std::exp(log_gamma_ratio(x, c)); }

}  // namespace

const char* to_string(WitnessStatus status) noexcept {
  switch (status) {
    case WitnessStatus::found: return "found";
    case WitnessStatus::not_found_at_resolution: return "not_found_at_resolution";
    case WitnessStatus::precheck_failed: return "precheck_failed";
    case WitnessStatus::condition1_failed: return "condition1_failed";
    case WitnessStatus::empty_interval: return "empty_interval";
  }
  return "unknown";
}

std::vector<bool> check_condition1(const PriorSpec& prior) {
  std::vector<bool> out(prior.a.size());
  for (std::size_t i = 0; i < prior.a.size(); ++i) {
    const double b = i < prior.b.size() ? prior.b[i] : -1.0;
    out[i] = (prior.a[i] < b && b == 0.0) || b > 0.0;
  }
  return out;
}

Theorem1Check check_theorem1(const DesignSummary& summary, const PriorSpec& prior) {
  require_prior(summary, prior);
  Theorem1Check out;
  out.cond_a = check_condition1(prior);
  const double q_minus_t = dbl(summary.q - summary.t);
  double negative_a_sum = 0.0;
  for (std::size_t i = 0; i < summary.r; ++i) {
    out.cond_b.push_back(dbl(summary.q_sizes[i]) + 2.0 * prior.a[i] > q_minus_t);
    if (prior.a[i] < 0.0) negative_a_sum += prior.a[i];
  }
  out.cond_c = dbl(summary.n_obs) + 2.0 * prior.a_e > dbl(summary.p) - 2.0 * negative_a_sum;
  out.cond_d = 2.0 * prior.b_e + summary.sse > 0.0;
  const auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  out.verdict = all(out.cond_a) && all(out.cond_b) && out.cond_c && out.cond_d;
  return out;
}

Corollary1Check check_corollary1(const DesignSummary& summary, const PriorSpec& prior) {
  require_prior(summary, prior);
  Corollary1Check out;
  out.cond_a = check_condition1(prior);
  const double bound = dbl(summary.q - summary.t) + 2.0;
  for (std::size_t i = 0; i < summary.r; ++i) {
    out.cond_b_prime.push_back(dbl(summary.q_sizes[i]) + 2.0 * prior.a[i] > bound);
  }
  out.cond_c_prime =
      dbl(summary.n_obs) + 2.0 * prior.a_e > dbl(summary.p) + dbl(summary.t) + 2.0;
  out.cond_d = 2.0 * prior.b_e + summary.sse > 0.0;
  const auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  out.verdict = all(out.cond_a) && all(out.cond_b_prime) && out.cond_c_prime && out.cond_d;
  return out;
}

double lhs_condition_e(double s, const DesignSummary& summary, const PriorSpec& prior) {
  require_prior(summary, prior);
  require_s(s, summary, prior);
  const double x = 0.5 * dbl(summary.n_obs) + prior.a_e;
  return std::pow(dbl(summary.p + summary.t), s) * gamma_ratio(x, s);
}

double lhs_condition_u(double s, const DesignSummary& summary, const PriorSpec& prior) {
  require_prior(summary, prior);
  require_s(s, summary, prior);
  double total = 0.0;
  for (std::size_t i = 0; i < summary.r; ++i) {
    const double zeta = summary.zeta(static_cast<Eigen::Index>(i));
    if (zeta <= 0.0) continue;  // 0^s = 0
    const double x = 0.5 * dbl(summary.q_sizes[i]) + prior.a[i];
    total += gamma_ratio(x, s) * std::pow(zeta, s);
  }
  return total;
}

WitnessSearch search_witness_s(const DesignSummary& summary, const PriorSpec& prior,
                               int grid_size) {
  require_prior(summary, prior);
  if (grid_size < 2) fail(Errc::invalid_argument, "grid_size must be at least 2");
  WitnessSearch out;
  out.grid_size = grid_size;
  out.best_max = std::numeric_limits<double>::quiet_NaN();
  out.condition1 = check_condition1(prior);
  out.precheck_e = dbl(summary.n_obs) + 2.0 * prior.a_e > dbl(summary.p + summary.t);
  for (std::size_t i = 0; i < summary.r; ++i) {
    out.precheck_u.push_back(dbl(summary.q_sizes[i]) + 2.0 * prior.a[i] >
                             summary.zeta(static_cast<Eigen::Index>(i)));
  }

  if (!std::all_of(out.condition1.begin(), out.condition1.end(), [](bool b) { return b; })) {
    out.status = WitnessStatus::condition1_failed;
    return out;
  }
  if (!out.precheck_e ||
      !std::all_of(out.precheck_u.begin(), out.precheck_u.end(), [](bool b) { return b; })) {
    out.status = WitnessStatus::precheck_failed;
    return out;
  }

  constexpr double eps = 1e-8;
  const double half = 0.5 * s_tilde(summary, prior);
  const double hi = std::min(1.0, half - eps);
  out.interval_hi = hi;
  if (!(hi > eps)) {
    out.status = WitnessStatus::empty_interval;
    return out;
  }

  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  const double log_lo = std::log(eps);
  const double log_span = std::log(hi) - log_lo;
  for (int k = 0; k < grid_size; ++k) {
    grid[static_cast<std::size_t>(k)] =
        k == grid_size - 1 ? hi : std::exp(log_lo + log_span * k / (grid_size - 1));
  }
  if (hi < 1.0 && 1.0 < half) grid.push_back(1.0);

  double best = std::numeric_limits<double>::infinity();
  for (const double s : grid) {
    const double le = lhs_condition_e(s, summary, prior);
    const double lu = lhs_condition_u(s, summary, prior);
    const double worst = std::max(le, lu);
    if (worst < best) {
      best = worst;
      out.best_s = s;
      out.lhs_e = le;
      out.lhs_u = lu;
    }
  }
  out.best_max = best;
  if (best < 1.0) {
    out.witness = out.best_s;
    out.status = WitnessStatus::found;
  } else {
    out.status = WitnessStatus::not_found_at_resolution;
  }
  return out;
}

Theorem2Check check_theorem2(const DesignSummary& summary, const PriorSpec& prior,
                             int grid_size) {
  Theorem2Check out;
  out.search = search_witness_s(summary, prior, grid_size);
  out.verdict = out.search.status == WitnessStatus::found;
  return out;
}

OnewayCheck check_oneway(int c, int n_total, double a_e, double a_1,
                         const std::optional<std::vector<int>>& n_sizes) {
  if (c < 2) fail(Errc::domain_error, "one-way check needs c >= 2");
  if (!(a_1 < 0.0)) fail(Errc::domain_error, "one-way check needs a_1 < 0");
  const double arg = 0.5 * c + a_1;
  if (!(arg > 0.0)) fail(Errc::domain_error, "digamma argument c/2 + a_1 must be positive");

  OnewayCheck out;
  out.c = c;
  out.n_total = n_total;
  out.a_e = a_e;
  out.a_1 = a_1;
  out.two_exp_digamma = 2.0 * std::exp(digamma(arg));
  out.sample_size_ok = n_total + 2.0 * a_e >= c + 2.0;
  out.digamma_ok = 1.0 < out.two_exp_digamma;
  out.verdict = out.sample_size_ok && out.digamma_ok;

  if (n_sizes) {
    if (static_cast<int>(n_sizes->size()) != c) {
      fail(Errc::dimension_mismatch, "need c group sizes for the Tan-Hobert condition");
    }
    double harmonic = 0.0;
    int n_star = 0;
    int total = 0;
    for (const int ni : *n_sizes) {
      harmonic += static_cast<double>(ni) / (ni + 1.0);
      n_star = std::max(n_star, ni);
      total += ni;
    }
    if (total != n_total) fail(Errc::dimension_mismatch, "group sizes do not sum to N");
    const double lhs = c * std::min(1.0 / harmonic, static_cast<double>(n_star) / total);
    out.tan_hobert_lhs = lhs;
    out.tan_hobert = (n_total + 2.0 * a_e >= c + 3.0) && lhs < out.two_exp_digamma;
    out.implication_holds = !*out.tan_hobert || out.verdict;
  }
  return out;
}

TwowayCheck check_twoway(int m, int n, const PriorSpec& prior, double s) {
  if (m < 2 || n < 2) fail(Errc::domain_error, "two-way check needs m, n >= 2");
  if (prior.a.size() != 2 || prior.b.size() != 2) {
    fail(Errc::dimension_mismatch, "two-way model has two random-effect blocks");
  }
  TwowayCheck out;
  out.m = m;
  out.n = n;
  out.s = s;
  out.lhs_e = std::pow(m + n - 1.0, s) * gamma_ratio(0.5 * m * n + prior.a_e, s);
  out.lhs_u = gamma_ratio(0.5 * m + prior.a[0], s) + gamma_ratio(0.5 * n + prior.a[1], s);
  out.verdict = out.lhs_e < 1.0 && out.lhs_u < 1.0;
  return out;
}

DriftCertificate drift_certificate(const DesignSummary& summary, const PriorSpec& prior, double s,
                                   std::optional<double> c, double k_estimate) {
  require_prior(summary, prior);
  require_s(s, summary, prior);
  if (!(k_estimate >= 0.0) || !std::isfinite(k_estimate)) {
    fail(Errc::domain_error, "K estimate must be finite and non-negative");
  }
  const auto cond1 = check_condition1(prior);
  if (!std::all_of(cond1.begin(), cond1.end(), [](bool b) { return b; })) {
    fail(Errc::certificate_unavailable, "some block has b_i = 0 with a_i >= 0");
  }

  std::vector<std::size_t> null_blocks;
  for (std::size_t i = 0; i < summary.r; ++i) {
    if (prior.b[i] == 0.0) null_blocks.push_back(i);
  }

  DriftCertificate cert;
  cert.s = s;
  cert.k_estimate = k_estimate;
  cert.null_blocks_present = !null_blocks.empty();

  if (cert.null_blocks_present) {
    double max_a = -std::numeric_limits<double>::infinity();
    for (const auto i : null_blocks) max_a = std::max(max_a, prior.a[i]);
    const double a_tilde = -max_a;
    const double upper = std::min(0.5, a_tilde);
    cert.c = c.value_or(std::min(0.25, 0.5 * a_tilde));
    if (!(cert.c > 0.0) || !(cert.c < upper)) {
      fail(Errc::domain_error, "c = " + std::to_string(cert.c) + " must lie in (0, " +
                                   std::to_string(upper) + ")");
    }
  } else {
    cert.c = c.value_or(0.25);
    if (!(cert.c > 0.0)) fail(Errc::domain_error, "c must be positive");
  }

  const double n_half = 0.5 * dbl(summary.n_obs) + prior.a_e;
  const double g0_s = gamma_ratio(n_half, s);
  const double g0_negc = gamma_ratio(n_half, -cert.c);
  std::vector<double> gi_s(summary.r);
  std::vector<double> gi_negc(summary.r);
  for (std::size_t i = 0; i < summary.r; ++i) {
    const double x = 0.5 * dbl(summary.q_sizes[i]) + prior.a[i];
    gi_s[i] = gamma_ratio(x, s);
    gi_negc[i] = gamma_ratio(x, -cert.c);
  }

  auto& d = cert.delta;
  d[0] = g0_s * std::pow(dbl(summary.p + summary.t), s);
  d[1] = 0.0;
  d[2] = 0.0;
  for (std::size_t i = 0; i < summary.r; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (summary.xi(idx) > 0.0) d[1] += std::pow(summary.xi(idx), s) * gi_s[i];
    if (summary.zeta(idx) > 0.0) d[2] += std::pow(summary.zeta(idx), s) * gi_s[i];
  }
  d[3] = 0.0;
  d[4] = 0.0;
  const double two_neg_c = std::exp2(-cert.c);
  for (const auto i : null_blocks) {
    const double term =
        gi_negc[i] * plain_gamma_ratio(0.5 * dbl(summary.q_sizes[i]), cert.c);
    d[3] += term;
    d[4] = std::max(d[4], two_neg_c * term);
  }
  d[3] *= two_neg_c * (summary.lambda_max > 0.0 ? std::pow(summary.lambda_max, cert.c) : 0.0);

  if (!(d[0] < 1.0)) fail(Errc::certificate_unavailable, "delta_1(s) >= 1");
  if (!(d[2] < 1.0)) fail(Errc::certificate_unavailable, "delta_3(s) >= 1");
  if (cert.null_blocks_present && !(d[4] < 1.0)) {
    fail(Errc::certificate_unavailable, "delta_5(c) >= 1");
  }

  const double threshold = std::max(d[1] / (1.0 - d[0]), cert.null_blocks_present ? d[3] : 0.0);
  cert.alpha = threshold > 0.0 ? 2.0 * threshold : 1.0;

  cert.rho = std::max(d[0] + d[1] / cert.alpha, d[2]);
  if (cert.null_blocks_present) cert.rho = std::max({cert.rho, d[3] / cert.alpha, d[4]});

  const double sse_half = prior.b_e + 0.5 * summary.sse;
  double kappa = 0.0;
  if (prior.b_e > 0.0) kappa += cert.alpha * std::exp2(s) * g0_s * std::pow(prior.b_e, s);
  for (std::size_t i = 0; i < summary.r; ++i) {
    if (prior.b[i] > 0.0) kappa += std::exp2(s) * gi_s[i] * std::pow(prior.b[i], s);
  }
  kappa += cert.alpha * two_neg_c * g0_negc * std::pow(sse_half, -cert.c);
  for (std::size_t i = 0; i < summary.r; ++i) {
    if (prior.b[i] > 0.0) kappa += gi_negc[i] * std::pow(2.0 * prior.b[i], -cert.c);
  }
  cert.kappa = kappa;

  double l = kappa;
  l += cert.alpha * g0_s * std::pow(summary.norm_izx_y + summary.fro_izx_z * k_estimate, 2.0 * s);
  for (std::size_t i = 0; i < summary.r; ++i) {
    const double r_norm = std::sqrt(dbl(summary.q_sizes[i]));  // ||R_i||_F
    l += gi_s[i] * std::pow(r_norm * k_estimate, 2.0 * s);
  }
  cert.L = l;
  return cert;
}

double drift_function(const DriftCertificate& cert, const VarianceComponents& sigma2) {
  double v = cert.alpha * (std::pow(sigma2.sigma2_e, cert.s) + std::pow(sigma2.sigma2_e, -cert.c));
  for (Eigen::Index i = 0; i < sigma2.sigma2_u.size(); ++i) {
    v += std::pow(sigma2.sigma2_u(i), cert.s) + std::pow(sigma2.sigma2_u(i), -cert.c);
  }
  return v;
}

namespace {

// (s2_e)^{-1} Q^{-1} B for columns of B inside the range of M. Writing
// M = U_t Lambda U_t^T, Woodbury gives
//   (s2_e)^{-1} Q^{-1} U_t = D U_t (s2_e Lambda^{-1} + U_t^T D U_t)^{-1} Lambda^{-1},
// and the middle inverse comes from a QR of [D^{1/2} U_t ; s2_e^{1/2} Lambda^{-1/2}].
// Factoring Q directly breaks down once the variances span many decades.
Matrix scaled_q_solve_in_range(const DesignSummary& summary, const VarianceComponents& sigma2,
                               const Matrix& b) {
  if (!sigma2.valid() || sigma2.sigma2_u.size() != static_cast<Eigen::Index>(summary.r)) {
    fail(Errc::domain_error, "variance components must be positive and match the design");
  }
  const Eigen::Index t = summary.t;
  const Eigen::Index q = summary.q;
  if (t == 0) return Matrix::Zero(q, b.cols());
  Vector d_sqrt(q);
  for (std::size_t i = 0; i < summary.r; ++i) {
    d_sqrt.segment(summary.q_offsets[i], summary.q_sizes[i])
        .setConstant(std::sqrt(sigma2.sigma2_u(static_cast<Eigen::Index>(i))));
  }
  const auto u_t = summary.eigvecs.leftCols(t);
  const Vector lambda = summary.eigvals.head(t);
  Matrix stacked(q + t, t);
  stacked.topRows(q) = d_sqrt.asDiagonal() * u_t;
  stacked.bottomRows(t) = (std::sqrt(sigma2.sigma2_e) * lambda.cwiseSqrt().cwiseInverse()).asDiagonal();
  const Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix r_s = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();
  const Matrix q_top = (qr.householderQ() * Matrix::Identity(q + t, t)).topRows(q);
  const Matrix w = lambda.cwiseInverse().asDiagonal() * (u_t.transpose() * b);
  const Matrix solved = r_s.transpose().triangularView<Eigen::Lower>().solve(w);
  return d_sqrt.asDiagonal() * (q_top * solved);
}

}  // namespace

double h_norm(const DesignSummary& summary, const VarianceComponents& sigma2) {
  return scaled_q_solve_in_range(summary, sigma2, summary.ztilde_y).norm();
}

KEstimate estimate_k(const DesignSummary& summary, const GlmmDesign& design, int budget) {
  if (budget < 1) fail(Errc::invalid_argument, "K budget must be at least 1");
  const Vector abs_y = design.y().cwiseAbs();
  const auto dims = static_cast<int>(summary.r) + 1;
  constexpr double lo = 1e-8;
  constexpr double hi = 1e8;

  // Corner points first, then a fixed-seed log-uniform stream, so a larger
  // budget always explores a superset of a smaller one.
  std::vector<VarianceComponents> points;
  const auto make = [&](const std::vector<double>& coords) {
    VarianceComponents v;
    v.sigma2_e = coords[0];
    v.sigma2_u = Eigen::Map<const Vector>(coords.data() + 1, dims - 1);
    return v;
  };
  if (dims <= 12) {
    for (int mask = 0; mask < (1 << dims); ++mask) {
      std::vector<double> coords(static_cast<std::size_t>(dims));
      for (int k = 0; k < dims; ++k) coords[static_cast<std::size_t>(k)] = (mask >> k) & 1 ? hi : lo;
      points.push_back(make(coords));
    }
  } else {
    for (int k = 0; k < dims; ++k) {
      for (const double extreme : {lo, hi}) {
        std::vector<double> coords(static_cast<std::size_t>(dims), 1.0);
        coords[static_cast<std::size_t>(k)] = extreme;
        points.push_back(make(coords));
      }
    }
  }
  RngStream rng(0x4b2d657374696d61ULL);
  const double log_lo = std::log(lo);
  const double log_span = std::log(hi) - log_lo;
  for (int b = 0; b < budget; ++b) {
    std::vector<double> coords(static_cast<std::size_t>(dims));
    for (auto& x : coords) x = std::exp(log_lo + log_span * rng.uniform());
    points.push_back(make(coords));
  }

  KEstimate out;
  Vector per_term_sup = Vector::Zero(summary.n_obs);
  Matrix rhs(summary.q, summary.n_obs + 1);
  rhs.leftCols(summary.n_obs) = summary.ztilde.transpose();  // columns are the tilde z_i
  rhs.col(summary.n_obs) = summary.ztilde_y;
  for (const auto& v : points) {
    const Matrix solved = scaled_q_solve_in_range(summary, v, rhs);
    if (!solved.allFinite()) continue;
    ++out.points;
    out.h_route = std::max(out.h_route, solved.col(summary.n_obs).norm());
    per_term_sup = per_term_sup.cwiseMax(solved.leftCols(summary.n_obs).colwise().norm().transpose());
  }
  out.per_term_route = abs_y.dot(per_term_sup);
  out.value = std::max(out.h_route, out.per_term_route);
  return out;
}

std::optional<std::vector<int>> detect_oneway(const GlmmDesign& design) {
  if (design.n_blocks() != 1 || design.n_fixed() != 1) return std::nullopt;
  if (!(design.x().array() == 1.0).all()) return std::nullopt;
  const Matrix& z = design.z_block(0);
  const auto c = z.cols();
  if (c < 2) return std::nullopt;
  std::vector<int> sizes(static_cast<std::size_t>(c), 0);
  Eigen::Index group = 0;
  for (Eigen::Index row = 0; row < z.rows(); ++row) {
    Eigen::Index hot = -1;
    for (Eigen::Index col = 0; col < c; ++col) {
      if (z(row, col) == 1.0) {
        if (hot >= 0) return std::nullopt;
        hot = col;
      } else if (z(row, col) != 0.0) {
        return std::nullopt;
      }
    }
    if (hot < group || hot > group + 1) return std::nullopt;  // rows grouped in order
    if (hot == group + 1 && sizes[static_cast<std::size_t>(group)] == 0) return std::nullopt;
    group = hot;
    ++sizes[static_cast<std::size_t>(hot)];
  }
  if (std::any_of(sizes.begin(), sizes.end(), [](int n) { return n == 0; })) return std::nullopt;
  return sizes;
}

std::optional<std::pair<int, int>> detect_twoway(const GlmmDesign& design) {
  if (design.n_blocks() != 2 || design.n_fixed() != 1) return std::nullopt;
  if (!(design.x().array() == 1.0).all()) return std::nullopt;
  const auto m = static_cast<int>(design.block_size(0));
  const auto n = static_cast<int>(design.block_size(1));
  if (m < 2 || n < 2 || design.n_obs() != static_cast<Eigen::Index>(m) * n) return std::nullopt;
  const GlmmDesign reference = build_twoway(m, n, design.y());
  if (reference.z_block(0) != design.z_block(0) || reference.z_block(1) != design.z_block(1)) {
    return std::nullopt;
  }
  return std::make_pair(m, n);
}

ErgodicityReport certify(const GlmmDesign& design, const PriorSpec& prior,
                         const CertifyOptions& options) {
  ErgodicityReport rep;
  rep.proposition1 = validate_model(design, prior, options.rank_tol);
  if (!rep.proposition1.prior_matches_design) return rep;
  rep.s_tilde = rep.proposition1.s_tilde;
  if (!rep.proposition1.s1_rank_x) return rep;

  const DesignSummary summary = summarize_design(design, options.rank_tol);
  rep.t = summary.t;
  rep.smallest_retained_eigval = summary.smallest_retained_eigval;
  rep.largest_discarded_eigval = summary.largest_discarded_eigval;
  rep.theorem1 = check_theorem1(summary, prior);
  rep.corollary1 = check_corollary1(summary, prior);

  Theorem2Check t2 = check_theorem2(summary, prior, options.grid_size);
  // The drift argument presumes a well-defined sampler.
  t2.verdict = t2.verdict && rep.proposition1.ok();
  rep.theorem2 = t2;

  if (const auto sizes = detect_oneway(design)) {
    const int c = static_cast<int>(sizes->size());
    if (prior.a[0] < 0.0 && 0.5 * c + prior.a[0] > 0.0) {
      rep.oneway = check_oneway(c, static_cast<int>(design.n_obs()), prior.a_e, prior.a[0], *sizes);
    }
  }
  if (const auto mn = detect_twoway(design)) {
    const double s = t2.search.witness.value_or(t2.search.best_s > 0.0 ? t2.search.best_s : 1.0);
    if (s > 0.0 && s < 0.5 * rep.proposition1.s_tilde) {
      rep.twoway = check_twoway(mn->first, mn->second, prior, s);
    }
  }

  if (t2.verdict && t2.search.witness) {
    const KEstimate k = estimate_k(summary, design, options.k_budget);
    rep.k = k;
    try {
      rep.drift = drift_certificate(summary, prior, *t2.search.witness, options.c, k.value);
    } catch (const Error& e) {
      if (e.code() != Errc::certificate_unavailable) throw;
    }
  }
  return rep;
}

}  // namespace mixedergo
