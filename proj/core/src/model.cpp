#include "mixedergo/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mixedergo/error.hpp"

namespace mixedergo {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_rank_tol(double rank_tol) {
  if (!(rank_tol > 0.0) || !std::isfinite(rank_tol)) {
    fail(Errc::invalid_argument, "rank_tol must be positive and finite");
  }
}

// Column-pivoted QR whose |R_ii| cutoff is sqrt(rank_tol) relative to the
// largest pivot, i.e. the same cutoff rank_tol applied to Gram eigenvalues.
Eigen::ColPivHouseholderQR<Matrix> pivoted_qr(const Matrix& a, double rank_tol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(std::sqrt(rank_tol));
  return qr;
}

}  // namespace

GlmmDesign::GlmmDesign(Vector y, Matrix x, std::vector<Matrix> z_blocks)
    : y_(std::move(y)), x_(std::move(x)), z_blocks_(std::move(z_blocks)) {
  const auto n = y_.size();
  if (n < 1) fail(Errc::dimension_mismatch, "y must have at least one entry");
  if (x_.rows() != n) {
    fail(Errc::dimension_mismatch, "X has " + std::to_string(x_.rows()) + " rows, y has " +
                                       std::to_string(n) + " entries");
  }
  if (x_.cols() < 1) fail(Errc::dimension_mismatch, "X needs at least one column");
  if (z_blocks_.empty()) fail(Errc::dimension_mismatch, "at least one random-effect block required");
  if (!y_.allFinite() || !all_finite(x_)) fail(Errc::non_finite, "y and X must be finite");
  offsets_.reserve(z_blocks_.size());
  for (std::size_t i = 0; i < z_blocks_.size(); ++i) {
    const Matrix& zi = z_blocks_[i];
    if (zi.rows() != n) {
      fail(Errc::dimension_mismatch, "Z_" + std::to_string(i + 1) + " has " +
                                         std::to_string(zi.rows()) + " rows, expected " +
                                         std::to_string(n));
    }
    if (zi.cols() < 1) {
      fail(Errc::dimension_mismatch, "Z_" + std::to_string(i + 1) + " needs at least one column");
    }
    if (!all_finite(zi)) fail(Errc::non_finite, "Z_" + std::to_string(i + 1) + " must be finite");
    offsets_.push_back(q_);
    q_ += zi.cols();
  }
}

std::vector<Eigen::Index> GlmmDesign::block_sizes() const {
  std::vector<Eigen::Index> sizes;
  sizes.reserve(z_blocks_.size());
  for (const auto& zi : z_blocks_) sizes.push_back(zi.cols());
  return sizes;
}

Matrix GlmmDesign::z() const {
  Matrix z(n_obs(), q_);
  for (std::size_t i = 0; i < z_blocks_.size(); ++i) {
    z.middleCols(offsets_[i], z_blocks_[i].cols()) = z_blocks_[i];
  }
  return z;
}

Matrix GlmmDesign::w() const {
  Matrix w(n_obs(), n_fixed() + q_);
  w.leftCols(n_fixed()) = x_;
  w.rightCols(q_) = z();
  return w;
}

Vector GlmmDesign::z_times(const Vector& u) const {
  if (u.size() != q_) fail(Errc::dimension_mismatch, "u has wrong length");
  Vector out = Vector::Zero(n_obs());
  for (std::size_t i = 0; i < z_blocks_.size(); ++i) {
    out.noalias() += z_blocks_[i] * u.segment(offsets_[i], z_blocks_[i].cols());
  }
  return out;
}

Eigen::Index DesignSummary::block_of(Eigen::Index k) const {
  for (std::size_t i = q_offsets.size(); i-- > 0;) {
    if (k >= q_offsets[i]) return static_cast<Eigen::Index>(i);
  }
  return 0;
}

Eigen::Index numerical_rank_x(const GlmmDesign& design, double rank_tol) {
  require_rank_tol(rank_tol);
  return pivoted_qr(design.x(), rank_tol).rank();
}

double compute_sse(const GlmmDesign& design, double rank_tol) {
  require_rank_tol(rank_tol);
  const Matrix w = design.w();
  const auto qr = pivoted_qr(w, rank_tol);
  const Eigen::Index rank = qr.rank();
  Vector c = design.y();
  c.applyOnTheLeft(qr.householderQ().adjoint());
  const double sse = c.tail(c.size() - rank).squaredNorm();
  // Exact fits leave only rounding noise behind; report those as zero.
  if (sse <= 1e-20 * design.y().squaredNorm()) return 0.0;
  return sse;
}

DesignSummary summarize_design(const GlmmDesign& design, double rank_tol) {
  require_rank_tol(rank_tol);
  const Eigen::Index n = design.n_obs();
  const Eigen::Index p = design.n_fixed();
  const Eigen::Index q = design.n_random();

  const Eigen::Index rank_x = numerical_rank_x(design, rank_tol);
  if (rank_x < p) {
    fail(Errc::rank_deficient_x, "rank(X) = " + std::to_string(rank_x) + " < p = " +
                                     std::to_string(p) + "; the posterior is improper");
  }

  DesignSummary s;
  s.n_obs = n;
  s.p = p;
  s.q = q;
  s.r = design.n_blocks();
  s.q_sizes = design.block_sizes();
  s.rank_tol = rank_tol;
  for (std::size_t i = 0; i < s.r; ++i) s.q_offsets.push_back(design.block_offset(i));

  // Thin QR of X (full column rank).
  Eigen::HouseholderQR<Matrix> xqr(design.x());
  const Matrix qx = xqr.householderQ() * Matrix::Identity(n, p);
  const Matrix rx = xqr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const auto rx_tri = rx.triangularView<Eigen::Upper>();

  const Matrix z = design.z();
  const Vector& y = design.y();

  s.ztilde = z - qx * (qx.transpose() * z);
  const Vector izx_y = y - qx * (qx.transpose() * y);
  s.norm_izx_y = izx_y.norm();
  s.fro_izx_z = s.ztilde.norm();
  s.ztilde_y = s.ztilde.transpose() * y;

  Matrix m = s.ztilde.transpose() * s.ztilde;
  m = 0.5 * (m + m.transpose()).eval();
  s.ztz_tilde = m;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) fail(Errc::non_finite, "eigendecomposition failed");
  // Eigen sorts ascending; store descending.
  s.eigvals = eig.eigenvalues().reverse();
  s.eigvecs = eig.eigenvectors().rowwise().reverse();

  s.lambda_max = std::max(0.0, s.eigvals.size() > 0 ? s.eigvals(0) : 0.0);
  // Relative cutoff, plus a floor at the rounding level of ||Z||_F^2 so that
  // Z inside col(X) is not promoted to full rank by noise.
  const double noise_floor =
      64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) * z.squaredNorm();
  const double cutoff = std::max(rank_tol * s.lambda_max, noise_floor);

  s.projection = Matrix::Zero(q, q);
  s.pinv = Matrix::Zero(q, q);
  s.t = 0;
  for (Eigen::Index k = 0; k < q; ++k) {
    const double lambda = s.eigvals(k);
    if (lambda > cutoff) {
      ++s.t;
      const auto v = s.eigvecs.col(k);
      s.projection.noalias() += v * v.transpose();
      s.pinv.noalias() += (v / lambda) * v.transpose();
      s.smallest_retained_eigval = lambda;
    } else if (s.largest_discarded_eigval == 0.0) {
      s.largest_discarded_eigval = std::max(lambda, 0.0);
    }
  }

  s.zeta = Vector::Zero(static_cast<Eigen::Index>(s.r));
  s.xi = Vector::Zero(static_cast<Eigen::Index>(s.r));
  for (std::size_t i = 0; i < s.r; ++i) {
    const Eigen::Index off = s.q_offsets[i];
    const Eigen::Index len = s.q_sizes[i];
    const auto idx = static_cast<Eigen::Index>(i);
    // Mass of the discarded eigenvectors on block i, exactly zero when t = q.
    s.zeta(idx) = s.eigvecs.block(off, s.t, len, q - s.t).squaredNorm();
    s.xi(idx) = std::max(0.0, s.pinv.diagonal().segment(off, len).sum());
  }

  // (X^T X)^{-1} = R^{-1} R^{-T}.
  const Matrix rinv = rx_tri.solve(Matrix::Identity(p, p));
  s.xtx_inv = rinv * rinv.transpose();
  s.xtx_inv = 0.5 * (s.xtx_inv + s.xtx_inv.transpose()).eval();
  s.xtx_inv_chol = Eigen::LLT<Matrix>(s.xtx_inv).matrixL();
  s.log_det_xtx = 2.0 * rx.diagonal().cwiseAbs().array().log().sum();
  s.beta_ols = rx_tri.solve(qx.transpose() * y);
  s.r_coef = rx_tri.solve(qx.transpose() * z);

  s.sse = compute_sse(design, rank_tol);
  return s;
}

double s_tilde(const DesignSummary& summary, const PriorSpec& prior) {
  double st = static_cast<double>(summary.n_obs) + 2.0 * prior.a_e;
  for (std::size_t i = 0; i < summary.r && i < prior.a.size(); ++i) {
    st = std::min(st, static_cast<double>(summary.q_sizes[i]) + 2.0 * prior.a[i]);
  }
  return st;
}

double s_tilde(const GlmmDesign& design, const PriorSpec& prior) {
  double st = static_cast<double>(design.n_obs()) + 2.0 * prior.a_e;
  for (std::size_t i = 0; i < design.n_blocks() && i < prior.a.size(); ++i) {
    st = std::min(st, static_cast<double>(design.block_size(i)) + 2.0 * prior.a[i]);
  }
  return st;
}

ValidationReport validate_model(const GlmmDesign& design, const PriorSpec& prior,
                                double rank_tol) {
  ValidationReport rep;
  rep.prior_matches_design =
      prior.a.size() == design.n_blocks() && prior.b.size() == design.n_blocks();
  rep.rank_x = numerical_rank_x(design, rank_tol);
  rep.s1_rank_x = rep.rank_x == design.n_fixed();
  rep.s2_b_nonnegative = rep.prior_matches_design && prior.b_e >= 0.0 &&
                         std::all_of(prior.b.begin(), prior.b.end(),
                                     [](double b) { return b >= 0.0; });
  rep.sse = compute_sse(design, rank_tol);
  rep.s3_be_sse = 2.0 * prior.b_e + rep.sse > 0.0;
  rep.s_tilde = s_tilde(design, prior);
  rep.s4_s_tilde = rep.prior_matches_design && rep.s_tilde > 0.0;
  return rep;
}

GlmmDesign build_oneway(int c, const std::vector<int>& n_sizes, Vector y) {
  if (c < 2) fail(Errc::dimension_mismatch, "one-way model needs c >= 2");
  if (static_cast<int>(n_sizes.size()) != c) {
    fail(Errc::dimension_mismatch, "need exactly c group sizes");
  }
  if (std::any_of(n_sizes.begin(), n_sizes.end(), [](int ni) { return ni < 1; })) {
    fail(Errc::dimension_mismatch, "group sizes must be >= 1");
  }
  const int n = std::accumulate(n_sizes.begin(), n_sizes.end(), 0);
  if (y.size() != n) {
    fail(Errc::dimension_mismatch,
         "y has " + std::to_string(y.size()) + " entries, group sizes sum to " + std::to_string(n));
  }
  Matrix z = Matrix::Zero(n, c);
  int row = 0;
  for (int g = 0; g < c; ++g) {
    z.block(row, g, n_sizes[static_cast<std::size_t>(g)], 1).setOnes();
    row += n_sizes[static_cast<std::size_t>(g)];
  }
  return GlmmDesign(std::move(y), Matrix::Ones(n, 1), {std::move(z)});
}

GlmmDesign build_twoway(int m, int n, Vector y) {
  if (m < 2 || n < 2) fail(Errc::dimension_mismatch, "two-way model needs m, n >= 2");
  const Eigen::Index total = static_cast<Eigen::Index>(m) * n;
  if (y.size() != total) {
    fail(Errc::dimension_mismatch,
         "y has " + std::to_string(y.size()) + " entries, expected m*n = " + std::to_string(total));
  }
  Matrix z1 = Matrix::Zero(total, m);
  Matrix z2 = Matrix::Zero(total, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * n + j;
      z1(row, i) = 1.0;
      z2(row, j) = 1.0;
    }
  }
  return GlmmDesign(std::move(y), Matrix::Ones(total, 1), {std::move(z1), std::move(z2)});
}

}  // namespace mixedergo
