#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mixedergo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultRankTol = 1e-10;

/// Response y, fixed-effects design X and the random-effect designs Z_1..Z_r
/// of the model y = X beta + sum_i Z_i u_i + e. Immutable once built.
class GlmmDesign {
 public:
  /// Throws Errc::dimension_mismatch when shapes disagree or are empty and
  /// Errc::non_finite when any entry is NaN/Inf.
  GlmmDesign(Vector y, Matrix x, std::vector<Matrix> z_blocks);

  const Vector& y() const noexcept { return y_; }
  const Matrix& x() const noexcept { return x_; }
  const std::vector<Matrix>& z_blocks() const noexcept { return z_blocks_; }
  const Matrix& z_block(std::size_t i) const { return z_blocks_.at(i); }

  Eigen::Index n_obs() const noexcept { return y_.size(); }
  Eigen::Index n_fixed() const noexcept { return x_.cols(); }
  std::size_t n_blocks() const noexcept { return z_blocks_.size(); }
  Eigen::Index block_size(std::size_t i) const { return z_blocks_.at(i).cols(); }
  Eigen::Index n_random() const noexcept { return q_; }
  std::vector<Eigen::Index> block_sizes() const;
  /// Offset of block i inside u (the row where R_i starts extracting).
  Eigen::Index block_offset(std::size_t i) const { return offsets_.at(i); }

  /// Z = (Z_1 ... Z_r), assembled on demand.
  Matrix z() const;
  /// W = (X Z), assembled on demand.
  Matrix w() const;
  /// Z u computed block by block without assembling Z.
  Vector z_times(const Vector& u) const;

 private:
  Vector y_;
  Matrix x_;
  std::vector<Matrix> z_blocks_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index q_ = 0;
};

/// Hyperparameters of the power prior
///   (s2_e)^{-(a_e+1)} e^{-b_e/s2_e} prod_i (s2_i)^{-(a_i+1)} e^{-b_i/s2_i}.
/// Stored as given; sign requirements are checked by validate_model.
struct PriorSpec {
  double a_e = 0.0;
  double b_e = 0.0;
  std::vector<double> a;
  std::vector<double> b;
};

/// Everything the sampler and the ergodicity checks need from the design,
/// computed once with a single rank tolerance.
///
/// With M = Z^T (I - P_X) Z = U diag(eigvals) U^T (eigvecs holds U, one
/// eigenvector per column, eigenvalues descending):
///   t          = #{eigvals > rank_tol * lambda_max}
///   zeta_i     = tr(R_i (I - P_M) R_i^T)
///   xi_i       = tr(R_i M^+ R_i^T)
struct DesignSummary {
  Eigen::Index n_obs = 0;  // N
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::size_t r = 0;
  std::vector<Eigen::Index> q_sizes;
  std::vector<Eigen::Index> q_offsets;
  double rank_tol = kDefaultRankTol;

  Eigen::Index t = 0;
  double sse = 0.0;
  double lambda_max = 0.0;
  Matrix eigvecs;
  Vector eigvals;
  Vector zeta;
  Vector xi;
  double fro_izx_z = 0.0;   // ||(I - P_X) Z||_F
  double norm_izx_y = 0.0;  // ||(I - P_X) y||
  Vector ztilde_y;          // Z^T (I - P_X) y

  // Cutoff diagnostics: smallest eigenvalue counted towards t and largest one
  // treated as zero (0 when that side is empty).
  double smallest_retained_eigval = 0.0;
  double largest_discarded_eigval = 0.0;

  Matrix ztz_tilde;   // M
  Matrix projection;  // P_M
  Matrix pinv;        // M^+
  Matrix ztilde;      // (I - P_X) Z, N x q

  Matrix xtx_inv;        // (X^T X)^{-1}
  Matrix xtx_inv_chol;   // lower L with L L^T = (X^T X)^{-1}
  double log_det_xtx = 0.0;
  Vector beta_ols;       // (X^T X)^{-1} X^T y
  Matrix r_coef;         // R = (X^T X)^{-1} X^T Z, p x q

  Eigen::Index block_of(Eigen::Index k) const;
};

/// Builds the DesignSummary. Throws Errc::rank_deficient_x if rank(X) < p and
/// Errc::invalid_argument if rank_tol is not positive.
DesignSummary summarize_design(const GlmmDesign& design, double rank_tol = kDefaultRankTol);

/// ||(I - P_W) y||^2 via a column-pivoted QR of W.
double compute_sse(const GlmmDesign& design, double rank_tol = kDefaultRankTol);

/// Numerical rank of X from a column-pivoted QR.
Eigen::Index numerical_rank_x(const GlmmDesign& design, double rank_tol = kDefaultRankTol);

/// min{q_1 + 2a_1, ..., q_r + 2a_r, N + 2a_e}.
double s_tilde(const GlmmDesign& design, const PriorSpec& prior);
double s_tilde(const DesignSummary& summary, const PriorSpec& prior);

struct ValidationReport {
  bool s1_rank_x = false;
  bool s2_b_nonnegative = false;
  bool s3_be_sse = false;
  bool s4_s_tilde = false;
  double s_tilde = 0.0;
  double sse = 0.0;
  Eigen::Index rank_x = 0;
  bool prior_matches_design = true;

  bool ok() const noexcept {
    return prior_matches_design && s1_rank_x && s2_b_nonnegative && s3_be_sse && s4_s_tilde;
  }
};

/// Checks that the Gibbs sampler is well defined. Never throws on a failing
/// condition; failures are reported in the returned record.
ValidationReport validate_model(const GlmmDesign& design, const PriorSpec& prior,
                                double rank_tol = kDefaultRankTol);

/// One-way random effects model: X = 1_N, Z = blockdiag(1_{n_1}, ..., 1_{n_c}).
GlmmDesign build_oneway(int c, const std::vector<int>& n_sizes, Vector y);

/// Two-way additive model with one observation per cell, y in lexicographic
/// order: X = 1_{mn}, Z_1 = I_m (x) 1_n, Z_2 = 1_m (x) I_n.
GlmmDesign build_twoway(int m, int n, Vector y);

}  // namespace mixedergo
