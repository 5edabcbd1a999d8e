#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "mixedergo/kernel.hpp"
#include "mixedergo/model.hpp"

namespace mixedergo {

inline constexpr int kDefaultWitnessGrid = 4096;
inline constexpr int kDefaultKBudget = 2000;

/// Sufficient conditions for a proper posterior (Sun, Tsutakawa and He).
struct Theorem1Check {
  bool verdict = false;
  std::vector<bool> cond_a;  // a_i < b_i = 0 or b_i > 0
  std::vector<bool> cond_b;  // q_i + 2 a_i > q - t
  bool cond_c = false;       // N + 2 a_e > p - 2 sum_i a_i 1(a_i < 0)
  bool cond_d = false;       // 2 b_e + SSE > 0
};

/// Easy-to-check sufficient conditions for geometric ergodicity.
struct Corollary1Check {
  bool verdict = false;
  std::vector<bool> cond_a;
  std::vector<bool> cond_b_prime;  // q_i + 2 a_i > q - t + 2
  bool cond_c_prime = false;       // N + 2 a_e > p + t + 2
  bool cond_d = false;
};

enum class WitnessStatus {
  found,
  not_found_at_resolution,
  precheck_failed,
  condition1_failed,
  empty_interval,
};

const char* to_string(WitnessStatus status) noexcept;

/// Outcome of the grid search for s in (0, 1] with s < s_tilde / 2 making
/// both drift-rate left-hand sides smaller than one.
struct WitnessSearch {
  WitnessStatus status = WitnessStatus::empty_interval;
  std::optional<double> witness;
  double lhs_e = 0.0;  // at the witness (or at the best grid point)
  double lhs_u = 0.0;
  double best_max = 0.0;  // min over the grid of max(lhs_e, lhs_u); NaN if no grid point
  double best_s = 0.0;
  int grid_size = 0;
  double interval_hi = 0.0;
  std::vector<bool> condition1;  // a_i < b_i = 0 or b_i > 0
  bool precheck_e = false;       // N + 2 a_e > p + t
  std::vector<bool> precheck_u;  // q_i + 2 a_i > zeta_i
};

struct Theorem2Check {
  bool verdict = false;
  WitnessSearch search;
};

/// One-way model specialisation: the closed-form condition
///   N + 2a_e >= c + 2 and 1 < 2 exp(Psi(c/2 + a_1))
/// and, when group sizes are known, the older Tan-Hobert condition
///   N + 2a_e >= c + 3 and c min{(sum n_i/(n_i+1))^{-1}, n*/N} < 2 exp(Psi(c/2 + a_1)).
struct OnewayCheck {
  int c = 0;
  int n_total = 0;
  double a_e = 0.0;
  double a_1 = 0.0;
  double two_exp_digamma = 0.0;
  bool sample_size_ok = false;
  bool digamma_ok = false;
  bool verdict = false;
  std::optional<bool> tan_hobert;
  std::optional<double> tan_hobert_lhs;
  bool implication_holds = true;  // tan_hobert => verdict
};

/// Two-way model (one observation per cell) with the reduced left-hand sides
/// 2^{-s}(m+n-1)^s G(mn/2+a_e, s) and 2^{-s}[G(m/2+a_1, s) + G(n/2+a_2, s)].
struct TwowayCheck {
  int m = 0;
  int n = 0;
  double s = 0.0;
  double lhs_e = 0.0;
  double lhs_u = 0.0;
  bool verdict = false;  // both < 1 at s
};

/// Drift certificate E[v(s2') | s2] <= rho v(s2) + L for
///   v = alpha s2_e^s + sum s2_ui^s + alpha s2_e^{-c} + sum s2_ui^{-c}.
struct DriftCertificate {
  double s = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double L = 0.0;
  std::array<double, 5> delta{};
  double kappa = 0.0;
  double k_estimate = 0.0;  // numerically estimated, not a proven bound
  bool l_is_estimate = true;
  bool null_blocks_present = false;  // A = {i : b_i = 0} non-empty
};

struct KEstimate {
  double value = 0.0;
  double h_route = 0.0;
  double per_term_route = 0.0;
  int points = 0;
};

struct ErgodicityReport {
  ValidationReport proposition1;
  std::optional<double> s_tilde;
  std::optional<Eigen::Index> t;
  std::optional<Theorem1Check> theorem1;
  std::optional<Corollary1Check> corollary1;
  std::optional<Theorem2Check> theorem2;
  std::optional<OnewayCheck> oneway;
  std::optional<TwowayCheck> twoway;
  std::optional<DriftCertificate> drift;
  std::optional<KEstimate> k;
  double smallest_retained_eigval = 0.0;
  double largest_discarded_eigval = 0.0;
};

Theorem1Check check_theorem1(const DesignSummary& summary, const PriorSpec& prior);
Corollary1Check check_corollary1(const DesignSummary& summary, const PriorSpec& prior);

/// Per-block "a_i < b_i = 0 or b_i > 0".
std::vector<bool> check_condition1(const PriorSpec& prior);

/// 2^{-s} (p+t)^s Gamma(N/2 + a_e - s) / Gamma(N/2 + a_e).
double lhs_condition_e(double s, const DesignSummary& summary, const PriorSpec& prior);
/// 2^{-s} sum_i Gamma(q_i/2 + a_i - s) / Gamma(q_i/2 + a_i) zeta_i^s.
double lhs_condition_u(double s, const DesignSummary& summary, const PriorSpec& prior);

WitnessSearch search_witness_s(const DesignSummary& summary, const PriorSpec& prior,
                               int grid_size = kDefaultWitnessGrid);

Theorem2Check check_theorem2(const DesignSummary& summary, const PriorSpec& prior,
                             int grid_size = kDefaultWitnessGrid);

OnewayCheck check_oneway(int c, int n_total, double a_e, double a_1,
                         const std::optional<std::vector<int>>& n_sizes = std::nullopt);

TwowayCheck check_twoway(int m, int n, const PriorSpec& prior, double s);

/// Builds the drift certificate at witness s. `c` defaults to min(1/4, a~/2)
/// with a~ = -max_{i: b_i = 0} a_i (or 1/4 when every b_i > 0).
DriftCertificate drift_certificate(const DesignSummary& summary, const PriorSpec& prior, double s,
                                   std::optional<double> c, double k_estimate);

double drift_function(const DriftCertificate& cert, const VarianceComponents& sigma2);

/// || (s2_e)^{-1} Q^{-1} Z^T (I - P_X) y ||.
double h_norm(const DesignSummary& summary, const VarianceComponents& sigma2);

/// Lower estimate of the constant bounding h over all variance components.
KEstimate estimate_k(const DesignSummary& summary, const GlmmDesign& design, int budget);

std::optional<std::vector<int>> detect_oneway(const GlmmDesign& design);
std::optional<std::pair<int, int>> detect_twoway(const GlmmDesign& design);

struct CertifyOptions {
  double rank_tol = kDefaultRankTol;
  int grid_size = kDefaultWitnessGrid;
  int k_budget = kDefaultKBudget;
  std::optional<double> c;
};

/// Runs every check that applies and collects the verdicts.
ErgodicityReport certify(const GlmmDesign& design, const PriorSpec& prior,
                         const CertifyOptions& options = {});

}  // namespace mixedergo
