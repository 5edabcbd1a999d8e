#include "mixedergo/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "mixedergo/error.hpp"
#include "mixedergo/rng.hpp"

namespace mixedergo {

namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  void value(std::int64_t v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    value(static_cast<std::int64_t>(m.rows()));
    value(static_cast<std::int64_t>(m.cols()));
    // Column-major storage; fingerprint is layout-stable for Eigen defaults.
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  std::string hex() const {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash_;
    return out.str();
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

double mean_of(const Vector& v, Eigen::Index n) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += v(i);
  return sum / static_cast<double>(n);
}

}  // namespace

Eigen::Index ChainRun::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<Eigen::Index>(i);
  }
  fail(Errc::invalid_argument, "unknown draw column '" + name + "'");
}

ParamState ChainRun::state(Eigen::Index row) const {
  if (row < 0 || row >= draws.rows()) fail(Errc::invalid_argument, "draw row out of range");
  const auto r_idx = static_cast<Eigen::Index>(r);
  ParamState s;
  s.beta = draws.row(row).segment(0, p).transpose();
  s.u = draws.row(row).segment(p, q).transpose();
  s.sigma2.sigma2_e = draws(row, p + q);
  s.sigma2.sigma2_u = draws.row(row).segment(p + q + 1, r_idx).transpose();
  return s;
}

std::vector<std::string> draw_column_names(Eigen::Index p,
                                           const std::vector<Eigen::Index>& q_sizes) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("beta_" + std::to_string(j + 1));
  for (std::size_t i = 0; i < q_sizes.size(); ++i) {
    for (Eigen::Index k = 0; k < q_sizes[i]; ++k) {
      names.push_back("u_" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
    }
  }
  names.emplace_back("sigma2_e");
  for (std::size_t i = 0; i < q_sizes.size(); ++i) {
    names.push_back("sigma2_u_" + std::to_string(i + 1));
  }
  return names;
}

std::string fingerprint(const GlmmDesign& design) {
  Fnv1a h;
  h.matrix(design.y());
  h.matrix(design.x());
  h.value(static_cast<std::int64_t>(design.n_blocks()));
  for (const auto& z : design.z_blocks()) h.matrix(z);
  return h.hex();
}

std::string fingerprint(const PriorSpec& prior) {
  Fnv1a h;
  h.value(prior.a_e);
  h.value(prior.b_e);
  h.value(static_cast<std::int64_t>(prior.a.size()));
  for (const double v : prior.a) h.value(v);
  h.value(static_cast<std::int64_t>(prior.b.size()));
  for (const double v : prior.b) h.value(v);
  return h.hex();
}

ChainRun run_chain(const GlmmDesign& design, const PriorSpec& prior,
                   const std::optional<ParamState>& init, const ChainConfig& config) {
  if (config.n_samples < 1) fail(Errc::invalid_argument, "n_samples must be at least 1");
  if (config.burn_in < 0) fail(Errc::invalid_argument, "burn_in must be non-negative");
  if (config.thin < 1) fail(Errc::invalid_argument, "thin must be at least 1");

  const ValidationReport report = validate_model(design, prior);
  if (!report.ok()) {
    fail(Errc::validation_failed, "model validation failed (S1 rank " +
                                      std::string(report.s1_rank_x ? "ok" : "fail") + ", S2 " +
                                      (report.s2_b_nonnegative ? "ok" : "fail") + ", S3 " +
                                      (report.s3_be_sse ? "ok" : "fail") + ", S4 " +
                                      (report.s4_s_tilde ? "ok" : "fail") + ")");
  }
  const DesignSummary summary = summarize_design(design);

  ParamState state = init.value_or(default_initial_state(summary));
  if (!state.valid(summary)) fail(Errc::invalid_argument, "initial state does not fit the design");

  ChainRun run;
  run.config = config;
  run.p = summary.p;
  run.q = summary.q;
  run.r = summary.r;
  run.columns = draw_column_names(summary.p, summary.q_sizes);
  run.draws.resize(config.n_samples, static_cast<Eigen::Index>(run.columns.size()));
  run.meta.design_fingerprint = fingerprint(design);
  run.meta.prior_fingerprint = fingerprint(prior);

  RngStream rng(config.seed);
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t total = config.burn_in + config.n_samples * config.thin;
  Eigen::Index row = 0;
  for (std::int64_t iter = 1; iter <= total; ++iter) {
    state = gibbs_step(state, summary, design, prior, rng);
    if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
      auto out = run.draws.row(row++);
      out.segment(0, run.p) = state.beta.transpose();
      out.segment(run.p, run.q) = state.u.transpose();
      out(run.p + run.q) = state.sigma2.sigma2_e;
      out.segment(run.p + run.q + 1, static_cast<Eigen::Index>(run.r)) =
          state.sigma2.sigma2_u.transpose();
    }
  }
  run.meta.iterations = total;
  run.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

DrawFunction select_column(Eigen::Index index) {
  if (index < 0) fail(Errc::invalid_argument, "negative column index");
  return [index](const Eigen::Ref<const Vector>& row) {
    if (index >= row.size()) fail(Errc::invalid_argument, "column index out of range");
    return row(index);
  };
}

DrawFunction select_column(const ChainRun& run, const std::string& name) {
  return select_column(run.column(name));
}

Vector evaluate(const ChainRun& run, const DrawFunction& g) {
  if (run.draws.rows() == 0) fail(Errc::too_few_samples, "chain has no draws");
  Vector out(run.draws.rows());
  for (Eigen::Index i = 0; i < run.draws.rows(); ++i) {
    const Vector row = run.draws.row(i).transpose();
    out(i) = g(row);
    if (!std::isfinite(out(i))) {
      fail(Errc::non_finite, "g is not finite at draw " + std::to_string(i));
    }
  }
  return out;
}

double ergodic_average(const Vector& series) {
  if (series.size() == 0) fail(Errc::too_few_samples, "empty series");
  if (!series.allFinite()) fail(Errc::non_finite, "series has non-finite values");
  return mean_of(series, series.size());
}

double ergodic_average(const ChainRun& run, const DrawFunction& g) {
  return ergodic_average(evaluate(run, g));
}

Eigen::Index default_batch_count(Eigen::Index n_samples) {
  return static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(n_samples))));
}

McseResult batch_means_mcse(const Vector& series, std::optional<Eigen::Index> n_batches) {
  const Eigen::Index n = series.size();
  const Eigen::Index a = n_batches.value_or(default_batch_count(n));
  if (a < 2 || n < 2 * a) {
    fail(Errc::too_few_samples, "batch means needs n_batches >= 2 and n >= 2 n_batches (n = " +
                                    std::to_string(n) + ", n_batches = " + std::to_string(a) + ")");
  }
  if (!series.allFinite()) fail(Errc::non_finite, "series has non-finite values");
  McseResult out;
  out.n_batches = a;
  out.batch_size = n / a;
  out.n_used = a * out.batch_size;
  out.estimate = ergodic_average(Vector(series.head(out.n_used)));

  const Vector used = series.head(out.n_used);
  if (used.minCoeff() == used.maxCoeff()) return out;  // rounding in the sums would leak noise

  double ss = 0.0;
  for (Eigen::Index k = 0; k < a; ++k) {
    const double batch_mean = series.segment(k * out.batch_size, out.batch_size).mean();
    ss += (batch_mean - out.estimate) * (batch_mean - out.estimate);
  }
  out.std_error = std::sqrt(ss / (static_cast<double>(a - 1) * static_cast<double>(a)));
  return out;
}

McseResult batch_means_mcse(const ChainRun& run, const DrawFunction& g,
                            std::optional<Eigen::Index> n_batches) {
  return batch_means_mcse(evaluate(run, g), n_batches);
}

}  // namespace mixedergo
