#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixedergo/kernel.hpp"
#include "mixedergo/model.hpp"

namespace mixedergo {

struct ChainConfig {
  std::int64_t burn_in = 0;
  std::int64_t n_samples = 1000;
  std::int64_t thin = 1;
  std::uint64_t seed = 20240101ULL;
};

struct ChainMeta {
  double wall_seconds = 0.0;
  std::int64_t iterations = 0;
  std::string design_fingerprint;
  std::string prior_fingerprint;
};

/// Retained draws, one row per kept iteration laid out as
/// (beta_1..beta_p, u_1..u_q, sigma2_e, sigma2_u1..sigma2_ur).
struct ChainRun {
  ChainConfig config;
  Matrix draws;
  std::vector<std::string> columns;
  ChainMeta meta;
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::size_t r = 0;

  Eigen::Index n_samples() const { return draws.rows(); }
  /// Column index by name; throws Errc::invalid_argument when absent.
  Eigen::Index column(const std::string& name) const;
  ParamState state(Eigen::Index row) const;
};

/// Column names matching ChainRun::draws for a design with the given shape.
std::vector<std::string> draw_column_names(Eigen::Index p, const std::vector<Eigen::Index>& q_sizes);

/// FNV-1a (64 bit) over dimensions and the raw bytes of every entry, as hex.
std::string fingerprint(const GlmmDesign& design);
std::string fingerprint(const PriorSpec& prior);

ChainRun run_chain(const GlmmDesign& design, const PriorSpec& prior,
                   const std::optional<ParamState>& init, const ChainConfig& config);

/// A real-valued function of one draw row.
using DrawFunction = std::function<double(const Eigen::Ref<const Vector>&)>;

DrawFunction select_column(Eigen::Index index);
DrawFunction select_column(const ChainRun& run, const std::string& name);

/// g evaluated on every retained draw; throws Errc::non_finite on a bad value.
Vector evaluate(const ChainRun& run, const DrawFunction& g);

double ergodic_average(const Vector& series);
double ergodic_average(const ChainRun& run, const DrawFunction& g);

struct McseResult {
  double estimate = 0.0;
  double std_error = 0.0;
  Eigen::Index n_batches = 0;
  Eigen::Index batch_size = 0;
  Eigen::Index n_used = 0;
};

/// floor(sqrt(n)).
Eigen::Index default_batch_count(Eigen::Index n_samples);

/// Non-overlapping batch means over the first n_batches * floor(n / n_batches)
/// values. Requires n_batches >= 2 and n >= 2 n_batches (Errc::too_few_samples).
McseResult batch_means_mcse(const Vector& series, std::optional<Eigen::Index> n_batches = {});
McseResult batch_means_mcse(const ChainRun& run, const DrawFunction& g,
                            std::optional<Eigen::Index> n_batches = {});

}  // namespace mixedergo
