#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mixedergo/ergodicity.hpp"
#include "mixedergo/mcmc.hpp"

namespace mixedergo::cli {

namespace fs = std::filesystem;

/// Stable exit-code contract.
enum ExitCode : int {
  kCertified = 0,
  kInputError = 2,
  kProperUncertified = 3,
  kUnestablished = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 20240101ULL;

struct CheckOptions {
  fs::path design;
  fs::path prior;
  int grid_size = kDefaultWitnessGrid;
  std::optional<fs::path> out;
};

struct ChainOptions {
  std::uint64_t seed = kDefaultSeed;
  std::int64_t burn_in = 1000;
  std::int64_t samples = 10000;
  std::int64_t thin = 1;
};

struct SampleOptions {
  fs::path design;
  fs::path prior;
  fs::path out;
  int grid_size = kDefaultWitnessGrid;
  ChainOptions chain;
  bool force = false;
};

struct AnalyzeOptions {
  fs::path run;
  std::optional<Eigen::Index> batches;
  std::optional<fs::path> out;
};

struct VerifyOptions {
  fs::path design;
  fs::path prior;
  int grid_size = kDefaultWitnessGrid;
  std::uint64_t seed = kDefaultSeed;
  int points = 20;
  int mc = 10000;
  std::optional<fs::path> out;
};

struct DemoOptions {
  std::string name;  // "oneway" or "twoway"
  fs::path out;
  std::optional<int> total_n;
  int grid_size = kDefaultWitnessGrid;
  ChainOptions chain{kDefaultSeed, 1000, 20000, 1};
  std::optional<Eigen::Index> batches;
};

int cmd_check(const CheckOptions& opts);
int cmd_sample(const SampleOptions& opts);
int cmd_analyze(const AnalyzeOptions& opts);
int cmd_verify(const VerifyOptions& opts);
int cmd_demo(const DemoOptions& opts);

// Pieces shared by the commands and the demo.
int verdict_exit_code(const ErgodicityReport& rep);
const char* verdict_label(int code);
nlohmann::json check_output(const ErgodicityReport& rep);
nlohmann::json certificate_status(const ErgodicityReport& rep, bool forced);
nlohmann::json estimates_json(const ChainRun& run, std::optional<Eigen::Index> batches,
                              const nlohmann::json& certificate);
void write_json(const fs::path& path, const nlohmann::json& j);
/// Samples and writes draws.csv plus draws.json into `dir`; returns the run.
ChainRun sample_into(const GlmmDesign& design, const PriorSpec& prior, const ChainOptions& chain,
                     const nlohmann::json& certificate, const fs::path& dir);

}  // namespace mixedergo::cli
