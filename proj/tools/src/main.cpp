#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "logging.hpp"
#include "mixedergo/error.hpp"

using namespace mixedergo;
using namespace mixedergo::cli;

namespace {

void add_chain_flags(CLI::App* cmd, ChainOptions& chain) {
  cmd->add_option("--seed", chain.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--burn-in", chain.burn_in, "iterations discarded before retaining draws")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--samples", chain.samples, "retained draws")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--thin", chain.thin, "keep every thin-th iteration")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_grid_flag(CLI::App* cmd, int& grid) {
  cmd->add_option("--grid-size", grid, "points in the witness search grid")
      ->check(CLI::Range(2, 1 << 22))
      ->capture_default_str();
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::validation_failed:
    case Errc::rank_deficient_x:
      return kUnestablished;
    default:
      return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();

  CLI::App app{"Posterior propriety and geometric ergodicity checks for the block Gibbs sampler of "
               "normal linear mixed models, plus a seeded sampler and batch-means analysis.",
               "mixedergo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mixedergo 0.1.0");

  CheckOptions check;
  auto* c_check = app.add_subcommand("check", "certify a model; exit 0 certified, 3 proper only, 4 unestablished");
  c_check->add_option("--design", check.design, "design manifest (JSON)")->required();
  c_check->add_option("--prior", check.prior, "prior file (JSON)")->required();
  add_grid_flag(c_check, check.grid_size);
  c_check->add_option("--out", check.out, "also write the report to this file");

  SampleOptions sample;
  auto* c_sample = app.add_subcommand("sample", "run the Gibbs sampler and write draws.csv and draws.json");
  c_sample->add_option("--design", sample.design, "design manifest (JSON)")->required();
  c_sample->add_option("--prior", sample.prior, "prior file (JSON)")->required();
  c_sample->add_option("--out", sample.out, "output directory")->required();
  add_grid_flag(c_sample, sample.grid_size);
  add_chain_flags(c_sample, sample.chain);
  c_sample->add_flag("--force", sample.force, "sample even when propriety is not established");

  AnalyzeOptions analyze;
  std::optional<std::int64_t> analyze_batches;
  auto* c_analyze = app.add_subcommand("analyze", "posterior means and batch-means MCSE for a sampled run");
  c_analyze->add_option("--run", analyze.run, "directory written by `sample`")->required();
  c_analyze->add_option("--batches", analyze_batches, "number of batches (default floor(sqrt(n)))");
  c_analyze->add_option("--out", analyze.out, "also write the estimates to this file");

  VerifyOptions verify;
  auto* c_verify = app.add_subcommand("verify", "Monte Carlo and matrix checks of the bounds behind the certificate");
  c_verify->add_option("--design", verify.design, "design manifest (JSON)")->required();
  c_verify->add_option("--prior", verify.prior, "prior file (JSON)")->required();
  add_grid_flag(c_verify, verify.grid_size);
  c_verify->add_option("--seed", verify.seed, "RNG seed")->capture_default_str();
  c_verify->add_option("--points", verify.points, "variance points to test")->check(CLI::PositiveNumber)->capture_default_str();
  c_verify->add_option("--mc", verify.mc, "Monte Carlo draws per drift point")->check(CLI::Range(2, 100000000))->capture_default_str();
  c_verify->add_option("--out", verify.out, "also write the report to this file");

  DemoOptions demo;
  std::optional<std::int64_t> demo_batches;
  auto* c_demo = app.add_subcommand("demo", "generate a built-in example, then check, sample and analyze it");
  c_demo->add_option("name", demo.name, "oneway or twoway")->required()->check(CLI::IsMember({"oneway", "twoway"}));
  c_demo->add_option("--out", demo.out, "output directory")->required();
  c_demo->add_option("--total-n", demo.total_n, "oneway only: total observations (default 9)")->check(CLI::PositiveNumber);
  add_grid_flag(c_demo, demo.grid_size);
  add_chain_flags(c_demo, demo.chain);
  c_demo->add_option("--batches", demo_batches, "number of batches for the MCSE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*c_check) return cmd_check(check);
    if (*c_sample) return cmd_sample(sample);
    if (*c_analyze) {
      if (analyze_batches) analyze.batches = static_cast<Eigen::Index>(*analyze_batches);
      return cmd_analyze(analyze);
    }
    if (*c_verify) return cmd_verify(verify);
    if (*c_demo) {
      if (demo_batches) demo.batches = static_cast<Eigen::Index>(*demo_batches);
      return cmd_demo(demo);
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  }
  return kInputError;
}
