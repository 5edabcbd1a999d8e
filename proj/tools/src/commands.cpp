#include "commands.hpp"

#include <cmath>
#include <iostream>

#include <spdlog/spdlog.h>

#include "mixedergo/error.hpp"
#include "mixedergo/io.hpp"
#include "mixedergo/oracle.hpp"
#include "mixedergo/rng.hpp"
#include "mixedergo/serialize.hpp"

namespace mixedergo::cli {

using nlohmann::json;

namespace {

constexpr const char* kDrawsCsv = "draws.csv";
constexpr const char* kDrawsJson = "draws.json";

void emit(const json& j, const std::optional<fs::path>& out) {
  std::cout << j.dump(2) << '\n';
  if (out) write_json(*out, j);
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fail(Errc::io_error, "cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

}  // namespace

int verdict_exit_code(const ErgodicityReport& rep) {
  if (rep.theorem2 && rep.theorem2->verdict) return kCertified;
  if (rep.proposition1.ok() && rep.theorem1 && rep.theorem1->verdict) return kProperUncertified;
  return kUnestablished;
}

const char* verdict_label(int code) {
  switch (code) {
    case kCertified:
      return "geometrically_ergodic";
    case kProperUncertified:
      return "proper_uncertified";
    default:
      return "unestablished";
  }
}

json check_output(const ErgodicityReport& rep) {
  const int code = verdict_exit_code(rep);
  json j = to_json(rep);
  j["verdict"] = verdict_label(code);
  j["exit_code"] = code;
  return j;
}

json certificate_status(const ErgodicityReport& rep, bool forced) {
  const int code = verdict_exit_code(rep);
  json j = {{"verdict", verdict_label(code)}, {"exit_code", code}, {"forced", forced}};
  j["witness_s"] = rep.theorem2 && rep.theorem2->search.witness ? json(*rep.theorem2->search.witness) : json(nullptr);
  j["rho"] = rep.drift ? json(rep.drift->rho) : json(nullptr);
  return j;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json estimates_json(const ChainRun& run, std::optional<Eigen::Index> batches, const json& certificate) {
  json cols = json::array();
  for (std::size_t k = 0; k < run.columns.size(); ++k) {
    const McseResult m = batch_means_mcse(run, select_column(static_cast<Eigen::Index>(k)), batches);
    cols.push_back({{"name", run.columns[k]},
                    {"mean", m.estimate},
                    {"mcse", m.std_error},
                    {"n_batches", m.n_batches},
                    {"batch_size", m.batch_size},
                    {"n_used", m.n_used}});
  }
  return {{"n_samples", run.n_samples()},
          {"columns", cols},
          {"certificate", certificate},
          {"clt_assumption",
           "standard errors assume a CLT holds, which needs a finite 2+delta posterior moment of each coordinate; "
           "this is not checked"}};
}

ChainRun sample_into(const GlmmDesign& design, const PriorSpec& prior, const ChainOptions& chain,
                     const json& certificate, const fs::path& dir) {
  ensure_directory(dir);
  ChainConfig cfg;
  cfg.seed = chain.seed;
  cfg.burn_in = chain.burn_in;
  cfg.n_samples = chain.samples;
  cfg.thin = chain.thin;
  spdlog::info("sampling {} draws (burn-in {}, thin {}, seed {})", cfg.n_samples, cfg.burn_in, cfg.thin, cfg.seed);
  ChainRun run = run_chain(design, prior, std::nullopt, cfg);
  json side = chain_sidecar(run);
  side["certificate"] = certificate;
  side["draws"] = kDrawsCsv;
  write_file_atomic(dir / kDrawsCsv, format_csv(run.draws));
  write_json(dir / kDrawsJson, side);
  spdlog::info("wrote {} and {}", (dir / kDrawsCsv).string(), (dir / kDrawsJson).string());
  return run;
}

int cmd_check(const CheckOptions& opts) {
  const GlmmDesign design = load_design_manifest(opts.design);
  const PriorSpec prior = load_prior(opts.prior);
  CertifyOptions co;
  co.grid_size = opts.grid_size;
  const ErgodicityReport rep = certify(design, prior, co);
  const json out = check_output(rep);
  emit(out, opts.out);
  return out["exit_code"].get<int>();
}

int cmd_sample(const SampleOptions& opts) {
  const GlmmDesign design = load_design_manifest(opts.design);
  const PriorSpec prior = load_prior(opts.prior);
  CertifyOptions co;
  co.grid_size = opts.grid_size;
  const ErgodicityReport rep = certify(design, prior, co);
  const int code = verdict_exit_code(rep);
  bool forced = false;
  if (code == kUnestablished) {
    if (!rep.proposition1.ok()) {
      spdlog::error("the model fails its validity checks; the sampler is not defined (see `mixedergo check`)");
      return kUnestablished;
    }
    if (!opts.force) {
      spdlog::error("posterior propriety is not established; rerun with --force to sample anyway");
      return kUnestablished;
    }
    forced = true;
    spdlog::warn("sampling without a propriety guarantee (--force); an improper posterior leaves the chain "
                 "without a stationary distribution and averages meaningless");
  } else if (code == kProperUncertified) {
    spdlog::warn("posterior is proper but no drift witness was found; standard errors are not justified");
  }
  sample_into(design, prior, opts.chain, certificate_status(rep, forced), opts.out);
  return 0;
}

int cmd_analyze(const AnalyzeOptions& opts) {
  const json side = json::parse(read_file(opts.run / kDrawsJson), nullptr, false);
  if (side.is_discarded() || !side.is_object()) fail(Errc::parse_error, "malformed " + (opts.run / kDrawsJson).string());
  ChainRun run;
  try {
    run.columns = side.at("columns").get<std::vector<std::string>>();
    run.config = chain_config_from_json(side.at("config"));
    run.p = side.at("p").get<Eigen::Index>();
    run.q = side.at("q").get<Eigen::Index>();
    run.r = side.at("r").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("sidecar: ") + e.what());
  }
  run.draws = read_csv_matrix(opts.run / kDrawsCsv);
  if (run.draws.cols() != static_cast<Eigen::Index>(run.columns.size())) {
    fail(Errc::parse_error, "draws.csv has " + std::to_string(run.draws.cols()) + " columns but the sidecar names " +
                                std::to_string(run.columns.size()));
  }
  if (run.draws.rows() != run.config.n_samples) {
    fail(Errc::parse_error, "draws.csv has " + std::to_string(run.draws.rows()) + " rows, sidecar expects " +
                                std::to_string(run.config.n_samples));
  }
  const json cert = side.contains("certificate") ? side["certificate"] : json(nullptr);
  emit(estimates_json(run, opts.batches, cert), opts.out);
  return 0;
}

int cmd_verify(const VerifyOptions& opts) {
  if (opts.points < 1 || opts.mc < 2) fail(Errc::invalid_argument, "--points must be >= 1 and --mc >= 2");
  const GlmmDesign design = load_design_manifest(opts.design);
  const PriorSpec prior = load_prior(opts.prior);
  CertifyOptions co;
  co.grid_size = opts.grid_size;
  const ErgodicityReport rep = certify(design, prior, co);
  json out = {{"verdict", verdict_label(verdict_exit_code(rep))}};
  if (!rep.proposition1.ok()) {
    out["pass"] = false;
    out["reason"] = "model fails its validity checks";
    emit(out, opts.out);
    return kUnestablished;
  }
  const DesignSummary summary = summarize_design(design);
  const double k = rep.k ? rep.k->value : estimate_k(summary, design, kDefaultKBudget).value;
  const double c = rep.drift ? rep.drift->c : 0.25;

  RngStream root(opts.seed);
  RngStream pick = root.split(0);
  int a1_fail = 0;
  int eb_fail = 0;
  int eb_k_only = 0;
  for (int i = 0; i < opts.points; ++i) {
    VarianceComponents v;
    const auto draw = [&] { return std::exp(std::log(1e-2) + pick.uniform() * std::log(1e4)); };
    v.sigma2_e = draw();
    v.sigma2_u.resize(static_cast<Eigen::Index>(summary.r));
    for (Eigen::Index j = 0; j < v.sigma2_u.size(); ++j) v.sigma2_u(j) = draw();
    a1_fail += !check_lemma_a1(summary, v).all();
    const ExpectationBoundsReport eb = check_expectation_bounds(summary, design, v, k, c, std::max(2, opts.mc / 10),
                                                                root.split(static_cast<std::uint64_t>(i) + 1).next());
    if (!eb.all()) {
      ++eb_fail;
      eb_k_only += eb.k_attributable();
    }
  }
  out["lemma_a1"] = {{"checked", opts.points}, {"failures", a1_fail}};
  out["expectation_bounds"] = {{"checked", opts.points}, {"failures", eb_fail}, {"k_attributable", eb_k_only},
                               {"K_estimate", {{"value", k}, {"estimated", true}}}};
  bool pass = a1_fail == 0 && eb_fail == 0;
  if (rep.drift) {
    const DriftCheckReport dr = mc_check_drift(summary, design, prior, *rep.drift, opts.points, opts.mc,
                                               root.split(0x64726966ULL).next());
    out["drift"] = to_json(dr);
    pass = pass && dr.violations == 0;
  } else {
    out["drift"] = nullptr;
    spdlog::info("no drift certificate; skipping the drift inequality check");
  }
  out["pass"] = pass;
  emit(out, opts.out);
  return pass ? 0 : kUnestablished;
}

}  // namespace mixedergo::cli
