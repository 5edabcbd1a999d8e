#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mixedergo/error.hpp"
#include "mixedergo/ergodicity.hpp"
#include "mixedergo/io.hpp"
#include "mixedergo/mcmc.hpp"
#include "mixedergo/serialize.hpp"
#include "test_support.hpp"

using namespace mixedergo;
namespace mt = mixedergo::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mixedergo_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return Errc::invalid_argument;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("csv round trip is exact") {
    RngStream rng(1);
    Matrix m(4, 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.normal() * 1e-7 + rng.uniform() * 1e9;
    const fs::path dir = scratch_dir("csv");
    write_file_atomic(dir / "m.csv", format_csv(m));
    CHECK(read_csv_matrix(dir / "m.csv") == m);
    CHECK_FALSE(fs::exists(dir / "m.csv.tmp"));
  }

  TEST_CASE("csv parsing errors") {
    const fs::path dir = scratch_dir("csv_err");
    write_text(dir / "ragged.csv", "1,2\n3\n");
    CHECK(code_of([&] { read_csv_matrix(dir / "ragged.csv"); }) == Errc::parse_error);
    write_text(dir / "word.csv", "1,abc\n");
    CHECK(code_of([&] { read_csv_matrix(dir / "word.csv"); }) == Errc::parse_error);
    CHECK(code_of([&] { read_csv_matrix(dir / "missing.csv"); }) == Errc::io_error);
    write_text(dir / "col.csv", "1\n2\n3\n");
    CHECK(read_csv_vector(dir / "col.csv") == (Vector(3) << 1, 2, 3).finished());
    write_text(dir / "wide.csv", "1,2\n3,4\n");
    CHECK_THROWS_AS(read_csv_vector(dir / "wide.csv"), Error);
  }

  TEST_CASE("design manifest round trip") {
    const GlmmDesign d = mt::twoway_design(3, 4, 2);
    const fs::path dir = scratch_dir("design");
    const fs::path manifest = save_design(d, dir);
    const GlmmDesign back = load_design_manifest(manifest);
    CHECK(back.y() == d.y());
    CHECK(back.x() == d.x());
    REQUIRE(back.n_blocks() == 2);
    CHECK(back.z_block(1) == d.z_block(1));
    CHECK(fingerprint(back) == fingerprint(d));
    CHECK(code_of([&] { load_design_manifest(dir / "nope.json"); }) == Errc::io_error);
    write_text(dir / "bad.json", "{\"y\": \"y.csv\"}");
    CHECK_THROWS_AS(load_design_manifest(dir / "bad.json"), Error);
  }

  TEST_CASE("prior round trip and strict parsing") {
    const PriorSpec p{0.5, 1.25, {-0.5, 0.3}, {0.0, 2.0}};
    const fs::path dir = scratch_dir("prior");
    save_prior(p, dir / "prior.json");
    const PriorSpec back = load_prior(dir / "prior.json");
    CHECK(back.a_e == p.a_e);
    CHECK(back.b_e == p.b_e);
    CHECK(back.a == p.a);
    CHECK(back.b == p.b);
    CHECK(code_of([] { prior_from_json(nlohmann::json{{"a_e", 0}, {"b_e", 0}, {"a", {1, 2}}, {"b", {0}}}); }) ==
          Errc::parse_error);
    CHECK_THROWS_AS(prior_from_json(nlohmann::json{{"a_e", "x"}, {"b_e", 0}, {"a", {1}}, {"b", {0}}}), Error);
    CHECK_THROWS_AS(prior_from_json(nlohmann::json::array()), Error);
  }

  TEST_CASE("report serialization flags estimates") {
    const ErgodicityReport rep = certify(mt::twoway_design(5, 6, 3), mt::diffuse_twoway_prior());
    const nlohmann::json j = to_json(rep);
    for (const char* key : {"proposition1", "s_tilde", "t", "theorem1", "corollary1", "theorem2", "twoway", "drift", "K"}) {
      CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(j["theorem1"]["verdict"].is_boolean());
    CHECK(j["drift"]["L"]["estimated"] == true);
    CHECK(j["K"]["estimated"] == true);
    CHECK(j["drift"]["rho"].is_number());
    CHECK(j["oneway"].is_null());
  }

  TEST_CASE("chain config and sidecar") {
    ChainConfig cfg;
    cfg.burn_in = 3;
    cfg.n_samples = 11;
    cfg.thin = 2;
    cfg.seed = 0xffffffffffffULL;
    const ChainConfig back = chain_config_from_json(to_json(cfg));
    CHECK(back.burn_in == 3);
    CHECK(back.n_samples == 11);
    CHECK(back.thin == 2);
    CHECK(back.seed == cfg.seed);

    const ChainRun run = run_chain(mt::oneway_design({2, 2, 2}, 4), mt::diffuse_oneway_prior(), std::nullopt, cfg);
    const nlohmann::json side = chain_sidecar(run);
    CHECK(side["columns"].size() == static_cast<std::size_t>(run.draws.cols()));
    CHECK(side["columns"][0] == "beta_1");
    CHECK(side["meta"]["design_fingerprint"] == run.meta.design_fingerprint);
    CHECK(side["r"] == 1);
  }
}
