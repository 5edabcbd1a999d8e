#include <doctest.h>

#include <cmath>

#include "mixedergo/error.hpp"
#include "mixedergo/mcmc.hpp"
#include "mixedergo/rng.hpp"
#include "test_support.hpp"

using namespace mixedergo;
namespace mt = mixedergo::testing;

namespace {

ChainRun fake_run(const Vector& sigma2_e) {
  ChainRun run;
  run.p = 1;
  run.q = 1;
  run.r = 1;
  run.columns = draw_column_names(1, {1});
  run.draws = Matrix::Ones(sigma2_e.size(), 4);
  run.draws.col(2) = sigma2_e;
  run.config.n_samples = sigma2_e.size();
  return run;
}

Vector ar1(RngStream& rng, Eigen::Index n, double phi) {
  Vector x(n);
  double prev = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (Eigen::Index i = 0; i < n; ++i) {
    prev = phi * prev + rng.normal();
    x(i) = prev;
  }
  return x;
}

}  // namespace

TEST_SUITE("mcmc") {
  TEST_CASE("column names") {
    const auto names = draw_column_names(2, {2, 1});
    const std::vector<std::string> want{"beta_1", "beta_2", "u_1_1", "u_1_2", "u_2_1", "sigma2_e", "sigma2_u_1", "sigma2_u_2"};
    CHECK(names == want);
  }

  TEST_CASE("run_chain is reproducible and shaped") {
    const GlmmDesign d = mt::twoway_design(3, 4, 1);
    const PriorSpec prior = mt::diffuse_twoway_prior();
    ChainConfig cfg;
    cfg.burn_in = 50;
    cfg.n_samples = 300;
    cfg.thin = 3;
    cfg.seed = 77;
    const ChainRun a = run_chain(d, prior, std::nullopt, cfg);
    const ChainRun b = run_chain(d, prior, std::nullopt, cfg);
    CHECK(a.draws == b.draws);
    CHECK(a.n_samples() == 300);
    CHECK(a.draws.cols() == 1 + 7 + 1 + 2);
    CHECK(a.meta.iterations == 50 + 300 * 3);
    CHECK(a.meta.design_fingerprint == fingerprint(d));
    CHECK(a.meta.prior_fingerprint == fingerprint(prior));
    CHECK((a.draws.rightCols(3).array() > 0.0).all());
    cfg.seed = 78;
    CHECK(run_chain(d, prior, std::nullopt, cfg).draws != a.draws);

    // Thinning keeps every thin-th post-burn-in state of the unthinned chain.
    ChainConfig plain = cfg;
    plain.thin = 1;
    plain.n_samples = 900;
    const ChainRun full = run_chain(d, prior, std::nullopt, plain);
    const ChainRun thinned = run_chain(d, prior, std::nullopt, cfg);
    for (Eigen::Index i = 0; i < thinned.n_samples(); ++i) {
      REQUIRE(thinned.draws.row(i) == full.draws.row(3 * i + 2));
    }
  }

  TEST_CASE("run_chain rejects bad configs and invalid models") {
    const GlmmDesign d = mt::oneway_design({2, 2, 2}, 2);
    ChainConfig cfg;
    cfg.n_samples = 0;
    CHECK_THROWS_AS(run_chain(d, mt::diffuse_oneway_prior(), std::nullopt, cfg), Error);
    cfg.n_samples = 10;
    cfg.thin = 0;
    CHECK_THROWS_AS(run_chain(d, mt::diffuse_oneway_prior(), std::nullopt, cfg), Error);
    cfg.thin = 1;
    cfg.burn_in = -1;
    CHECK_THROWS_AS(run_chain(d, mt::diffuse_oneway_prior(), std::nullopt, cfg), Error);
    cfg.burn_in = 0;
    const PriorSpec bad{0.0, 0.0, {-2.0}, {0.0}};
    try {
      run_chain(d, bad, std::nullopt, cfg);
      FAIL("expected ValidationFailed");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::validation_failed);
    }
  }

  TEST_CASE("explicit initial state is used") {
    const GlmmDesign d = mt::oneway_design({3, 3, 3}, 3);
    const DesignSummary s = summarize_design(d);
    ParamState init = default_initial_state(s);
    init.sigma2.sigma2_e = 5.0;
    ChainConfig cfg;
    cfg.n_samples = 5;
    const ChainRun a = run_chain(d, mt::diffuse_oneway_prior(), init, cfg);
    const ChainRun b = run_chain(d, mt::diffuse_oneway_prior(), std::nullopt, cfg);
    CHECK(a.draws != b.draws);
    CHECK(a.state(0).sigma2.sigma2_e == a.draws(0, a.column("sigma2_e")));
    CHECK_THROWS_AS(a.column("nope"), Error);
  }

  TEST_CASE("ergodic averages") {
    const ChainRun run = fake_run(Vector::Constant(50, 2.0));
    CHECK(ergodic_average(run, [](const Eigen::Ref<const Vector>&) { return 1.0; }) == 1.0);
    CHECK(ergodic_average(run, select_column(run, "sigma2_e")) == 2.0);
    CHECK(ergodic_average(run, select_column(2)) == 2.0);
    CHECK_THROWS_AS(ergodic_average(run, [](const Eigen::Ref<const Vector>&) { return NAN; }), Error);
    CHECK_THROWS_AS(select_column(run, "sigma2_u_9"), Error);
  }

  TEST_CASE("batch means: constant, i.i.d. and AR(1) series") {
    const McseResult flat = batch_means_mcse(Vector::Constant(400, 3.0));
    CHECK(flat.std_error == 0.0);
    CHECK(flat.estimate == 3.0);
    CHECK(flat.n_batches == 20);

    RngStream rng(5);
    Vector iid(10000);
    for (Eigen::Index i = 0; i < iid.size(); ++i) iid(i) = rng.normal();
    const McseResult m = batch_means_mcse(iid);
    CHECK(m.std_error == doctest::Approx(0.01).epsilon(0.3));

    // Asymptotic variance of AR(1) with phi = 0.5 is (1 + phi) / (1 - phi) = 3 times that of
    // i.i.d. draws with the same marginal variance 1 / (1 - phi^2).
    const Eigen::Index n = 100000;
    const Vector x = ar1(rng, n, 0.5);
    const McseResult ar = batch_means_mcse(x);
    const double iid_se = std::sqrt(1.0 / (1.0 - 0.25) / static_cast<double>(n));
    CHECK(ar.std_error / iid_se == doctest::Approx(std::sqrt(3.0)).epsilon(0.3));
  }

  TEST_CASE("batch means truncation and errors") {
    Vector v = Vector::LinSpaced(103, 0.0, 102.0);
    const McseResult res = batch_means_mcse(v, 10);
    CHECK(res.n_used == 100);
    CHECK(res.batch_size == 10);
    CHECK(res.estimate == ergodic_average(Vector(v.head(100))));
    CHECK_THROWS_AS(batch_means_mcse(v, 1), Error);
    CHECK_THROWS_AS(batch_means_mcse(Vector::Ones(7), 4), Error);
    CHECK(default_batch_count(99) == 9);
    CHECK(default_batch_count(100) == 10);

    const ChainRun run = fake_run(v);
    const McseResult via_run = batch_means_mcse(run, select_column(run, "sigma2_e"), 10);
    CHECK(via_run.estimate == res.estimate);
    CHECK(via_run.std_error == res.std_error);
  }

  TEST_CASE("MCSE shrinks like m^{-1/2} on a certified model") {
    const GlmmDesign d = mt::twoway_design(5, 6, 6);
    const PriorSpec prior = mt::diffuse_twoway_prior();
    ChainConfig cfg;
    cfg.burn_in = 1000;
    cfg.n_samples = 100000;
    cfg.seed = 606;
    const ChainRun run = run_chain(d, prior, std::nullopt, cfg);
    const DrawFunction g = select_column(run, "sigma2_e");
    const Vector series = evaluate(run, g);
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const Eigen::Index m : {Eigen::Index{1000}, Eigen::Index{10000}, Eigen::Index{100000}}) {
      const double lx = std::log(static_cast<double>(m));
      const double ly = std::log(batch_means_mcse(Vector(series.head(m))).std_error);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
    CHECK(std::abs(slope + 0.5) <= 0.15);
  }

  TEST_CASE("fingerprints") {
    const GlmmDesign d = mt::oneway_design({2, 2}, 7);
    const GlmmDesign e = mt::oneway_design({2, 2}, 8);
    CHECK(fingerprint(d) == fingerprint(mt::oneway_design({2, 2}, 7)));
    CHECK(fingerprint(d) != fingerprint(e));
    CHECK(fingerprint(d).size() == 16);
    PriorSpec p = mt::diffuse_oneway_prior();
    const std::string base = fingerprint(p);
    p.b_e = 1e-300;
    CHECK(fingerprint(p) != base);
  }
}
