// Acceptance suite: one PASS/FAIL line per criterion.
//   mixedergo_acceptance               run all criteria
//   mixedergo_acceptance -c 4 -c 6     run a subset
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixedergo/ergodicity.hpp"
#include "mixedergo/error.hpp"
#include "mixedergo/kernel.hpp"
#include "mixedergo/mcmc.hpp"
#include "mixedergo/model.hpp"
#include "mixedergo/oracle.hpp"
#include "mixedergo/rng.hpp"
#include "test_support.hpp"

using namespace mixedergo;
namespace mt = mixedergo::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Balanced group sizes summing to n_total.
std::vector<int> balanced_sizes(int c, int n_total) {
  std::vector<int> sizes(static_cast<std::size_t>(c), n_total / c);
  for (int g = 0; g < n_total % c; ++g) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

Outcome criterion1() {
  const auto start = Clock::now();
  const GlmmDesign design = mt::twoway_design(5, 6, 101);
  const PriorSpec prior = mt::diffuse_twoway_prior();
  const DesignSummary summary = summarize_design(design);
  const double st = s_tilde(summary, prior);
  const double le = lhs_condition_e(0.9, summary, prior);
  const double lu = lhs_condition_u(0.9, summary, prior);
  const double worst = std::max(le, lu);
  const ErgodicityReport rep = certify(design, prior);
  const double elapsed = seconds_since(start);

  Outcome out;
  const bool st_ok = st == 4.0;
  const bool lhs_ok = worst >= 0.86 && worst <= 0.88;
  const bool t2 = rep.theorem2 && rep.theorem2->verdict;
  const bool c1_false = rep.corollary1 && !rep.corollary1->verdict;
  out.pass = st_ok && lhs_ok && t2 && c1_false && elapsed < 1.0;
  out.detail = "s_tilde=" + fmt("%.17g", st) + " max_lhs(0.9)=" + fmt("%.6f", worst) +
               " theorem2=" + (t2 ? "true" : "false") +
               " corollary1=" + (c1_false ? "false" : "true") + " time=" + fmt("%.3fs", elapsed);
  return out;
}

Outcome criterion2() {
  const auto start = Clock::now();
  const PriorSpec prior = mt::diffuse_twoway_prior();
  int wrong = 0;
  std::string first_wrong;
  for (int m = 6; m <= 10; ++m) {
    for (int n = 6; n <= 10; ++n) {
      const DesignSummary s = summarize_design(mt::twoway_design(m, n, 200 + 10 * m + n));
      if (!check_corollary1(s, prior).verdict) {
        if (wrong++ == 0) first_wrong = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
      }
    }
  }
  const bool five_six_false =
      !check_corollary1(summarize_design(mt::twoway_design(5, 6, 256)), prior).verdict;
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = wrong == 0 && five_six_false && elapsed < 1.0;
  out.detail = "m,n in 6..10 true on " + std::to_string(25 - wrong) + "/25" +
               (wrong ? " first failure " + first_wrong : "") +
               "; (5,6) " + (five_six_false ? "false" : "true") + " time=" + fmt("%.3fs", elapsed);
  return out;
}

Outcome criterion3() {
  const auto start = Clock::now();
  RngStream rng(3003);
  mt::RandomDesignOptions opts;
  opts.max_n = 30;
  opts.require_sse = false;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const DesignSummary s = summarize_design(mt::random_design(rng, opts));
    worst = std::max(worst, std::abs(s.zeta.sum() - static_cast<double>(s.q - s.t)));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed < 10.0,
          "max |sum zeta - (q - t)| = " + fmt("%.3e", worst) + " over 200 designs time=" +
              fmt("%.3fs", elapsed)};
}

Outcome criterion4() {
  const auto start = Clock::now();
  const PriorSpec prior = mt::diffuse_oneway_prior();
  int instances = 0;
  int closed_form_wrong = 0;
  int disagreements = 0;
  std::ostringstream where;
  for (int c = 3; c <= 10; ++c) {
    for (int n_total = c + 1; n_total <= c + 8; ++n_total) {
      ++instances;
      const GlmmDesign design = mt::oneway_design(balanced_sizes(c, n_total), 400 + 16 * c + n_total);
      const OnewayCheck closed = check_oneway(c, n_total, prior.a_e, prior.a[0]);
      if (closed.verdict != (n_total >= c + 2)) ++closed_form_wrong;
      const Theorem2Check t2 = check_theorem2(summarize_design(design), prior);
      if (t2.verdict != closed.verdict) {
        if (disagreements++ < 3) {
          where << " (c=" << c << ",N=" << n_total << ": witness s=" << fmt("%.4g", t2.search.best_s)
                << " max=" << fmt("%.6f", t2.search.best_max) << ")";
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = closed_form_wrong == 0 && disagreements == 0 && elapsed < 5.0;
  out.detail = "closed form iff N>=c+2 on " + std::to_string(instances - closed_form_wrong) + "/" +
               std::to_string(instances) + "; witness search agrees on " +
               std::to_string(instances - disagreements) + "/" + std::to_string(instances) +
               (disagreements ? ", disagreements e.g." + where.str() : "") +
               " time=" + fmt("%.3fs", elapsed);
  return out;
}

Outcome criterion5() {
  const auto start = Clock::now();
  RngStream rng(5005);
  int counterexamples = 0;
  int th_true = 0;
  for (int k = 0; k < 1000; ++k) {
    const int c = 2 + static_cast<int>(rng.uniform() * 9);
    std::vector<int> sizes;
    int n_total = 0;
    for (int g = 0; g < c; ++g) {
      sizes.push_back(1 + static_cast<int>(rng.uniform() * 10));
      n_total += sizes.back();
    }
    const double a1 = -0.5 * c * rng.uniform() * 0.999 - 1e-3;
    const double a_e = -1.0 + 3.0 * rng.uniform();
    const OnewayCheck chk = check_oneway(c, n_total, a_e, a1, sizes);
    if (chk.tan_hobert.value_or(false)) ++th_true;
    if (!chk.implication_holds) ++counterexamples;
  }
  const double elapsed = seconds_since(start);
  return {counterexamples == 0 && elapsed < 5.0,
          std::to_string(counterexamples) + " counterexamples in 1000 configs (" +
              std::to_string(th_true) + " with the older condition true) time=" + fmt("%.3fs", elapsed)};
}

struct MomentComparison {
  std::string name;
  double gibbs = 0.0;
  double se = 0.0;
  double oracle = 0.0;
  bool resolved = false;
  bool agree = false;
};

Outcome criterion6() {
  const auto start = Clock::now();
  const GlmmDesign design = mt::oneway_design({2, 2, 2}, 606);
  const PriorSpec prior = mt::diffuse_oneway_prior();

  ChainConfig cfg;
  cfg.burn_in = 2000;
  cfg.n_samples = 200000;
  cfg.seed = 6006;
  const ChainRun run = run_chain(design, prior, std::nullopt, cfg);

  QuadratureSpec spec;
  spec.axes = {LogGridAxis{1e-9, 1e14, 1400}, LogGridAxis{1e-14, 1e22, 1400}};
  Outcome out;
  QuadratureResult quad;
  try {
    quad = sigma2_marginal_quadrature(design, prior, spec);
  } catch (const Error& e) {
    out.detail = std::string("quadrature failed: ") + e.what();
    return out;
  }

  std::vector<MomentComparison> rows;
  const std::vector<std::pair<std::string, std::size_t>> comps = {{"sigma2_e", 0}, {"sigma2_alpha", 1}};
  for (const auto& [name, d] : comps) {
    const Vector series = evaluate(run, select_column(run.p + run.q + static_cast<Eigen::Index>(d)));
    const McseResult mean = batch_means_mcse(series);
    Vector dev2 = (series.array() - mean.estimate).square().matrix();
    const McseResult var = batch_means_mcse(dev2);
    const ComponentMoments& m = quad.moments[d];
    MomentComparison rm{name + " mean", mean.estimate, mean.std_error, m.mean, m.mean_resolved, false};
    MomentComparison rv{name + " var", var.estimate, var.std_error, m.variance, m.variance_resolved, false};
    for (auto* r : {&rm, &rv}) {
      r->agree = r->resolved && std::abs(r->gibbs - r->oracle) <= 3.0 * r->se;
      rows.push_back(*r);
    }
  }
  const double elapsed = seconds_since(start);
  bool all = elapsed < 120.0;
  std::ostringstream d;
  d << "log m(y)=" << fmt("%.6f", quad.log_m_y) << ";";
  for (const auto& r : rows) {
    all = all && r.agree;
    d << " " << r.name << ": gibbs " << fmt("%.5g", r.gibbs) << "+-" << fmt("%.2g", r.se) << " oracle "
      << fmt("%.5g", r.oracle) << (r.resolved ? "" : " (unbounded on grid)")
      << (r.agree ? " ok;" : " MISMATCH;");
  }
  d << " time=" << fmt("%.1fs", elapsed);
  out.pass = all;
  out.detail = d.str();
  return out;
}

Outcome criterion7() {
  const auto start = Clock::now();
  RngStream rng(7007);
  mt::RandomDesignOptions opts;
  opts.max_n = 20;
  int checked = 0;
  int outside = 0;
  double worst_z = 0.0;
  const int n = 100000;
  for (int pair = 0; pair < 5; ++pair) {
    const GlmmDesign design = mt::random_design(rng, opts);
    const DesignSummary s = summarize_design(design);
    const VarianceComponents s2 = mt::random_sigma2(rng, s.r, 0.1, 10.0);
    const ThetaMoments mom = theta_conditional_moments(s, design, s2);
    const Eigen::Index dim = mom.mean.size();
    Vector sum = Vector::Zero(dim);
    Matrix cross = Matrix::Zero(dim, dim);
    RngStream draws = rng.split(static_cast<std::uint64_t>(pair));
    for (int k = 0; k < n; ++k) {
      const Vector dev = sample_theta(s, design, s2, draws) - mom.mean;
      sum += dev;
      cross.selfadjointView<Eigen::Lower>().rankUpdate(dev);
    }
    cross = cross.selfadjointView<Eigen::Lower>();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double z = std::abs(sum(j) / n) / std::sqrt(mom.cov(j, j) / n);
      worst_z = std::max(worst_z, z);
      ++checked;
      if (z > 4.0) ++outside;
      for (Eigen::Index k = 0; k <= j; ++k) {
        const double se = std::sqrt((mom.cov(j, j) * mom.cov(k, k) + mom.cov(j, k) * mom.cov(j, k)) / n);
        const double zc = std::abs(cross(j, k) / n - mom.cov(j, k)) / se;
        worst_z = std::max(worst_z, zc);
        ++checked;
        if (zc > 4.0) ++outside;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {outside == 0 && elapsed < 60.0,
          std::to_string(outside) + "/" + std::to_string(checked) +
              " entries beyond 4 MC standard errors (max |z| = " + fmt("%.2f", worst_z) + ") time=" +
              fmt("%.2fs", elapsed)};
}

Outcome criterion8() {
  const auto start = Clock::now();
  const GlmmDesign design = mt::twoway_design(5, 6, 101);
  const PriorSpec prior = mt::diffuse_twoway_prior();
  const ErgodicityReport rep = certify(design, prior);
  Outcome out;
  if (!rep.drift) {
    out.detail = "no drift certificate for the two-way example";
    return out;
  }
  const DesignSummary s = summarize_design(design);
  const DriftCheckReport real = mc_check_drift(s, design, prior, *rep.drift, 20, 10000, 8008);
  const DriftCheckReport control = mc_check_drift(s, design, prior, *rep.drift, 20, 10000, 8008, 0.1);
  const double elapsed = seconds_since(start);
  out.pass = real.violations == 0 && control.violations >= 1 && elapsed < 120.0;
  out.detail = "certificate s=" + fmt("%.4g", rep.drift->s) + " rho=" + fmt("%.6f", rep.drift->rho) +
               " L=" + fmt("%.4g", rep.drift->L) + " (estimated); violations " +
               std::to_string(real.violations) + "/20, negative control (rho/10) " +
               std::to_string(control.violations) + "/20 time=" + fmt("%.2fs", elapsed);
  return out;
}

Outcome criterion9() {
  const auto start = Clock::now();
  RngStream rng(9009);
  mt::RandomDesignOptions opts;
  opts.max_n = 25;
  int a1_fail = 0;
  for (int k = 0; k < 100; ++k) {
    const DesignSummary s = summarize_design(mt::random_design(rng, opts));
    if (!check_lemma_a1(s, mt::random_sigma2(rng, s.r, 1e-3, 1e3)).all()) ++a1_fail;
  }
  int chisq_fail = 0;
  for (int k = 0; k < 10; ++k) {
    const int dof = 1 + static_cast<int>(rng.uniform() * 10);
    const double mu = 5.0 * rng.uniform();
    const double gamma = 0.5 * dof * (0.02 + 0.96 * rng.uniform());
    if (!check_chisq_moment_bound(dof, mu, gamma, 200000, 90090 + k).pass) ++chisq_fail;
  }
  int moment_fail = 0;
  int k_attributed = 0;
  for (int k = 0; k < 50; ++k) {
    const mt::Config cfg = mt::random_valid_config(rng, opts);
    const DesignSummary s = summarize_design(cfg.design);
    const KEstimate kest = estimate_k(s, cfg.design, kDefaultKBudget);
    const ExpectationBoundsReport rep = check_expectation_bounds(
        s, cfg.design, mt::random_sigma2(rng, s.r, 1e-2, 1e2), kest.value, 0.25, 2, 99000 + k);
    bool exact_ok = rep.resid_ok;
    for (const auto& b : rep.blocks) exact_ok = exact_ok && b.second_moment_ok;
    if (!exact_ok) {
      ++moment_fail;
      if (rep.k_attributable()) ++k_attributed;
    }
  }
  const double elapsed = seconds_since(start);
  return {a1_fail == 0 && chisq_fail == 0 && moment_fail == 0 && elapsed < 120.0,
          "covariance sandwich failures " + std::to_string(a1_fail) + "/100; chi-square bound failures " +
              std::to_string(chisq_fail) + "/10; exact-moment bound failures " +
              std::to_string(moment_fail) + "/50 (" + std::to_string(k_attributed) +
              " attributable to the K estimate) time=" + fmt("%.2fs", elapsed)};
}

Outcome criterion10() {
  const auto start = Clock::now();
  RngStream rng(10010);
  int c1_true = 0;
  int c1_violations = 0;
  int t2_true = 0;
  int t2_violations = 0;
  std::string example;
  for (int k = 0; k < 500; ++k) {
    const mt::Config cfg = mt::random_valid_config(rng);
    const DesignSummary s = summarize_design(cfg.design);
    if (check_corollary1(s, cfg.prior).verdict) {
      ++c1_true;
      const bool admissible = 1.0 < 0.5 * s_tilde(s, cfg.prior);
      const bool at_one = admissible && lhs_condition_e(1.0, s, cfg.prior) < 1.0 &&
                          lhs_condition_u(1.0, s, cfg.prior) < 1.0;
      if (!at_one || !check_theorem2(s, cfg.prior).verdict) ++c1_violations;
    }
    if (check_theorem2(s, cfg.prior).verdict) {
      ++t2_true;
      const Theorem1Check t1 = check_theorem1(s, cfg.prior);
      if (!t1.verdict) {
        if (t2_violations++ == 0) {
          std::ostringstream e;
          e << " first: r=" << s.r << " q=" << s.q << " t=" << s.t << " p=" << s.p
            << " N=" << s.n_obs << " cond_b=";
          for (const bool b : t1.cond_b) e << b;
          e << " cond_c=" << t1.cond_c;
          example = e.str();
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {c1_violations == 0 && t2_violations == 0 && elapsed < 30.0,
          "corollary1 => witness at s=1: " + std::to_string(c1_violations) + " violations in " +
              std::to_string(c1_true) + "; theorem2 => theorem1: " + std::to_string(t2_violations) +
              " violations in " + std::to_string(t2_true) + example + " time=" + fmt("%.2fs", elapsed)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixedergo acceptance criteria"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "criterion number (repeatable)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }

  const std::map<int, std::function<Outcome()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};

  int failures = 0;
  for (const int id : selected) {
    Outcome o;
    try {
      o = criteria.at(id)();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
