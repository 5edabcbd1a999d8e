#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixedergo::testing {

namespace {

int uniform_int(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(std::floor(rng.uniform() * (hi - lo + 1)));
}

double uniform_real(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Vector synthetic_response(RngStream& rng, const Matrix& x, const std::vector<Matrix>& zs) {
  Vector y = Vector::Zero(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) y += x.col(j) * rng.normal();
  for (const auto& z : zs) {
    Vector u(z.cols());
    for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = rng.normal();
    y += z * u;
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.normal();
  return y;
}

}  // namespace

GlmmDesign random_design(RngStream& rng, const RandomDesignOptions& options) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int p = uniform_int(rng, 1, options.max_p);
    const int r = uniform_int(rng, 1, options.max_r);
    const int n = uniform_int(rng, p + 2, std::max(p + 2, options.max_n));
    Matrix x(n, p);
    x.col(0).setOnes();
    for (int j = 1; j < p; ++j) {
      for (int i = 0; i < n; ++i) x(i, j) = rng.normal();
    }
    std::vector<Matrix> zs;
    for (int b = 0; b < r; ++b) {
      const int qi = uniform_int(rng, 1, options.max_block);
      Matrix z = Matrix::Zero(n, qi);
      if (rng.uniform() < options.indicator_share) {
        for (int i = 0; i < n; ++i) z(i, uniform_int(rng, 0, qi - 1)) = 1.0;
      } else {
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < qi; ++k) z(i, k) = rng.normal();
        }
      }
      zs.push_back(std::move(z));
    }
    Vector y = synthetic_response(rng, x, zs);
    GlmmDesign design(std::move(y), std::move(x), std::move(zs));
    if (numerical_rank_x(design) < p) continue;
    if (options.require_sse && !(compute_sse(design) > 0.0)) continue;
    return design;
  }
  throw std::runtime_error("random_design: no acceptable design in 1000 attempts");
}

PriorSpec random_prior(RngStream& rng, const GlmmDesign& design) {
  PriorSpec prior;
  prior.a_e = uniform_real(rng, -1.0, 2.0);
  prior.b_e = rng.uniform() < 0.5 ? 0.0 : uniform_real(rng, 0.1, 2.0);
  for (std::size_t i = 0; i < design.n_blocks(); ++i) {
    const double qi = static_cast<double>(design.block_size(i));
    if (rng.uniform() < 0.5) {
      prior.b.push_back(0.0);
      prior.a.push_back(uniform_real(rng, -0.5 * qi + 0.01, -0.01));
    } else {
      prior.b.push_back(uniform_real(rng, 0.1, 2.0));
      prior.a.push_back(uniform_real(rng, -0.5 * qi + 0.01, 2.0));
    }
  }
  return prior;
}

Config random_valid_config(RngStream& rng, const RandomDesignOptions& options) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    GlmmDesign design = random_design(rng, options);
    PriorSpec prior = random_prior(rng, design);
    if (validate_model(design, prior).ok()) return {std::move(design), std::move(prior)};
  }
  throw std::runtime_error("random_valid_config: no valid configuration in 1000 attempts");
}

VarianceComponents random_sigma2(RngStream& rng, std::size_t r, double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  VarianceComponents s;
  s.sigma2_e = std::exp(uniform_real(rng, a, b));
  s.sigma2_u.resize(static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < s.sigma2_u.size(); ++i) s.sigma2_u(i) = std::exp(uniform_real(rng, a, b));
  return s;
}

GlmmDesign oneway_design(const std::vector<int>& sizes, std::uint64_t seed) {
  RngStream rng(seed);
  int n = 0;
  for (const int s : sizes) n += s;
  Vector y(n);
  Eigen::Index row = 0;
  for (const int s : sizes) {
    const double effect = rng.normal();
    for (int k = 0; k < s; ++k) y(row++) = 1.0 + effect + rng.normal();
  }
  return build_oneway(static_cast<int>(sizes.size()), sizes, y);
}

PriorSpec diffuse_oneway_prior() { return PriorSpec{0.0, 0.0, {-0.5}, {0.0}}; }

GlmmDesign twoway_design(int m, int n, std::uint64_t seed) {
  RngStream rng(seed);
  Vector y(m * n);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
  return build_twoway(m, n, y);
}

PriorSpec diffuse_twoway_prior() { return PriorSpec{0.0, 0.0, {-0.5, -0.5}, {0.0, 0.0}}; }

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

}  // namespace mixedergo::testing
