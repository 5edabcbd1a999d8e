#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixedergo/rng.hpp"
#include "mixedergo/special.hpp"

using namespace mixedergo;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments sample_moments(int n, Draw draw) {
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_SUITE("rng") {
  TEST_CASE("equal seeds give identical streams") {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
    RngStream c(43);
    RngStream d(42);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += c.next() == d.next();
    CHECK(same == 0);
  }

  TEST_CASE("split leaves the parent untouched and separates children") {
    RngStream parent(7);
    RngStream copy(7);
    RngStream c1 = parent.split(1);
    RngStream c2 = parent.split(2);
    RngStream c1b = parent.split(1);
    CHECK(parent.next() == copy.next());
    int same = 0;
    for (int i = 0; i < 100; ++i) {
      const auto x = c1.next();
      same += x == c2.next();
      REQUIRE(x == c1b.next());
    }
    CHECK(same == 0);
  }

  TEST_CASE("splitmix64 reference output") {
    // First outputs of splitmix64 seeded with 0 (published test vector).
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
  }

  TEST_CASE("uniform lies in the open unit interval with mean 1/2") {
    RngStream rng(1);
    double lo = 1.0;
    double hi = 0.0;
    const auto m = sample_moments(200000, [&] {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      return u;
    });
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(m.mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 200000));
    CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  }

  TEST_CASE("normal moments") {
    RngStream rng(2);
    const int n = 400000;
    const auto m = sample_moments(n, [&] { return rng.normal(); });
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(n));
    CHECK(m.var == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("gamma moments for small and large shapes") {
    for (const double shape : {0.3, 1.0, 2.5, 40.0}) {
      RngStream rng(3);
      const int n = 300000;
      const auto m = sample_moments(n, [&] { return rng.gamma(shape); });
      CAPTURE(shape);
      CHECK(std::abs(m.mean - shape) < 5.0 * std::sqrt(shape / n));
      CHECK(m.var == doctest::Approx(shape).epsilon(0.03));
    }
  }

  TEST_CASE("inverse gamma mean rate / (shape - 1)") {
    RngStream rng(4);
    const int n = 300000;
    const double shape = 6.0;
    const double rate = 2.0;
    const auto m = sample_moments(n, [&] { return rng.inverse_gamma(shape, rate); });
    const double mean = rate / (shape - 1.0);
    const double var = mean * mean / (shape - 2.0);
    CHECK(std::abs(m.mean - mean) < 5.0 * std::sqrt(var / n));
  }

  TEST_CASE("chi-square and Poisson moments") {
    RngStream rng(5);
    const int n = 300000;
    const auto c = sample_moments(n, [&] { return rng.chi_square(3.0); });
    CHECK(std::abs(c.mean - 3.0) < 5.0 * std::sqrt(6.0 / n));
    for (const double mu : {0.7, 12.0, 250.0}) {
      const auto p = sample_moments(n, [&] { return static_cast<double>(rng.poisson(mu)); });
      CAPTURE(mu);
      CHECK(std::abs(p.mean - mu) < 5.0 * std::sqrt(mu / n));
      CHECK(p.var == doctest::Approx(mu).epsilon(0.03));
    }
  }

  TEST_CASE("central chi-square inverse moment equals the gamma ratio") {
    RngStream rng(6);
    const int n = 400000;
    const double k = 5.0;
    const double g = 0.4;
    const auto m = sample_moments(n, [&] { return std::pow(rng.chi_square(k), -g); });
    CHECK(std::abs(m.mean - gamma_ratio(k / 2, g)) < 4.0 * std::sqrt(m.var / n));
  }
}
