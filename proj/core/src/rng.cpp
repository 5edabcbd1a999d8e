#include "mixedergo/rng.hpp"

#include <cmath>

#include "mixedergo/error.hpp"

namespace mixedergo {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

RngStream::result_type RngStream::next() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

RngStream RngStream::split(std::uint64_t stream_id) const {
  std::uint64_t mix = seed_ ^ 0x6a09e667f3bcc909ULL;
  const std::uint64_t a = splitmix64(mix);
  std::uint64_t mix2 = a ^ (stream_id * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return RngStream(splitmix64(mix2));
}

double RngStream::uniform() {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    fail(Errc::invalid_shape, "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^{1/a}, done in log space to avoid underflow.
    const double g = gamma(shape + 1.0);
    return std::exp(std::log(g) + std::log(uniform()) / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double RngStream::inverse_gamma(double shape, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    fail(Errc::invalid_shape, "inverse gamma rate must be positive and finite");
  }
  return rate / gamma(shape);
}

double RngStream::chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    fail(Errc::domain_error, "poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Knuth multiplication method.
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }
  // Split large means into a gamma-distributed waiting time plus a remainder.
  const auto m = static_cast<std::uint64_t>(0.875 * mean);
  const double x = gamma(static_cast<double>(m));
  if (x > mean) {
    std::uint64_t k = 0;
    const double p = mean / x;
    for (std::uint64_t i = 1; i < m; ++i) k += uniform() < p ? 1 : 0;
    return k;
  }
  return m + poisson(mean - x);
}

}  // namespace mixedergo
