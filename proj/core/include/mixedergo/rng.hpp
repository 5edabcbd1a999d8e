#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mixedergo {

/// Deterministic, splittable pseudo-random stream (xoshiro256** core seeded
/// through splitmix64). Equal seeds give identical draw sequences; split()
/// derives statistically independent child streams from (seed, stream id)
/// without touching the parent state.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0x5eed5eed5eed5eedULL);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  result_type next();

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream number `stream_id`; children with different ids (or
  /// different parent seeds) do not overlap in practice.
  RngStream split(std::uint64_t stream_id) const;

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale = 1), shape > 0. Marsaglia-Tsang without the squeeze.
  double gamma(double shape);
  /// Inverted gamma with density d^c / Gamma(c) v^{-c-1} exp(-d / v).
  double inverse_gamma(double shape, double rate);
  /// Chi-square with (possibly non-integer) degrees of freedom.
  double chi_square(double dof);
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mixedergo
