#include "mixedergo/special.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixedergo/error.hpp"

namespace mixedergo {

double digamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    fail(Errc::domain_error, "digamma requires x > 0, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Bernoulli-number tail: B_{2k} / (2k x^{2k}) for k = 1..7.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 - inv2 * (1.0 / 12)))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

double log_gamma_ratio(double x, double s) {
  if (!std::isfinite(x) || !std::isfinite(s) || x <= 0.0 || x - s <= 0.0) {
    fail(Errc::domain_error, "gamma ratio requires x > 0 and x - s > 0 (x=" + std::to_string(x) +
                                 ", s=" + std::to_string(s) + ")");
  }
  if (s == 0.0) return 0.0;
  return std::lgamma(x - s) - std::lgamma(x);
}

double gamma_ratio(double x, double s) {
  const double log_ratio = log_gamma_ratio(x, s);
  if (s == 0.0) return 1.0;
  return std::exp(-s * std::numbers::ln2 + log_ratio);
}

}  // namespace mixedergo
