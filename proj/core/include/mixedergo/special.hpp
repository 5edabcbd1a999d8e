#pragma once

namespace mixedergo {

/// Digamma function Psi(x) = d/dx log Gamma(x) for x > 0.
///
/// Upward recurrence to x >= 10 followed by the asymptotic series; accurate to
/// about 1e-14 relative on [1e-3, 1e6] (absolute near the root at 1.4616...).
/// Throws Errc::domain_error for x <= 0 or non-finite x.
double digamma(double x);

/// log Gamma(x - s) - log Gamma(x). Requires x > 0 and x - s > 0.
double log_gamma_ratio(double x, double s);

/// 2^{-s} Gamma(x - s) / Gamma(x), evaluated in log space so arguments far
/// beyond the overflow point of Gamma (about 171) are fine.
double gamma_ratio(double x, double s);

}  // namespace mixedergo
