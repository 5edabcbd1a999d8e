#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixedergo {

enum class Errc {
  rank_deficient_x,
  non_finite,
  dimension_mismatch,
  singular_q,
  invalid_shape,
  domain_error,
  certificate_unavailable,
  grid_too_coarse,
  too_few_samples,
  validation_failed,
  invalid_argument,
  io_error,
  parse_error,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the Errc codes so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace mixedergo
