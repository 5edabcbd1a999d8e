#include "mixedergo/error.hpp"

namespace mixedergo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::rank_deficient_x: return "RankDeficientX";
    case Errc::non_finite: return "NonFinite";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::singular_q: return "SingularQ";
    case Errc::invalid_shape: return "InvalidShape";
    case Errc::domain_error: return "DomainError";
    case Errc::certificate_unavailable: return "CertificateUnavailable";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::validation_failed: return "ValidationFailed";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mixedergo
