#pragma once

namespace mixedergo::cli {

// Configures the stderr logger from MIXEDERGO_LOG (error, warn, info, debug).
// Unknown values fall back to warn and say so.
void init_logging();

}  // namespace mixedergo::cli
