#pragma once

#include <nlohmann/json.hpp>

#include "mixedergo/ergodicity.hpp"
#include "mixedergo/mcmc.hpp"
#include "mixedergo/model.hpp"
#include "mixedergo/oracle.hpp"

namespace mixedergo {

// Field names follow the C++ members. Quantities that rest on the numerical
// K estimate are written as {"value": x, "estimated": true}.

nlohmann::json to_json(const PriorSpec& prior);
/// Requires every key; Errc::parse_error on missing keys or wrong types.
PriorSpec prior_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ValidationReport& rep);
nlohmann::json to_json(const Theorem1Check& c);
nlohmann::json to_json(const Corollary1Check& c);
nlohmann::json to_json(const WitnessSearch& w);
nlohmann::json to_json(const Theorem2Check& c);
nlohmann::json to_json(const OnewayCheck& c);
nlohmann::json to_json(const TwowayCheck& c);
nlohmann::json to_json(const DriftCertificate& c);
nlohmann::json to_json(const KEstimate& k);
nlohmann::json to_json(const ErgodicityReport& rep);

nlohmann::json to_json(const ChainConfig& c);
ChainConfig chain_config_from_json(const nlohmann::json& j);
/// Sidecar for a draws CSV: columns, config, meta and block shape.
nlohmann::json chain_sidecar(const ChainRun& run);
nlohmann::json to_json(const McseResult& m);

nlohmann::json to_json(const QuadratureResult& q);
nlohmann::json to_json(const DriftCheckReport& d);
nlohmann::json to_json(const LemmaA1Report& l);
nlohmann::json to_json(const ChisqMomentReport& c);
nlohmann::json to_json(const ExpectationBoundsReport& e);

}  // namespace mixedergo
