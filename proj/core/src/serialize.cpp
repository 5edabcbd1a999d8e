#include "mixedergo/serialize.hpp"

#include <string>

#include "mixedergo/error.hpp"

namespace mixedergo {

using nlohmann::json;

namespace {

json estimated(double v) { return json{{"value", v}, {"estimated", true}}; }

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json bools(const std::vector<bool>& v) {
  json out = json::array();
  for (const bool b : v) out.push_back(b);
  return out;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : json(nullptr);
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    fail(Errc::parse_error, std::string("prior key '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

std::vector<double> numbers_at(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    fail(Errc::parse_error, std::string("prior key '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) fail(Errc::parse_error, std::string("prior key '") + key + "' has a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json to_json(const PriorSpec& prior) {
  return {{"a_e", prior.a_e}, {"b_e", prior.b_e}, {"a", prior.a}, {"b", prior.b}};
}

PriorSpec prior_from_json(const json& j) {
  if (!j.is_object()) fail(Errc::parse_error, "prior must be a JSON object");
  PriorSpec p;
  p.a_e = number_at(j, "a_e");
  p.b_e = number_at(j, "b_e");
  p.a = numbers_at(j, "a");
  p.b = numbers_at(j, "b");
  if (p.a.size() != p.b.size()) fail(Errc::parse_error, "prior arrays a and b differ in length");
  return p;
}

json to_json(const ValidationReport& rep) {
  return {{"ok", rep.ok()},
          {"s1_rank_x", rep.s1_rank_x},
          {"s2_b_nonnegative", rep.s2_b_nonnegative},
          {"s3_be_sse", rep.s3_be_sse},
          {"s4_s_tilde", rep.s4_s_tilde},
          {"s_tilde", rep.s_tilde},
          {"sse", rep.sse},
          {"rank_x", rep.rank_x},
          {"prior_matches_design", rep.prior_matches_design}};
}

json to_json(const Theorem1Check& c) {
  return {{"verdict", c.verdict}, {"cond_a", bools(c.cond_a)}, {"cond_b", bools(c.cond_b)},
          {"cond_c", c.cond_c},   {"cond_d", c.cond_d}};
}

json to_json(const Corollary1Check& c) {
  return {{"verdict", c.verdict},
          {"cond_a", bools(c.cond_a)},
          {"cond_b_prime", bools(c.cond_b_prime)},
          {"cond_c_prime", c.cond_c_prime},
          {"cond_d", c.cond_d}};
}

json to_json(const WitnessSearch& w) {
  return {{"status", to_string(w.status)},
          {"witness", w.witness ? json(*w.witness) : json(nullptr)},
          {"lhs_e", w.lhs_e},
          {"lhs_u", w.lhs_u},
          {"best_max", w.best_max},
          {"best_s", w.best_s},
          {"grid_size", w.grid_size},
          {"interval_hi", w.interval_hi},
          {"condition1", bools(w.condition1)},
          {"precheck_e", w.precheck_e},
          {"precheck_u", bools(w.precheck_u)}};
}

json to_json(const Theorem2Check& c) { return {{"verdict", c.verdict}, {"search", to_json(c.search)}}; }

json to_json(const OnewayCheck& c) {
  json j = {{"c", c.c},
            {"n_total", c.n_total},
            {"a_e", c.a_e},
            {"a_1", c.a_1},
            {"two_exp_digamma", c.two_exp_digamma},
            {"sample_size_ok", c.sample_size_ok},
            {"digamma_ok", c.digamma_ok},
            {"verdict", c.verdict},
            {"implication_holds", c.implication_holds}};
  j["tan_hobert"] = c.tan_hobert ? json(*c.tan_hobert) : json(nullptr);
  j["tan_hobert_lhs"] = c.tan_hobert_lhs ? json(*c.tan_hobert_lhs) : json(nullptr);
  return j;
}

json to_json(const TwowayCheck& c) {
  return {{"m", c.m},         {"n", c.n},         {"s", c.s},
          {"lhs_e", c.lhs_e}, {"lhs_u", c.lhs_u}, {"verdict", c.verdict}};
}

json to_json(const DriftCertificate& c) {
  return {{"s", c.s},
          {"c", c.c},
          {"alpha", c.alpha},
          {"rho", c.rho},
          {"L", estimated(c.L)},
          {"delta", c.delta},
          {"kappa", c.kappa},
          {"K_estimate", estimated(c.k_estimate)},
          {"null_blocks_present", c.null_blocks_present}};
}

json to_json(const KEstimate& k) {
  return {{"value", k.value},
          {"estimated", true},
          {"h_route", k.h_route},
          {"per_term_route", k.per_term_route},
          {"points", k.points}};
}

json to_json(const ErgodicityReport& rep) {
  json j;
  j["proposition1"] = to_json(rep.proposition1);
  j["s_tilde"] = rep.s_tilde ? json(*rep.s_tilde) : json(nullptr);
  j["t"] = rep.t ? json(*rep.t) : json(nullptr);
  j["theorem1"] = optional_json(rep.theorem1);
  j["corollary1"] = optional_json(rep.corollary1);
  j["theorem2"] = optional_json(rep.theorem2);
  j["oneway"] = optional_json(rep.oneway);
  j["twoway"] = optional_json(rep.twoway);
  j["drift"] = optional_json(rep.drift);
  j["K"] = optional_json(rep.k);
  j["smallest_retained_eigval"] = rep.smallest_retained_eigval;
  j["largest_discarded_eigval"] = rep.largest_discarded_eigval;
  return j;
}

json to_json(const ChainConfig& c) {
  return {{"burn_in", c.burn_in}, {"n_samples", c.n_samples}, {"thin", c.thin}, {"seed", c.seed}};
}

ChainConfig chain_config_from_json(const json& j) {
  try {
    ChainConfig c;
    c.burn_in = j.at("burn_in").get<std::int64_t>();
    c.n_samples = j.at("n_samples").get<std::int64_t>();
    c.thin = j.at("thin").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("chain config: ") + e.what());
  }
}

json chain_sidecar(const ChainRun& run) {
  return {{"columns", run.columns},
          {"config", to_json(run.config)},
          {"p", run.p},
          {"q", run.q},
          {"r", run.r},
          {"meta",
           {{"wall_seconds", run.meta.wall_seconds},
            {"iterations", run.meta.iterations},
            {"design_fingerprint", run.meta.design_fingerprint},
            {"prior_fingerprint", run.meta.prior_fingerprint}}}};
}

json to_json(const McseResult& m) {
  return {{"estimate", m.estimate},
          {"std_error", m.std_error},
          {"n_batches", m.n_batches},
          {"batch_size", m.batch_size},
          {"n_used", m.n_used}};
}

json to_json(const QuadratureResult& q) {
  json moments = json::array();
  for (const auto& m : q.moments) {
    moments.push_back({{"mean", m.mean},
                       {"variance", m.variance},
                       {"mean_boundary_fraction", m.mean_boundary_fraction},
                       {"variance_boundary_fraction", m.variance_boundary_fraction},
                       {"mean_resolved", m.mean_resolved},
                       {"variance_resolved", m.variance_resolved}});
  }
  return {{"log_m_y", q.log_m_y},
          {"boundary_fraction", q.boundary_fraction},
          {"points", q.points},
          {"moments", moments}};
}

json to_json(const DriftCheckReport& d) {
  json points = json::array();
  for (const auto& p : d.points) {
    points.push_back({{"sigma2_e", p.sigma2.sigma2_e},
                      {"sigma2_u", vec(p.sigma2.sigma2_u)},
                      {"v_current", p.v_current},
                      {"estimate", p.estimate},
                      {"std_error", p.std_error},
                      {"bound", estimated(p.bound)},
                      {"violated", p.violated}});
  }
  return {{"rho_used", d.rho_used}, {"violations", d.violations}, {"points", points}};
}

json to_json(const LemmaA1Report& l) {
  return {{"all", l.all()},
          {"scale", l.scale},
          {"stmt1_min_eig", l.stmt1_min_eig},
          {"stmt1", l.stmt1},
          {"stmt2_lhs", l.stmt2_lhs},
          {"stmt2_rhs", l.stmt2_rhs},
          {"stmt2", l.stmt2},
          {"stmt3_min_eig", l.stmt3_min_eig},
          {"stmt3", l.stmt3}};
}

json to_json(const ChisqMomentReport& c) {
  return {{"k", c.k},         {"mu", c.mu},       {"gamma", c.gamma},
          {"estimate", c.estimate}, {"std_error", c.std_error}, {"bound", c.bound},
          {"pass", c.pass}};
}

json to_json(const ExpectationBoundsReport& e) {
  json blocks = json::array();
  for (const auto& b : e.blocks) {
    blocks.push_back({{"second_moment_exact", b.second_moment_exact},
                      {"second_moment_bound", estimated(b.second_moment_bound)},
                      {"second_moment_bound_h", b.second_moment_bound_h},
                      {"second_moment_ok", b.second_moment_ok},
                      {"second_moment_ok_h", b.second_moment_ok_h},
                      {"neg_moment_estimate", b.neg_moment_estimate},
                      {"neg_moment_std_error", b.neg_moment_std_error},
                      {"neg_moment_bound", b.neg_moment_bound},
                      {"neg_moment_ok", b.neg_moment_ok}});
  }
  return {{"all", e.all()},
          {"k_attributable", e.k_attributable()},
          {"K_estimate", estimated(e.k_estimate)},
          {"h", e.h},
          {"c", e.c},
          {"resid_exact", e.resid_exact},
          {"resid_bound", estimated(e.resid_bound)},
          {"resid_bound_h", e.resid_bound_h},
          {"resid_ok", e.resid_ok},
          {"resid_ok_h", e.resid_ok_h},
          {"blocks", blocks}};
}

}  // namespace mixedergo
