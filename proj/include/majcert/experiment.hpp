// Copyright 2026 The majcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch experiments: config validation, suite execution, reports, and
// re-verification of a report from the artifacts it carries.
//
// A config names one suite, a seed, an instance count and suite parameters.
// Instance i runs from seed derive(seed, i), so results do not depend on
// scheduling; records are emitted in index order. Every record carries the
// artifact its verdicts were computed from, and `verify_report` recomputes
// the verdicts from those artifacts alone.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "majcert/classes.hpp"
#include "majcert/core.hpp"
#include "majcert/dimension.hpp"
#include "majcert/errors.hpp"
#include "majcert/io.hpp"
#include "majcert/majcert.hpp"
#include "majcert/protocol.hpp"
#include "majcert/random.hpp"
#include "majcert/real_majcert.hpp"
#include "majcert/serialize.hpp"
#include "majcert/winnowing.hpp"

namespace majcert::experiment {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

class SchemaError : public RejectedInput {
 public:
  explicit SchemaError(const std::string& what) : RejectedInput(what) {}
};

enum class Suite { majcert, realmajcert, winnow, l1winnow, l2counter, dims, occam, quantum_protocol, equivalence };

inline const std::vector<std::pair<Suite, const char*>>& suite_names() {
  static const std::vector<std::pair<Suite, const char*>> names{
      {Suite::majcert, "majcert"},   {Suite::realmajcert, "realmajcert"},
      {Suite::winnow, "winnow"},     {Suite::l1winnow, "l1winnow"},
      {Suite::l2counter, "l2counter"}, {Suite::dims, "dims"},
      {Suite::occam, "occam"},       {Suite::quantum_protocol, "quantum-protocol"},
      {Suite::equivalence, "equivalence"}};
  return names;
}

inline const char* suite_name(Suite s) {
  for (const auto& [k, v] : suite_names())
    if (k == s) return v;
  return "?";
}

inline Suite parse_suite(const std::string& s) {
  for (const auto& [k, v] : suite_names())
    if (s == v) return k;
  throw SchemaError("unknown suite '" + s + "'");
}

// ---------------------------------------------------------------------------
// Parameter schemas

enum class ParamType { integer, real, boolean, choice, real_list };

struct ParamSpec {
  std::string name;
  ParamType type;
  Json fallback;
  double lo = 0.0, hi = 0.0;          // numeric range, inclusive
  std::vector<std::string> choices;  // ParamType::choice
};

namespace detail {

inline ParamSpec int_param(std::string name, long def, double lo, double hi) {
  return {std::move(name), ParamType::integer, Json(def), lo, hi, {}};
}
inline ParamSpec real_param(std::string name, double def, double lo, double hi) {
  return {std::move(name), ParamType::real, Json(def), lo, hi, {}};
}
inline ParamSpec bool_param(std::string name, bool def) {
  return {std::move(name), ParamType::boolean, Json(def), 0, 0, {}};
}
inline ParamSpec choice_param(std::string name, std::string def, std::vector<std::string> choices) {
  return {std::move(name), ParamType::choice, Json(std::move(def)), 0, 0, std::move(choices)};
}

// n is range-checked loosely here; exceeding a size cap is a per-instance
// failure, not a schema error
inline ParamSpec n_param(long def) { return int_param("n", def, 1, 64); }

}  // namespace detail

inline std::vector<ParamSpec> suite_schema(Suite s) {
  using namespace detail;
  const auto size = [](long def) { return int_param("size", def, 1, 1 << 20); };
  const auto eps = [](double def) { return real_param("eps", def, 1e-6, 0.999999); };
  switch (s) {
    case Suite::majcert:
      return {choice_param("class", "random-boolean", {"random-boolean", "point-functions"}),
              n_param(6), size(32), real_param("flip", 0.5, 1e-9, 0.5), int_param("points", 0, 0, 1 << 20),
              bool_param("robust", false)};
    case Suite::realmajcert:
      return {choice_param("class", "random-pconcept",
                           {"random-pconcept", "constants-grid", "l2-family", "quantum-induced"}),
              n_param(3), size(40), eps(0.25), int_param("grid", 0, 0, 1 << 20), int_param("levels", 11, 2, 1 << 20),
              int_param("qubits", 1, 1, 2)};
    case Suite::winnow:
      return {n_param(3), size(20), eps(0.1), int_param("y_size", 2, 0, 1 << 20), int_param("grid", 0, 0, 1 << 20)};
    case Suite::l1winnow:
      return {n_param(3), size(30), eps(0.1), int_param("grid", 0, 0, 1 << 20)};
    case Suite::l2counter:
      return {int_param("n", 2, 2, 64), int_param("x_samples", 0, 0, 1 << 20)};
    case Suite::dims:
      return {choice_param("class", "random-boolean",
                           {"random-boolean", "point-functions", "random-pconcept", "constants-grid", "l2-family",
                            "quantum-induced"}),
              n_param(4), size(16), real_param("flip", 0.5, 1e-9, 0.5), int_param("points", 0, 0, 1 << 20),
              int_param("grid", 0, 0, 1 << 20), int_param("levels", 11, 2, 1 << 20), int_param("qubits", 1, 1, 2),
              {"gammas", ParamType::real_list, Json::array({0.05, 0.1, 0.25, 0.5}), 1e-9, 1.0, {}},
              int_param("cap", kDimensionCap, 1, kDimensionCap), real_param("cover_eps", 0.1, 1e-6, 1.0)};
    case Suite::occam:
      return {n_param(3), size(20), eps(0.25), int_param("trials", 100, 1, 1 << 20), int_param("grid", 0, 0, 1 << 20),
              choice_param("distribution", "uniform", {"uniform", "random"})};
    case Suite::quantum_protocol:
      return {int_param("n", 2, 2, 64), int_param("samples", 200, 0, 1 << 20), eps(0.1),
              int_param("restarts", 100, 1, 1 << 24), real_param("inflate", 50.0, 0.0, 1e6)};
    case Suite::equivalence:
      return {n_param(3), size(8), int_param("k", 3, 0, 64), real_param("flip", 0.5, 1e-9, 0.5),
              int_param("sweep_max", 6, 0, 64)};
  }
  return {};
}

struct ExperimentConfig {
  Suite suite = Suite::majcert;
  std::uint64_t seed = 1;
  std::size_t instances = 1;
  Json params = Json::object();  // every schema key, defaults filled in
  std::string output_path;
  std::string csv_path;

  /// The part of the config that determines results.
  Json echo() const {
    return {{"schema", kSchemaVersion}, {"suite", suite_name(suite)}, {"seed", seed}, {"instances", instances},
            {"params", params}};
  }
};

namespace detail {

inline void check_param(const ParamSpec& spec, const Json& v) {
  const std::string where = "parameter '" + spec.name + "'";
  auto in_range = [&](double x) {
    if (!(x >= spec.lo && x <= spec.hi))
      throw SchemaError(where + " must lie in [" + io::format_real(spec.lo) + ", " + io::format_real(spec.hi) + "]");
  };
  switch (spec.type) {
    case ParamType::integer:
      if (!v.is_number_integer()) throw SchemaError(where + " must be an integer");
      in_range(v.is_number_unsigned() ? static_cast<double>(v.get<std::uint64_t>())
                                      : static_cast<double>(v.get<std::int64_t>()));
      break;
    case ParamType::real:
      if (!v.is_number()) throw SchemaError(where + " must be a number");
      in_range(v.get<double>());
      break;
    case ParamType::boolean:
      if (!v.is_boolean()) throw SchemaError(where + " must be true or false");
      break;
    case ParamType::choice:
      if (!v.is_string() ||
          std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
        throw SchemaError(where + " must be one of: " + all);
      }
      break;
    case ParamType::real_list:
      if (!v.is_array() || v.empty()) throw SchemaError(where + " must be a non-empty list of numbers");
      for (const auto& e : v) {
        if (!e.is_number()) throw SchemaError(where + " must be a non-empty list of numbers");
        in_range(e.get<double>());
      }
      break;
  }
}

}  // namespace detail

/// Validates a config document; nothing runs on failure.
inline ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  static const std::set<std::string> top{"schema", "suite", "seed", "instances", "params", "output_path", "csv_path"};
  for (const auto& [k, v] : j.items())
    if (!top.contains(k)) throw SchemaError("unknown config key '" + k + "'");
  if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<std::int64_t>() != kSchemaVersion)
    throw SchemaError("config must declare \"schema\": 1");
  if (!j.contains("suite") || !j["suite"].is_string()) throw SchemaError("config must name a suite");

  ExperimentConfig c;
  c.suite = parse_suite(j["suite"].get<std::string>());
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      throw SchemaError("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("instances")) {
    if (!j["instances"].is_number_integer() || j["instances"].get<std::int64_t>() < 1 ||
        j["instances"].get<std::int64_t>() > 1000000)
      throw SchemaError("instances must be an integer in [1, 1000000]");
    c.instances = j["instances"].get<std::size_t>();
  }
  for (const char* key : {"output_path", "csv_path"})
    if (j.contains(key) && !j[key].is_string()) throw SchemaError(std::string(key) + " must be a string");
  if (j.contains("output_path")) c.output_path = j["output_path"].get<std::string>();
  if (j.contains("csv_path")) c.csv_path = j["csv_path"].get<std::string>();

  const Json given = j.value("params", Json::object());
  if (!given.is_object()) throw SchemaError("params must be an object");
  const auto schema = suite_schema(c.suite);
  for (const auto& [k, v] : given.items()) {
    const bool known = std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.name == k; });
    if (!known) throw SchemaError("unknown parameter '" + k + "' for suite " + suite_name(c.suite));
  }
  for (const auto& spec : schema) {
    const Json v = given.contains(spec.name) ? given[spec.name] : spec.fallback;
    detail::check_param(spec, v);
    c.params[spec.name] = v;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Records

struct Record {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string digest;
  Json outputs = Json::object();
  Json verdicts = Json::object();
  Json artifact = Json::object();
  std::optional<std::string> error;
  double seconds = 0.0;

  bool verified() const {
    if (error || verdicts.empty()) return false;
    for (const auto& [k, v] : verdicts.items())
      if (!v.get<bool>()) return false;
    return true;
  }
};

/// FNV-1a 64 of a string, as 16 hex digits.
inline std::string fnv_digest(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = io::hex_digit(static_cast<unsigned>(h & 15U));
  return out;
}

namespace detail {

using json_io::exact;
using json_io::parse_exact;
using json_io::rounded;

inline ClassParams class_params(const Json& p) {
  ClassParams c;
  c.n = p.at("n").get<int>();
  if (p.contains("size")) c.size = p["size"].get<std::size_t>();
  if (p.contains("flip")) c.flip = p["flip"].get<double>();
  if (p.contains("points")) c.points = p["points"].get<std::size_t>();
  if (p.contains("levels")) c.levels = p["levels"].get<std::size_t>();
  if (p.contains("grid")) c.grid = p["grid"].get<std::size_t>();
  if (p.contains("qubits")) c.qubits = p["qubits"].get<int>();
  return c;
}

inline GeneratedClass make_class(const Json& p, const std::string& kind, std::uint64_t seed) {
  return generate_class(parse_class_kind(kind), class_params(p), seed);
}

inline Json class_json(const GeneratedClass& g) {
  return g.boolean ? json_io::class_to_json(*g.boolean) : json_io::class_to_json(*g.real);
}

inline std::vector<std::string> trace_lines(const std::vector<WinnowStep>& trace, int n) {
  std::vector<std::string> out;
  std::istringstream is(format_trace(trace, n));
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

inline InputSet random_inputs(const InputDomain& d, std::size_t count, Rng& rng) {
  if (count > d.size()) throw CapExceeded("requested more distinct inputs than the domain holds");
  std::vector<Input> all = d.all_inputs();
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
  all.resize(count);
  return make_input_set(std::move(all));
}

// -- majcert ----------------------------------------------------------------

inline Json majcert_verdicts(const ConceptClass& s, const MajorityDecomposition& d, bool robust) {
  bool isolation = d.certs.size() == d.m && d.funcs.size() == d.m;
  for (std::size_t i = 0; isolation && i < d.m; ++i) {
    const auto alive = restrict_class(s, d.certs[i]);
    isolation = alive.size() == 1 && s[alive[0]] == d.funcs[i];
  }
  bool majority = d.target == s[0];
  bool margins = true;
  for (Input x = 0; x < s.domain().size(); ++x) {
    std::size_t ones = 0;
    for (const auto& f : d.funcs) ones += f(x) ? 1 : 0;
    majority = majority && ((2 * ones > d.m) == d.target(x));
    if (robust)
      margins = margins && (d.target(x) ? 3 * ones >= 2 * d.m : 3 * ones <= d.m);
  }
  std::size_t k = 0;
  for (const auto& c : d.certs) k = std::max(k, c.size());
  Json v{{"isolation", isolation},
         {"majority", majority},
         {"m_odd", d.m % 2 == 1},
         {"certificate_size", k <= ceil_log_10_9(s.size()) + ceil_log2(s.size())}};
  if (robust) v["margins"] = margins;
  return v;
}

inline void run_majcert(const Json& p, Record& r) {
  const auto g = make_class(p, p["class"].get<std::string>(), r.seed);
  const ConceptClass& s = *g.boolean;
  const bool robust = p["robust"].get<bool>();
  MajorityDecomposition d = robust ? static_cast<MajorityDecomposition>(robust_majority_certificates(s, s[0], r.seed))
                                   : majority_certificates(s, s[0], r.seed);
  r.verdicts = majcert_verdicts(s, d, robust);
  std::size_t k = 0;
  for (const auto& c : d.certs) k = std::max(k, c.size());
  r.outputs = {{"n", s.domain().bits()},
               {"size", s.size()},
               {"m", d.m},
               {"max_certificate", k},
               {"certificate_bound", ceil_log_10_9(s.size()) + ceil_log2(s.size())},
               {"game_value", rounded(d.strategy.game_value)},
               {"iterations", d.strategy.iterations},
               {"support", d.strategy.certs.size()},
               {"attempts", d.attempts}};
  r.artifact = {{"class", class_json(g)}, {"decomposition", json_io::decomposition_to_json(d, true)}};
}

inline Json recheck_majcert(const Json& p, const Json& a) {
  const auto s = json_io::boolean_class_from_json(a.at("class"));
  const auto d = json_io::decomposition_from_json(a.at("decomposition"), s);
  return majcert_verdicts(s, d, p["robust"].get<bool>());
}

// -- realmajcert ------------------------------------------------------------

inline Json realmajcert_verdicts(const PConceptClass& s, const RealDecomposition& d, double t) {
  const std::size_t n = static_cast<std::size_t>(s.domain().bits());
  const std::size_t m_rule = s.size() == 1 ? 1 : static_cast<std::size_t>(std::ceil(20.0 * n / (d.eps * d.eps) - 1e-9));
  return {{"decomposition", verify_real_decomposition(s, d)},
          {"target_member", d.target == s[0]},
          {"alpha_rule", std::abs(d.alpha - 0.4 * (d.eps / 48.0) / t) <= 1e-15},
          {"m_rule", d.m == m_rule}};
}

inline void run_realmajcert(const Json& p, Record& r) {
  const auto g = make_class(p, p["class"].get<std::string>(), r.seed);
  const PConceptClass& s = *g.real;
  const double eps = p["eps"].get<double>();
  const auto d = real_majority_certificates(s, s[0], eps, r.seed);
  r.verdicts = realmajcert_verdicts(s, d, d.t);
  std::size_t max_points = 0;
  for (const auto& x : d.points) max_points = std::max(max_points, x.size());
  r.outputs = {{"n", s.domain().bits()},
               {"size", s.size()},
               {"m", d.m},
               {"alpha", rounded(d.alpha)},
               {"t", rounded(d.t)},
               {"max_points", max_points},
               {"outer_iterations", d.outer_iterations},
               {"strategies", d.strategies},
               {"game_penalty", rounded(d.game_penalty)},
               {"worst_error", rounded(real_decomposition_worst_error(s, d))},
               {"fat_beta", d.fat_beta},
               {"attempts", d.attempts}};
  r.artifact = {{"class", class_json(g)},
                {"decomposition", json_io::real_decomposition_to_json(d, true)},
                {"t", exact(d.t)}};
}

inline Json recheck_realmajcert(const Json&, const Json& a) {
  const auto s = json_io::real_class_from_json(a.at("class"));
  const auto d = json_io::real_decomposition_from_json(a.at("decomposition"), s);
  return realmajcert_verdicts(s, d, parse_exact(a.at("t")));
}

// -- winnow -----------------------------------------------------------------

inline Json winnow_verdicts(const PConceptClass& s, const CoverResult& cover, std::size_t f, const InputSet& y,
                            const InputSet& z, double eps) {
  const double k = std::log2(static_cast<double>(cover.size()));
  const double delta = eps / (5.0 * std::max(k, 1.0));
  const InputSet yz = set_union(y, z);
  bool first = true;
  for (const auto& g : s)
    if (sup_distance_on(s[f], g, yz) <= delta && sup_distance(s[f], g) > 3.0 * eps) first = false;
  return {{"cover_valid", is_valid_cover(s, cover) && cover.epsilon == eps},
          {"conclusion_i", first},
          {"conclusion_ii", sup_distance_on(s[f], s[0], y) <= eps / 5.0 + 1e-12},
          {"z_bound", static_cast<double>(z.size()) <= k + 1e-9}};
}

inline void run_winnow(const Json& p, Record& r) {
  const auto g = make_class(p, "random-pconcept", r.seed);
  const PConceptClass& s = *g.real;
  const double eps = p["eps"].get<double>();
  Rng rng(Rng::derive(r.seed, "winnow-y"));
  const InputSet y = random_inputs(s.domain(), p["y_size"].get<std::size_t>(), rng);
  const auto cover = epsilon_cover(s, eps);
  const auto w = safe_winnow(s, s[0], y, eps, cover);
  r.verdicts = winnow_verdicts(s, cover, w.index, y, w.z, eps);
  const int n = s.domain().bits();
  r.outputs = {{"size", s.size()},
               {"cover_size", cover.size()},
               {"log_cover", rounded(w.k)},
               {"z_size", w.z.size()},
               {"steps", w.trace.size()},
               {"delta", rounded(w.delta)}};
  r.artifact = {{"class", class_json(g)},
                {"f", w.index},
                {"y", json_io::inputs_to_json(y, n)},
                {"z", json_io::inputs_to_json(w.z, n)},
                {"eps", exact(eps)},
                {"cover", cover.members},
                {"trace", trace_lines(w.trace, n)}};
}

inline Json recheck_winnow(const Json&, const Json& a) {
  const auto s = json_io::real_class_from_json(a.at("class"));
  const double eps = parse_exact(a.at("eps"));
  const CoverResult cover{a.at("cover").get<MemberSet>(), eps};
  for (auto i : cover.members) require(i < s.size(), "cover member outside the class");
  const auto f = a.at("f").get<std::size_t>();
  require(f < s.size(), "winnowed member outside the class");
  return winnow_verdicts(s, cover, f, json_io::inputs_from_json(a.at("y"), s.domain()),
                         json_io::inputs_from_json(a.at("z"), s.domain()), eps);
}

// -- l1winnow ---------------------------------------------------------------

inline Json l1_verdicts(const PConceptClass& s, const CoverResult& cover, std::size_t f, const InputSet& x,
                        const std::vector<double>& progress, double eps) {
  bool post = true;
  for (const auto& g : s)
    if (distance(Metric::one, s[f], g, x) <= 0.4 * eps && sup_distance(s[f], g) > 2.0 * eps) post = false;
  bool ratio = true, decreasing = true;
  for (std::size_t t = 1; t < progress.size(); ++t) {
    ratio = ratio && progress[t] / progress[t - 1] < 1.0 - eps / 20.0;
    decreasing = decreasing && progress[t] < progress[t - 1];
  }
  double final_measure = 0.0;
  for (auto h : cover.members) final_measure += std::exp(-distance(Metric::one, s[f], s[h], x));
  const double x_bound = 40.0 / eps * std::log(static_cast<double>(cover.size()));
  return {{"cover_valid", is_valid_cover(s, cover) && cover.epsilon == eps},
          {"postcondition", post},
          {"ratio_bound", ratio},
          {"progress_decreasing", decreasing},
          {"final_measure", !progress.empty() && std::abs(final_measure - progress.back()) <= 1e-12},
          {"x_bound", static_cast<double>(x.size()) <= x_bound + 1e-9}};
}

inline void run_l1winnow(const Json& p, Record& r) {
  const auto g = make_class(p, "random-pconcept", r.seed);
  const PConceptClass& s = *g.real;
  const double eps = p["eps"].get<double>();
  const auto cover = epsilon_cover(s, eps);
  const auto w = l1_winnow(s, eps, cover);
  r.verdicts = l1_verdicts(s, cover, w.index, w.x, w.progress, eps);
  const int n = s.domain().bits();
  Json progress = Json::array();
  for (double v : w.progress) progress.push_back(exact(v));
  r.outputs = {{"size", s.size()},
               {"cover_size", cover.size()},
               {"x_size", w.x.size()},
               {"x_bound", rounded(40.0 / eps * std::log(static_cast<double>(cover.size())))},
               {"steps", w.ratios.size()},
               {"worst_ratio", rounded(w.worst_ratio())},
               {"ratio_limit", rounded(1.0 - eps / 20.0)}};
  r.artifact = {{"class", class_json(g)},  {"f", w.index},
                {"x", json_io::inputs_to_json(w.x, n)}, {"eps", exact(eps)},
                {"cover", cover.members},  {"progress", progress},
                {"trace", trace_lines(w.trace, n)}};
}

inline Json recheck_l1winnow(const Json&, const Json& a) {
  const auto s = json_io::real_class_from_json(a.at("class"));
  const double eps = parse_exact(a.at("eps"));
  const CoverResult cover{a.at("cover").get<MemberSet>(), eps};
  for (auto i : cover.members) require(i < s.size(), "cover member outside the class");
  const auto f = a.at("f").get<std::size_t>();
  require(f < s.size(), "winnowed member outside the class");
  std::vector<double> progress;
  for (const auto& v : a.at("progress")) progress.push_back(parse_exact(v));
  return l1_verdicts(s, cover, f, json_io::inputs_from_json(a.at("x"), s.domain()), progress, eps);
}

// -- l2counter --------------------------------------------------------------

struct L2Case {
  InputSet x;
  Input y;
  InputSet z;
};

inline Json l2_verdicts(const L2Family& fam, const RealFunction& f, const std::vector<L2Case>& cases) {
  const int n = fam.n();
  bool inf_one = true, two_bound = true, in_family = true, y_outside = true;
  for (const auto& c : cases) {
    std::vector<int> a = fam.coefficients(f);
    y_outside = y_outside && a[c.y] == 0 && !std::binary_search(c.x.begin(), c.x.end(), c.y);
    if (c.z.size() != static_cast<std::size_t>(n)) {
      in_family = false;
      continue;
    }
    a[c.y] = n;
    for (Input t : c.z) {
      if (a[t] <= 0) in_family = false;
      --a[t];
    }
    if (!in_family) continue;
    const RealFunction g = fam.member(a);
    std::size_t overlap = 0;
    for (Input t : c.z) overlap += std::binary_search(c.x.begin(), c.x.end(), t) ? 1 : 0;
    inf_one = inf_one && sup_distance(f, g) == 1.0;
    // squared Delta_2 on X is overlap / n^2, so the bound is overlap <= n
    two_bound = two_bound && overlap <= static_cast<std::size_t>(n) &&
                distance(Metric::two, f, g, c.x) <= 1.0 / std::sqrt(static_cast<double>(n)) + 1e-12;
  }
  return {{"cases", !cases.empty()},
          {"delta_inf_one", inf_one},
          {"delta_two_bound", two_bound},
          {"in_family", in_family},
          {"y_outside_x", y_outside}};
}

inline void run_l2counter(const Json& p, Record& r) {
  const int n = p["n"].get<int>();
  if (n > kMaxRealBits) throw CapExceeded("n exceeds the p-concept cap of 14");
  const L2Family fam(n);
  Rng rng(Rng::derive(r.seed, "l2"));
  // the corruption needs a zero of f outside X, so f needs a zero
  RealFunction f = fam.sample(rng);
  for (std::size_t tries = 1; std::none_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
       ++tries) {
    if (tries == 10000) throw SolverFailure("no family member with a zero was drawn");
    f = fam.sample(rng);
  }
  const auto a = fam.coefficients(f);
  const std::size_t domain = fam.domain().size();
  auto admissible = [&](const InputSet& x) {
    for (Input t = 0; t < domain; ++t)
      if (a[t] == 0 && !std::binary_search(x.begin(), x.end(), t)) return true;
    return false;
  };
  std::vector<InputSet> xs;
  const auto samples = p["x_samples"].get<std::size_t>();
  if (samples == 0) {
    if (domain > 16) throw CapExceeded("exhaustive X enumeration is limited to n <= 4");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << domain); ++mask) {
      InputSet x;
      for (Input t = 0; t < domain; ++t)
        if ((mask >> t) & 1U) x.push_back(t);
      if (admissible(x)) xs.push_back(std::move(x));
    }
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      InputSet x;
      do {
        x.clear();
        for (Input t = 0; t < domain; ++t)
          if (rng.coin()) x.push_back(t);
      } while (!admissible(x));
      xs.push_back(std::move(x));
    }
  }
  std::vector<L2Case> cases;
  double max_two = 0.0, min_inf = 1.0;
  Json jc = Json::array();
  for (const auto& x : xs) {
    const auto c = fam.corrupt(f, x);
    max_two = std::max(max_two, c.delta_two);
    min_inf = std::min(min_inf, c.delta_inf);
    cases.push_back({x, c.y, c.z});
    jc.push_back({{"x", json_io::inputs_to_json(x, n)},
                  {"y", io::input_hex(c.y, n)},
                  {"z", json_io::inputs_to_json(c.z, n)}});
  }
  r.verdicts = l2_verdicts(fam, f, cases);
  r.outputs = {{"n", n},
               {"x_count", xs.size()},
               {"max_delta_two", rounded(max_two)},
               {"min_delta_inf", rounded(min_inf)},
               {"delta_two_bound", rounded(1.0 / std::sqrt(static_cast<double>(n)))}};
  r.artifact = {{"n", n}, {"f", json_io::table_to_json(f)}, {"cases", jc}};
}

inline Json recheck_l2counter(const Json&, const Json& a) {
  const int n = a.at("n").get<int>();
  const L2Family fam(n);
  const RealFunction f = json_io::table_from_json(a.at("f"), fam.domain());
  std::vector<L2Case> cases;
  for (const auto& c : a.at("cases"))
    cases.push_back({json_io::inputs_from_json(c.at("x"), fam.domain()),
                     io::parse_input_hex(c.at("y").get<std::string>(), fam.domain()),
                     json_io::inputs_from_json(c.at("z"), fam.domain())});
  return l2_verdicts(fam, f, cases);
}

// -- dims -------------------------------------------------------------------

inline std::string gamma_key(double g) { return "fat[" + io::format_real(g) + "]"; }

inline void dims_compute(const GeneratedClass& g, const Json& p, Json& outputs, Json& verdicts) {
  const int cap = p["cap"].get<int>();
  std::vector<double> gammas = p["gammas"].get<std::vector<double>>();
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  const PConceptClass pc = g.boolean ? as_pconcept(*g.boolean) : *g.real;
  const int n = pc.domain().bits();
  outputs = {{"n", n}, {"size", pc.size()}};
  verdicts = Json::object();

  std::vector<DimensionResult> fats;
  for (double gm : gammas) {
    fats.push_back(fat_shattering_dim(pc, gm, cap));
    outputs[gamma_key(gm)] = fats.back().value;
    if (fats.back().at_least_cap) outputs[gamma_key(gm) + ".at_least"] = true;
  }
  bool antitone = true;
  for (std::size_t i = 1; i < fats.size(); ++i) antitone = antitone && fats[i].value <= fats[i - 1].value;
  verdicts["fat_antitone"] = antitone;

  if (g.boolean) {
    const auto vc = vc_dim(*g.boolean, cap);
    outputs["vc"] = vc.value;
    verdicts["sauer"] = vc.value < 63 && (std::uint64_t{1} << vc.value) <= g.boolean->size();
    bool eq = true;
    for (std::size_t i = 0; i < gammas.size(); ++i)
      if (gammas[i] <= 0.5) eq = eq && fats[i].value == vc.value && fats[i].at_least_cap == vc.at_least_cap;
    verdicts["fat_equals_vc"] = eq;
  }

  // greedy cover size against the dimension at eps/4, with the fitted
  // constant c in |cover| = exp(c (n + log2(1/eps)) fat_{eps/4})
  const double ce = p["cover_eps"].get<double>();
  const auto cover = epsilon_cover(pc, ce);
  const auto fq = fat_shattering_dim(pc, ce / 4.0, cap);
  outputs["cover_size"] = cover.size();
  outputs["cover_fat"] = fq.value;
  const double scale = (n + std::log2(1.0 / ce)) * std::max(1, fq.value);
  outputs["cover_constant"] = rounded(std::log(static_cast<double>(cover.size())) / scale);
  verdicts["cover_valid"] = is_valid_cover(pc, cover);
}

inline void run_dims(const Json& p, Record& r) {
  const auto g = make_class(p, p["class"].get<std::string>(), r.seed);
  dims_compute(g, p, r.outputs, r.verdicts);
  r.artifact = {{"kind", class_kind_name(g.kind)}, {"class", class_json(g)}};
}

inline Json recheck_dims(const Json& p, const Json& a) {
  GeneratedClass g;
  g.kind = parse_class_kind(a.at("kind").get<std::string>());
  if (is_boolean_kind(g.kind))
    g.boolean = json_io::boolean_class_from_json(a.at("class"));
  else
    g.real = json_io::real_class_from_json(a.at("class"));
  Json outputs, verdicts;
  dims_compute(g, p, outputs, verdicts);
  return verdicts;
}

// -- occam ------------------------------------------------------------------

inline constexpr double kOccamTarget = 0.5;

inline void run_occam(const Json& p, Record& r) {
  const auto g = make_class(p, "random-pconcept", r.seed);
  const PConceptClass& s = *g.real;
  const double eps = p["eps"].get<double>();
  const double beta = eps / 48.0;
  const InputDomain dom = s.domain();
  Rng rng(Rng::derive(r.seed, "occam"));
  Distribution d = Distribution::uniform(dom);
  if (p["distribution"].get<std::string>() == "random") {
    std::vector<double> w(dom.size());
    for (auto& v : w) v = rng.uniform() + 1e-3;
    d = Distribution::normalized(dom, std::move(w));
  }
  const auto fat = fat_shattering_dim(s, beta);
  const std::size_t start = occam_initial_size(static_cast<std::size_t>(fat.value), beta);
  const auto sched = occam_schedule(s, s[0], d, beta, start, rng);
  const auto trials = p["trials"].get<std::size_t>();
  const std::uint64_t check_seed = Rng::derive(r.seed, "occam-check");
  const auto res = occam_check(s, s[0], d, beta, sched.draws, trials, check_seed);
  r.verdicts = {{"pass_rate", res.pass_rate() >= kOccamTarget}};
  r.outputs = {{"size", s.size()},
               {"fat_beta", fat.value},
               {"initial_m", start},
               {"final_m", sched.draws},
               {"schedule_tries", sched.tries},
               {"passes", res.passes},
               {"trials", res.trials},
               {"pass_rate", rounded(res.pass_rate())}};
  Json w = Json::array();
  for (double v : d.weights()) w.push_back(exact(v));
  r.artifact = {{"class", class_json(g)},  {"weights", w},           {"beta", exact(beta)},
                {"m", sched.draws},        {"trials", trials},       {"check_seed", check_seed}};
}

inline Json recheck_occam(const Json&, const Json& a) {
  const auto s = json_io::real_class_from_json(a.at("class"));
  std::vector<double> w;
  for (const auto& v : a.at("weights")) w.push_back(parse_exact(v));
  require(w.size() == s.domain().size(), "distribution has the wrong length");
  const Distribution d(s.domain(), std::move(w));
  const auto res = occam_check(s, s[0], d, parse_exact(a.at("beta")), a.at("m").get<std::size_t>(),
                               a.at("trials").get<std::size_t>(), a.at("check_seed").get<std::uint64_t>());
  return {{"pass_rate", res.pass_rate() >= kOccamTarget}};
}

// -- quantum-protocol -------------------------------------------------------

inline constexpr double kCompletenessBound = 0.3;
inline constexpr double kViolationThreshold = 1.0 / 3.0;

struct ProtocolScores {
  Json verdicts;
  double deviation = 0.0, b_error = 0.0, soundness = 0.0, adversary = 0.0, broken = -1.0;
};

inline ProtocolScores protocol_scores(const AdviceProtocol& pr, double eps, std::size_t restarts, double inflate,
                                      std::uint64_t adv_seed) {
  ProtocolScores out;
  const auto honest = pr.honest_advice();
  bool within = true;
  for (std::size_t i = 0; i < pr.m(); ++i)
    for (auto [z, r] : pr.targets[i])
      within = within && std::abs(accept_probability(pr.circuit, z, honest.reduced(i)) - r) <= pr.alpha + 1e-12;
  const auto a = verifier_A(pr, honest);
  out.deviation = a.deviation;
  out.b_error = machine_B_error(pr, honest);
  out.soundness = conditional_soundness_error(pr);
  out.adversary = adversary_search(pr, restarts, adv_seed).b_error;
  out.verdicts = {{"targets_within_alpha", within},
                  {"honest_accept", a.deviation <= pr.alpha + 1e-12},
                  {"completeness", out.b_error <= kCompletenessBound + 1e-12},
                  {"conditional_soundness", out.soundness <= eps + 1e-12 && eps + kLanguageMargin <= kCompletenessBound + 1e-12},
                  {"adversary_no_violation", out.adversary <= kViolationThreshold}};
  if (inflate > 0.0) {
    out.broken = adversary_search(with_inflated_alpha(pr, inflate), restarts, adv_seed).b_error;
    out.verdicts["broken_detected"] = out.broken > kViolationThreshold;
  }
  return out;
}

inline void run_quantum_protocol(const Json& p, Record& r) {
  const int n = p["n"].get<int>();
  if (n > kMaxRealBits) throw CapExceeded("n exceeds the p-concept cap of 14");
  const double eps = p["eps"].get<double>();
  const Circuit q = advice_demo_circuit(n);
  Rng rng(Rng::derive(r.seed, "advice-sample"));
  std::vector<DensityMatrix> sample;
  for (std::size_t i = 0; i < p["samples"].get<std::size_t>(); ++i) sample.push_back(random_mixed_state(1, rng));
  const auto pr = compile_advice(q, n, advice_demo_state(), advice_demo_language(n), eps, sample, r.seed);
  const std::uint64_t adv_seed = Rng::derive(r.seed, "adversary-run");
  const auto sc = protocol_scores(pr, eps, p["restarts"].get<std::size_t>(), p["inflate"].get<double>(), adv_seed);
  r.verdicts = sc.verdicts;
  r.outputs = {{"m", pr.m()},
               {"alpha", rounded(pr.alpha)},
               {"denominator_bits", pr.denominator_bits},
               {"alpha_halvings", pr.alpha_halvings},
               {"class_size", pr.compiled.size()},
               {"distinct_states", pr.states.size()},
               {"honest_deviation", rounded(sc.deviation)},
               {"honest_b_error", rounded(sc.b_error)},
               {"soundness_bound", rounded(sc.soundness)},
               {"adversary_error", rounded(sc.adversary)},
               {"soundness_scope", "exact over the compiled class; searched over the full state space"}};
  if (sc.broken >= 0.0)
    r.outputs["broken_adversary_error"] = rounded(sc.broken);
  r.artifact = {{"protocol", json_io::protocol_to_json(pr)}, {"eps", exact(eps)}, {"adversary_seed", adv_seed}};
}

inline Json recheck_quantum_protocol(const Json& p, const Json& a) {
  const auto pr = json_io::protocol_from_json(a.at("protocol"));
  return protocol_scores(pr, parse_exact(a.at("eps")), p["restarts"].get<std::size_t>(), p["inflate"].get<double>(),
                         a.at("adversary_seed").get<std::uint64_t>())
      .verdicts;
}

// -- equivalence ------------------------------------------------------------

inline constexpr double kValueTolerance = 1e-6;

inline void equivalence_compute(const ConceptClass& s, std::size_t k, std::size_t sweep_max, Json& outputs,
                                Json& verdicts) {
  const auto lp = solve_game_full_lp(s, s[0], k);
  const auto dox = double_oracle_exact(s, s[0], k);
  const double lp_check = strategy_value(s, s[0], lp.funcs, lp.weights);
  const double do_check = strategy_value(s, s[0], dox.funcs, dox.weights);
  bool nondecreasing = true;
  for (std::size_t i = 1; i < dox.history.size(); ++i) nondecreasing = nondecreasing && dox.history[i] >= dox.history[i - 1] - 1e-12;
  verdicts = {{"values_agree", std::abs(lp.game_value - dox.game_value) <= kValueTolerance},
              {"lp_value_recomputed", std::abs(lp_check - lp.game_value) <= 1e-9},
              {"double_oracle_value_recomputed", std::abs(do_check - dox.game_value) <= 1e-9},
              {"restricted_values_nondecreasing", nondecreasing}};
  outputs = {{"n", s.domain().bits()},
             {"size", s.size()},
             {"k", k},
             {"lp_value", rounded(lp.game_value)},
             {"double_oracle_value", rounded(dox.game_value)},
             {"difference", rounded(std::abs(lp.game_value - dox.game_value))},
             {"isolating_certificates", lp.isolating_certificates},
             {"double_oracle_iterations", dox.iterations}};
  if (sweep_max > 0) {
    const auto sw = certificate_size_sweep(s, s[0], 0.9, sweep_max);
    outputs["first_k_reaching_0.9"] = sw.first_k ? Json(*sw.first_k) : Json(nullptr);
  }
}

inline void run_equivalence(const Json& p, Record& r) {
  const auto g = make_class(p, "random-boolean", r.seed);
  equivalence_compute(*g.boolean, p["k"].get<std::size_t>(), p["sweep_max"].get<std::size_t>(), r.outputs,
                      r.verdicts);
  r.artifact = {{"class", class_json(g)}};
}

inline Json recheck_equivalence(const Json& p, const Json& a) {
  Json outputs, verdicts;
  equivalence_compute(json_io::boolean_class_from_json(a.at("class")), p["k"].get<std::size_t>(), 0, outputs,
                      verdicts);
  return verdicts;
}

struct SuiteOps {
  std::function<void(const Json&, Record&)> run;
  std::function<Json(const Json&, const Json&)> recheck;
};

inline SuiteOps suite_ops(Suite s) {
  switch (s) {
    case Suite::majcert: return {run_majcert, recheck_majcert};
    case Suite::realmajcert: return {run_realmajcert, recheck_realmajcert};
    case Suite::winnow: return {run_winnow, recheck_winnow};
    case Suite::l1winnow: return {run_l1winnow, recheck_l1winnow};
    case Suite::l2counter: return {run_l2counter, recheck_l2counter};
    case Suite::dims: return {run_dims, recheck_dims};
    case Suite::occam: return {run_occam, recheck_occam};
    case Suite::quantum_protocol: return {run_quantum_protocol, recheck_quantum_protocol};
    case Suite::equivalence: return {run_equivalence, recheck_equivalence};
  }
  throw SchemaError("unknown suite");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Running

struct RunOptions {
  std::size_t jobs = 1;
  bool timings = false;  // wall-clock seconds make reports non-reproducible
};

struct Report {
  ExperimentConfig config;
  std::vector<Record> records;

  std::size_t verified_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const Record& r) { return r.verified(); }));
  }
  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const Record& r) { return r.error.has_value(); }));
  }
  bool all_verified() const { return verified_count() == records.size(); }
};

inline Record run_instance(const ExperimentConfig& c, std::size_t index, bool timings) {
  Record r;
  r.index = index;
  r.seed = Rng::derive(c.seed, index);
  const auto ops = detail::suite_ops(c.suite);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ops.run(c.params, r);
    const Json& a = r.artifact;
    r.digest = fnv_digest((a.contains("class") ? a["class"] : a).dump());
  } catch (const std::exception& e) {
    // cap breaches and solver failures are reported per instance
    r.outputs = Json::object();
    r.verdicts = {{"completed", false}};
    r.artifact = Json::object();
    r.digest = fnv_digest("");
    r.error = e.what();
  }
  if (timings) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline Report run(const ExperimentConfig& c, const RunOptions& opt = {}) {
  Report rep{c, std::vector<Record>(c.instances)};
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, c.instances));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < c.instances;) rep.records[i] = run_instance(c, i, opt.timings);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rep;
}

inline Json record_to_json(const Record& r, bool timings) {
  Json j{{"index", r.index},         {"seed", r.seed},         {"inputs_digest", r.digest},
         {"outputs", r.outputs},     {"verdicts", r.verdicts}, {"verified", r.verified()},
         {"artifact", r.artifact},   {"error", r.error ? Json(*r.error) : Json(nullptr)}};
  if (timings) j["seconds"] = json_io::rounded(r.seconds);
  return j;
}

/// min / max / mean of every numeric output over completed records.
inline Json summary_stats(const std::vector<Record>& records) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : records) {
    if (r.error) continue;
    for (const auto& [k, v] : r.outputs.items())
      if (v.is_number()) values[k].push_back(v.get<double>());
  }
  Json out = Json::object();
  for (const auto& [k, vs] : values) {
    double sum = 0.0;
    for (double v : vs) sum += v;
    out[k] = {{"min", json_io::rounded(*std::min_element(vs.begin(), vs.end()))},
              {"max", json_io::rounded(*std::max_element(vs.begin(), vs.end()))},
              {"mean", json_io::rounded(sum / static_cast<double>(vs.size()))},
              {"count", vs.size()}};
  }
  return out;
}

inline Json report_to_json(const Report& rep, bool timings = false) {
  Json records = Json::array();
  for (const auto& r : rep.records) records.push_back(record_to_json(r, timings));
  const std::size_t verified = rep.verified_count(), errors = rep.error_count();
  return {{"schema", kSchemaVersion},
          {"artifact_version", kArtifactVersion},
          {"suite", suite_name(rep.config.suite)},
          {"seed", rep.config.seed},
          {"config", rep.config.echo()},
          {"records", records},
          {"summary",
           {{"instances", rep.records.size()},
            {"verified", verified},
            {"failed", rep.records.size() - verified - errors},
            {"errors", errors},
            {"outputs", summary_stats(rep.records)}}}};
}

/// One row per record: index, verified, error flag, then every scalar output.
inline std::string report_csv(const Report& rep) {
  std::set<std::string> keys;
  for (const auto& r : rep.records)
    for (const auto& [k, v] : r.outputs.items())
      if (v.is_primitive() && !v.is_string()) keys.insert(k);
  std::ostringstream os;
  os << "index,verified,error";
  for (const auto& k : keys) os << ',' << k;
  os << '\n';
  for (const auto& r : rep.records) {
    os << r.index << ',' << (r.verified() ? "true" : "false") << ',' << (r.error ? "true" : "false");
    for (const auto& k : keys) {
      os << ',';
      if (r.outputs.contains(k)) os << r.outputs[k].dump();
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Re-verification

struct VerifyOutcome {
  bool consistent = true;  // stored verdicts match recomputation, counts match
  bool all_verified = true;
  std::size_t records = 0;
  std::vector<std::string> problems;

  bool ok() const { return consistent && all_verified; }
};

inline VerifyOutcome verify_report(const Json& rep) {
  VerifyOutcome out;
  auto problem = [&](std::string s) {
    out.consistent = false;
    out.problems.push_back(std::move(s));
  };
  if (!rep.is_object() || !rep.contains("schema") || rep["schema"] != kSchemaVersion)
    throw SchemaError("report must declare \"schema\": 1");
  for (const char* key : {"config", "records", "summary", "suite"})
    if (!rep.contains(key)) throw SchemaError(std::string("report is missing '") + key + "'");
  const ExperimentConfig c = parse_config(rep["config"]);
  if (rep["suite"] != suite_name(c.suite)) problem("suite does not match the config echo");
  const auto ops = detail::suite_ops(c.suite);
  const auto& records = rep["records"];
  if (records.size() != c.instances) problem("record count differs from the configured instance count");

  std::size_t verified = 0, errors = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string tag = "record " + std::to_string(i) + ": ";
    if (r.value("index", SIZE_MAX) != i) problem(tag + "out of index order");
    const bool stored = r.value("verified", false);
    bool all = !r["verdicts"].empty();
    for (const auto& [k, v] : r["verdicts"].items()) all = all && v.is_boolean() && v.get<bool>();
    const bool has_error = r.contains("error") && !r["error"].is_null();
    if (has_error) {
      ++errors;
      if (stored) problem(tag + "marked verified despite an error");
    } else {
      try {
        const Json again = ops.recheck(c.params, r.at("artifact"));
        if (again != r["verdicts"]) problem(tag + "verdicts differ on recomputation: " + again.dump());
      } catch (const std::exception& e) {
        problem(tag + "artifact could not be rechecked: " + e.what());
      }
    }
    if (stored != (all && !has_error)) problem(tag + "'verified' disagrees with its verdicts");
    if (stored) ++verified;
    else out.all_verified = false;
  }
  const auto& s = rep["summary"];
  if (s.value("instances", SIZE_MAX) != records.size() || s.value("verified", SIZE_MAX) != verified ||
      s.value("errors", SIZE_MAX) != errors || s.value("failed", SIZE_MAX) != records.size() - verified - errors)
    problem("summary counts do not match the records");
  out.records = records.size();
  return out;
}

}  // namespace majcert::experiment
