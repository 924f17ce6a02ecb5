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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "majcert/experiment.hpp"
#include "test_util.hpp"

namespace majcert {
namespace {

using experiment::Json;
using experiment::SchemaError;

Json config(const std::string& suite, Json params, std::size_t instances = 2, std::uint64_t seed = 3) {
  return {{"schema", 1}, {"suite", suite}, {"seed", seed}, {"instances", instances}, {"params", std::move(params)}};
}

Json run_json(const Json& cfg, std::size_t jobs = 1) {
  return experiment::report_to_json(experiment::run(experiment::parse_config(cfg), {jobs, false}));
}

TEST(ParseConfig, FillsDefaults) {
  const auto c = experiment::parse_config(config("winnow", Json::object()));
  EXPECT_EQ(c.suite, experiment::Suite::winnow);
  EXPECT_EQ(c.params["n"], 3);
  EXPECT_EQ(c.params["y_size"], 2);
  EXPECT_DOUBLE_EQ(c.params["eps"].get<double>(), 0.1);
}

TEST(ParseConfig, RejectsSchemaViolations) {
  const Json good = config("majcert", {{"n", 4}});
  EXPECT_NO_THROW(experiment::parse_config(good));
  auto bad = [&](auto edit) {
    Json j = good;
    edit(j);
    return j;
  };
  EXPECT_THROW(experiment::parse_config(Json::array()), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["extra"] = 1; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["schema"] = 2; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j.erase("schema"); })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["suite"] = "nope"; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["seed"] = -1; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["instances"] = 0; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"]["colour"] = 1; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"]["n"] = 0; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"]["n"] = 2.5; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"]["class"] = "other"; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"]["robust"] = 1; })), SchemaError);
  EXPECT_THROW(experiment::parse_config(bad([](Json& j) { j["params"] = 5; })), SchemaError);
}

TEST(ParseConfig, ShippedConfigsAreValid) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(MAJCERT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    EXPECT_NO_THROW(experiment::parse_config(Json::parse(in))) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 9u);
}

TEST(GenerateClass, SizesMatchTheirDefinitions) {
  ClassParams p;
  p.n = 3;
  EXPECT_EQ(generate_class(ClassKind::point_functions, p, 1).size(), 9u);  // zero plus 8 points
  p.n = 4;
  p.size = 8;
  EXPECT_EQ(generate_class(ClassKind::random_boolean, p, 1).size(), 8u);
  p.n = 2;
  EXPECT_EQ(generate_class(ClassKind::l2_family, p, 1).size(), 19u);
  p.n = 1;
  p.size = 5;
  EXPECT_THROW(generate_class(ClassKind::random_boolean, p, 1), CapExceeded);  // only 4 exist
}

TEST(GenerateClass, IsDeterministicInTheSeed) {
  ClassParams p;
  p.n = 5;
  p.size = 12;
  const auto a = generate_class(ClassKind::random_boolean, p, 9);
  const auto b = generate_class(ClassKind::random_boolean, p, 9);
  const auto c = generate_class(ClassKind::random_boolean, p, 10);
  EXPECT_EQ(json_io::class_to_json(*a.boolean), json_io::class_to_json(*b.boolean));
  EXPECT_NE(json_io::class_to_json(*a.boolean), json_io::class_to_json(*c.boolean));
}

TEST(Run, ReportIsIndependentOfWorkerCount) {
  const Json cfg = config("majcert", {{"class", "random-boolean"}, {"n", 5}, {"size", 16}, {"flip", 0.05}}, 6, 41);
  EXPECT_EQ(run_json(cfg, 1).dump(), run_json(cfg, 4).dump());
  const Json other = config("realmajcert", {{"n", 2}, {"size", 10}, {"eps", 0.3}}, 4, 8);
  EXPECT_EQ(run_json(other, 1).dump(), run_json(other, 3).dump());
}

TEST(Run, PointFunctionsDecompose) {
  const Json rep = run_json(config("majcert", {{"class", "point-functions"}, {"n", 6}}, 2));
  EXPECT_EQ(rep["summary"]["verified"], 2);
  for (const auto& r : rep["records"]) EXPECT_TRUE(r["verified"].get<bool>()) << r.dump();
}

TEST(Run, L2CounterWitnessHasFullSupDistance) {
  const Json rep = run_json(config("l2counter", {{"n", 2}}, 3));
  EXPECT_EQ(rep["summary"]["verified"], 3);
  for (const auto& r : rep["records"]) {
    EXPECT_DOUBLE_EQ(r["outputs"]["min_delta_inf"].get<double>(), 1.0);
    EXPECT_LE(r["outputs"]["max_delta_two"].get<double>(), 1.0 / std::sqrt(2.0) + 1e-9);
  }
}

TEST(Run, CapBreachBecomesARecordError) {
  const Json rep = run_json(config("majcert", {{"class", "point-functions"}, {"n", 40}}, 1));
  EXPECT_EQ(rep["summary"]["errors"], 1);
  EXPECT_FALSE(rep["records"][0]["error"].is_null());
  EXPECT_FALSE(rep["records"][0]["verified"].get<bool>());
}

TEST(Run, TimingsAreOptIn) {
  const auto c = experiment::parse_config(config("winnow", Json::object(), 1));
  const auto rep = experiment::run(c, {1, true});
  EXPECT_FALSE(experiment::report_to_json(rep)["records"][0].contains("seconds"));
  EXPECT_TRUE(experiment::report_to_json(rep, true)["records"][0].contains("seconds"));
}

TEST(Run, CsvHasOneRowPerRecord) {
  const auto rep = experiment::run(experiment::parse_config(config("winnow", Json::object(), 3)));
  const std::string csv = experiment::report_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("index,verified,error", 0), 0u);
}

TEST(VerifyReport, AcceptsFreshReportsAndCatchesTampering) {
  const Json rep = run_json(config("winnow", Json::object(), 3));
  EXPECT_TRUE(experiment::verify_report(rep).ok());

  Json verdict = rep;
  auto& v = verdict["records"][1]["verdicts"];
  v[v.begin().key()] = false;
  EXPECT_FALSE(experiment::verify_report(verdict).consistent);

  Json summary = rep;
  summary["summary"]["verified"] = 1;
  EXPECT_FALSE(experiment::verify_report(summary).consistent);

  Json dropped = rep;
  dropped["records"].erase(2);
  EXPECT_FALSE(experiment::verify_report(dropped).consistent);

  Json bad = rep;
  bad.erase("records");
  EXPECT_THROW(experiment::verify_report(bad), SchemaError);
}

TEST(VerifyReport, RechecksStoredArtifacts) {
  const Json rep = run_json(config("majcert", {{"class", "point-functions"}, {"n", 4}}, 1));
  ASSERT_TRUE(experiment::verify_report(rep).ok());
  Json tampered = rep;
  auto& certs = tampered["records"][0]["artifact"]["decomposition"]["certs"];
  ASSERT_FALSE(certs.empty());
  certs[0] = Json::array();  // an empty certificate isolates nothing
  EXPECT_FALSE(experiment::verify_report(tampered).consistent);
}

TEST(Serialize, MajorityDecompositionRoundTrips) {
  const auto s = testing::full_point_class(4);
  const auto fstar = BooleanFunction::constant(s.domain(), false);
  const auto d = majority_certificates(s, fstar, 6);
  const Json j = json_io::decomposition_to_json(d, true);
  const auto back = json_io::decomposition_from_json(Json::parse(j.dump()), s);
  EXPECT_EQ(back.m, d.m);
  EXPECT_EQ(back.indices, d.indices);
  EXPECT_TRUE(back.target == d.target);
  ASSERT_EQ(back.certs.size(), d.certs.size());
  for (std::size_t i = 0; i < d.certs.size(); ++i) EXPECT_TRUE(back.certs[i] == d.certs[i]);
  EXPECT_TRUE(verify_majority(s, back));
}

TEST(Serialize, ProtocolRoundTripsExactly) {
  Rng rng(2);
  std::vector<DensityMatrix> sample;
  for (int i = 0; i < 12; ++i) sample.push_back(random_mixed_state(1, rng));
  const auto p = compile_advice(advice_demo_circuit(2), 2, advice_demo_state(), advice_demo_language(2), 0.1, sample, 4);
  const auto back = json_io::protocol_from_json(Json::parse(json_io::protocol_to_json(p).dump()));
  EXPECT_EQ(back.m(), p.m());
  EXPECT_EQ(back.alpha, p.alpha);
  EXPECT_EQ(back.targets, p.targets);
  EXPECT_EQ(back.points, p.points);
  EXPECT_EQ(back.register_state, p.register_state);
  EXPECT_EQ(back.circuit.format(), p.circuit.format());
  EXPECT_EQ(conditional_soundness_error(back), conditional_soundness_error(p));
  EXPECT_EQ(verifier_A(back, back.honest_advice()).deviation, verifier_A(p, p.honest_advice()).deviation);
}

TEST(Serialize, StatesRoundTripExactly) {
  Rng rng(5);
  for (int q = 1; q <= 3; ++q) {
    const auto rho = random_mixed_state(q, rng);
    const auto back = json_io::state_from_json(Json::parse(json_io::state_to_json(rho).dump()));
    EXPECT_EQ(back.max_abs_difference(rho), 0.0);
  }
}

}  // namespace
}  // namespace majcert
