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

// majcert_cli run --config <path> [--seed <u64>] [--out <path>] [--jobs <int>]
// majcert_cli verify --report <path>
//
// Exit status: 0 when every verdict holds, 1 when some verdict failed,
// 2 for unusable input (bad config, unreadable file).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "majcert/experiment.hpp"

namespace {

using majcert::experiment::Json;

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw majcert::RejectedInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw majcert::RejectedInput(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw majcert::RejectedInput("cannot write " + path);
  out << text;
}

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_path,
                const std::string& csv_path, std::size_t jobs, bool timings) {
  namespace ex = majcert::experiment;
  ex::ExperimentConfig cfg = ex::parse_config(read_json(config_path));
  if (seed) cfg.seed = *seed;
  if (!out_path.empty()) cfg.output_path = out_path;
  if (!csv_path.empty()) cfg.csv_path = csv_path;

  const auto rep = ex::run(cfg, {jobs, timings});
  const std::string text = ex::report_to_json(rep, timings).dump(2) + "\n";
  if (cfg.output_path.empty())
    std::cout << text;
  else
    write_text(cfg.output_path, text);
  if (!cfg.csv_path.empty()) write_text(cfg.csv_path, ex::report_csv(rep));

  std::cerr << ex::suite_name(cfg.suite) << ": " << rep.verified_count() << "/" << rep.records.size()
            << " instances verified";
  if (rep.error_count() > 0) std::cerr << ", " << rep.error_count() << " errors";
  std::cerr << "\n";
  for (const auto& r : rep.records)
    if (r.error) std::cerr << "  instance " << r.index << ": " << *r.error << "\n";
  return rep.all_verified() ? 0 : kExitFailed;
}

int verify_command(const std::string& report_path) {
  const auto v = majcert::experiment::verify_report(read_json(report_path));
  for (const auto& p : v.problems) std::cerr << "  " << p << "\n";
  std::cerr << "verify: " << v.records << " records, " << (v.consistent ? "consistent" : "INCONSISTENT") << ", "
            << (v.all_verified ? "all verified" : "some verdicts failed") << "\n";
  return v.ok() ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majority-certificate experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment suite and write a JSON report");
  std::string config_path, out_path, csv_path;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool timings = false;
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_path, "report path (default: config output_path, else stdout)");
  run->add_option("--csv", csv_path, "also write a CSV summary");
  run->add_option("--jobs", jobs, "instances run concurrently")->check(CLI::Range(1, 256));
  run->add_flag("--timings", timings, "record wall-clock seconds per instance");

  auto* verify = app.add_subcommand("verify", "recheck every verdict of a report from its artifacts");
  std::string report_path;
  verify->add_option("--report", report_path, "report to check")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, seed, out_path, csv_path, jobs, timings);
    return verify_command(report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
