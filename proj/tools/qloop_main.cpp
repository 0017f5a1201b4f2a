// Copyright 2026 The qloop Authors
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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qloop/errors.hpp"
#include "qloop/harness.hpp"

namespace {

using qloop::harness::RunConfig;

struct RunOptions {
  std::string config_path;
  std::string preset;
  std::optional<int> n;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  bool sampled = false;
  std::optional<std::size_t> shots;
  std::optional<double> p;
  std::optional<std::string> output;
  bool include_n7 = false;
  int jobs = 1;
};

void apply_overrides(RunConfig& config, const RunOptions& o) {
  if (o.restarts) config.restarts = *o.restarts;
  if (o.seed) config.optimizer.seed = *o.seed;
  if (o.sampled) config.fitness_mode = qloop::harness::FitnessMode::kSampled;
  if (o.shots) config.shots_per_term = *o.shots;
  if (o.p) config.noise.p = *o.p;
  if (o.output) config.output_path = *o.output;
}

void print_summary(const qloop::harness::Summary& s) {
  std::cout << qloop::harness::to_json(s).dump(2) << '\n';
}

int run_configs(std::vector<RunConfig> configs, int jobs,
                const std::optional<std::filesystem::path>& combined) {
  bool ok = true;
  std::vector<qloop::harness::LearningRunRecord> all;
  for (auto& config : configs) {
    config.validate();
    std::clog << "running N=" << config.system.n_qubits << " restarts=" << config.restarts
              << " -> " << config.output_path << '\n';
    auto outcome = qloop::harness::run_experiment(config, jobs);
    ok = ok && outcome.ok();
    for (auto& r : outcome.records) all.push_back(std::move(r));
  }
  if (all.empty()) {
    std::cerr << "no restart completed\n";
    return 1;
  }
  const auto summary = qloop::harness::summarize(all);
  if (combined) qloop::harness::write_summary(summary, *combined);
  print_summary(summary);
  return ok ? 0 : 1;
}

int do_run(const RunOptions& o) {
  if (!o.config_path.empty()) {
    RunConfig config = qloop::harness::load_config(o.config_path);
    apply_overrides(config, o);
    return run_configs({config}, o.jobs, std::nullopt);
  }
  if (o.preset == "fig3") {
    RunConfig config = qloop::harness::fig3_preset();
    apply_overrides(config, o);
    return run_configs({config}, o.jobs, std::nullopt);
  }
  std::vector<int> sizes;
  if (o.n) {
    sizes = {*o.n};
  } else {
    sizes = {1, 2, 3, 4, 5};
    if (o.include_n7) sizes.push_back(7);
  }
  std::vector<RunConfig> configs;
  std::filesystem::path root = "runs/fig2";
  for (int n : sizes) {
    RunConfig config = qloop::harness::fig2_preset(n);
    apply_overrides(config, o);
    if (o.output) {
      root = *o.output;
      config.output_path = (root / ("n" + std::to_string(n))).string();
    }
    configs.push_back(config);
  }
  std::optional<std::filesystem::path> combined;
  if (sizes.size() > 1) {
    std::filesystem::create_directories(root);
    combined = root / "summary.json";
  }
  return run_configs(std::move(configs), o.jobs, combined);
}

int do_summarize(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<qloop::harness::LearningRunRecord> records;
  for (const auto& p : paths) records.push_back(qloop::harness::read_record(p));
  const auto summary = qloop::harness::summarize(records);
  if (!out.empty()) qloop::harness::write_summary(summary, out);
  print_summary(summary);
  return 0;
}

int do_validate(std::uint64_t seed) {
  bool ok = true;
  for (const auto& c : qloop::harness::validate_invariants(seed)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qloop: closed-loop probe-state learning simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run learning restarts from a config file or preset");
  auto* config_opt = run->add_option("--config", run_opts.config_path, "JSON run config")
                         ->check(CLI::ExistingFile);
  auto* preset_opt = run->add_option("--preset", run_opts.preset, "Built-in preset")
                         ->check(CLI::IsMember({"fig2", "fig3"}));
  config_opt->excludes(preset_opt);
  run->add_option("--n", run_opts.n, "Qubit count for the fig2 preset")->check(CLI::Range(1, 10));
  run->add_option("--restarts", run_opts.restarts, "Number of restarts")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_opts.seed, "Base optimizer seed");
  run->add_flag("--sampled", run_opts.sampled, "Use sampled SWAP-test fitness");
  run->add_option("--shots", run_opts.shots, "Shots per SWAP-test term");
  run->add_option("--p", run_opts.p, "Ancilla dephasing strength");
  run->add_option("--output", run_opts.output, "Output directory");
  run->add_flag("--include-n7", run_opts.include_n7, "Add N=7 to the fig2 sweep");
  run->add_option("--jobs", run_opts.jobs, "Concurrent restarts")->check(CLI::PositiveNumber);

  std::vector<std::string> record_paths;
  std::string summary_out;
  auto* summarize = app.add_subcommand("summarize", "Summarize learning record files");
  summarize->add_option("records", record_paths, "Record files")->required()->check(CLI::ExistingFile);
  summarize->add_option("--out", summary_out, "Write the summary JSON here");

  std::string suite;
  std::uint64_t validate_seed = 7;
  auto* validate = app.add_subcommand("validate", "Run built-in self checks");
  validate->add_option("--suite", suite, "Check suite")->required()->check(CLI::IsMember({"invariants"}));
  validate->add_option("--seed", validate_seed, "Seed for random draws");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_opts.config_path.empty() && run_opts.preset.empty()) {
        std::cerr << "run needs --config or --preset\n";
        return 2;
      }
      return do_run(run_opts);
    }
    if (*summarize) return do_summarize(record_paths, summary_out);
    if (*validate) return do_validate(validate_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
