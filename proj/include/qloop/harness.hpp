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

/**
 * @file
 * Closed-loop orchestration: turns a RunConfig into an objective over
 * flattened control parameters, runs Nelder-Mead restarts, and persists
 * per-iteration learning records plus a summary.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qloop/metrology.hpp"
#include "qloop/nmopt.hpp"
#include "qloop/spinsys.hpp"
#include "qloop/swapsim.hpp"

namespace qloop::harness {

enum class FitnessMode { kExact, kSampled };

struct StrataChoice {
  enum class Kind { kExperiment, kGaussian };
  Kind kind = Kind::kGaussian;
  int k = 1001;
  double dx2 = 1e-3;

  metrology::StrataSet build() const;
  bool operator==(const StrataChoice&) const = default;
};

struct RunConfig {
  spinsys::SpinSystemSpec system;
  FitnessMode fitness_mode = FitnessMode::kExact;
  StrataChoice strata;
  swapsim::NoiseModel noise;
  std::size_t shots_per_term = 1000;
  nmopt::OptimizerConfig optimizer;
  int restarts = 1;
  std::string output_path = "runs";
  bool record_true_qfi = true;
  bool record_noon_fidelity = true;
  /// Write every stride-th iteration (plus the first and last).
  int record_stride = 1;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Strict JSON mapping; unknown keys throw ValidationError.
nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Single qubit, M = 3, experiment strata, 25 iterations, 7 vertices.
RunConfig fig3_preset();
/// Spin chain of n qubits, chain defaults, fine Gaussian strata with
/// dx2 = 1e-3, exact fitness.
RunConfig fig2_preset(int n_qubits);

/// Per-coordinate box: field amplitudes in init_range intersected with
/// +-amplitude_bound, durations in dt_bounds.
nmopt::Bounds parameter_bounds(const RunConfig& config);

/// Maps flat parameters to 1 - delta_gamma of the prepared probe. In sampled
/// mode each call draws its shot noise from derive_seed(sampling_seed, call
/// index), so a trajectory depends only on the config and the seed.
class ProbeObjective {
 public:
  ProbeObjective(const RunConfig& config, std::uint64_t sampling_seed);

  double operator()(std::span<const double> params);
  qcore::QuantumState probe(std::span<const double> params) const;
  metrology::FitnessReport exact_fitness(std::span<const double> params) const;
  std::size_t calls() const { return calls_; }

 private:
  RunConfig config_;
  spinsys::SpinChainModel model_;
  metrology::PhaseEncoding encoding_;
  metrology::StrataSet strata_;
  metrology::PhaseAverager averager_;
  std::uint64_t sampling_seed_;
  std::size_t calls_ = 0;
};

nmopt::Objective build_objective(const RunConfig& config, std::uint64_t sampling_seed);
nmopt::Objective build_objective(const RunConfig& config);

struct RecordRow {
  int g = 0;
  double delta_gamma = 0.0;
  double fql = 0.0;
  double fq_true = 0.0;        // NaN when not recorded
  double noon_fidelity = 0.0;  // NaN when not recorded
  std::string move;            // "init" for g = 0
  std::size_t evaluations = 0;
  double bloch_delta = 0.0;    // single-qubit runs only
  double bloch_phi = 0.0;
  std::vector<double> params;
};

struct LearningRunRecord {
  RunConfig config;
  int restart = 0;
  std::uint64_t seed = 0;
  bool stalled = false;
  double wall_time_s = 0.0;
  std::vector<RecordRow> rows;
};

/// One optimizer run for restart r, seeded with optimizer.seed + r.
LearningRunRecord run_restart(const RunConfig& config, int restart);

void write_record(const LearningRunRecord& record, const std::filesystem::path& path);
LearningRunRecord read_record(const std::filesystem::path& path);
std::filesystem::path record_path(const RunConfig& config, int restart);

struct SummaryRow {
  int n_qubits = 0;
  std::size_t restarts = 0;
  int best_restart = 0;
  double best_fql = 0.0;
  double best_fq_true = 0.0;
  double fq_ratio = 0.0;  // best_fq_true / N^2
  double best_noon_fidelity = 0.0;
  int iterations_to_95 = 0;
  bool converged = false;  // fq_ratio >= kConvergedRatio
};

inline constexpr double kConvergedRatio = 0.95;

struct Summary {
  std::vector<SummaryRow> rows;  // ascending n_qubits
};

/// Best-of-restarts table per qubit count. Throws ValidationError if empty.
Summary summarize(const std::vector<LearningRunRecord>& records);
nlohmann::json to_json(const Summary& summary);
void write_summary(const Summary& summary, const std::filesystem::path& path);

struct RunFailure {
  int restart = 0;
  std::string message;
};

struct ExperimentOutcome {
  std::vector<LearningRunRecord> records;  // ordered by restart
  std::vector<RunFailure> failures;
  Summary summary;
  bool ok() const { return failures.empty(); }
};

/// Runs every restart (up to `jobs` concurrently), writes one record file
/// per restart and summary.json into config.output_path. A failing restart
/// is logged and skipped.
ExperimentOutcome run_experiment(const RunConfig& config, int jobs = 1);

struct InvariantCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast self-check of the core invariants, for `qloop validate`.
std::vector<InvariantCheck> validate_invariants(std::uint64_t seed = 7);

}  // namespace qloop::harness
