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
 * Nelder-Mead simplex search.
 *
 * Standard moves with configurable factors: reflection through the centroid
 * of the best D vertices, expansion, outside and inside contraction, and a
 * shrink toward the best vertex when contraction fails. The optimizer only
 * compares objective values, so any strictly monotone transform of the
 * objective yields the same trajectory.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qloop::nmopt {

using Point = std::vector<double>;

/// Objective to minimize. Called sequentially from one thread.
using Objective = std::function<double(std::span<const double>)>;

struct OptimizerConfig {
  double alpha = 1.0;         // reflection
  double gamma_exp = 2.0;     // expansion
  double beta = 0.5;          // contraction
  double delta_shrink = 0.5;  // shrinkage
  int max_iterations = 25;
  double init_lo = -1000.0;
  double init_hi = 1000.0;
  std::uint64_t seed = 0;
  /// Stop once the best value improved by less than this over
  /// `stall_window` consecutive iterations.
  std::optional<double> stall_tolerance;
  int stall_window = 10;

  void validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

/// Per-coordinate box. Initial vertices are drawn from it and proposals are
/// clamped into it before evaluation.
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static Bounds uniform(std::size_t dimension, double lo, double hi);
  static Bounds unbounded(std::size_t dimension);
  void validate(std::size_t dimension) const;
  Point clamp(Point x) const;
};

enum class Move { kReflect, kExpand, kContractOutside, kContractInside, kShrink };

std::string_view to_string(Move m);
std::optional<Move> move_from_string(std::string_view s);

/// D + 1 vertices sorted by ascending objective value.
struct Simplex {
  std::vector<Point> vertices;
  std::vector<double> values;

  std::size_t dimension() const { return vertices.empty() ? 0 : vertices.front().size(); }
  const Point& best() const { return vertices.front(); }
  double best_value() const { return values.front(); }
};

struct IterationEvent {
  int iteration = 0;  // 1-based
  Move move = Move::kReflect;
  double best_value = 0.0;
  Point best_vertex;
  std::size_t evaluations_used = 0;  // cumulative, including initialization
};

/// Counts calls and maps NaN to +infinity (with a warning on std::clog).
class EvaluationCounter {
 public:
  explicit EvaluationCounter(Objective f) : f_(std::move(f)) {}
  double operator()(std::span<const double> x);
  std::size_t count() const { return count_; }

 private:
  Objective f_;
  std::size_t count_ = 0;
};

/// Evaluates and stably sorts the given vertices.
Simplex make_simplex(std::vector<Point> vertices, EvaluationCounter& objective);

/// D + 1 vertices drawn uniformly from `bounds`, deterministic in config.seed.
Simplex initialize(std::size_t dimension, const OptimizerConfig& config,
                   EvaluationCounter& objective, const Bounds& bounds);
/// Same, using the box [init_lo, init_hi]^D.
Simplex initialize(std::size_t dimension, const OptimizerConfig& config,
                   EvaluationCounter& objective);

struct StepResult {
  Simplex simplex;
  Move move = Move::kReflect;
};

/// One Nelder-Mead iteration on a sorted simplex.
StepResult step(Simplex simplex, const OptimizerConfig& config,
                EvaluationCounter& objective, const Bounds& bounds);

struct RunResult {
  Point best_vertex;
  double best_value = 0.0;
  Simplex initial;  // the sorted starting simplex
  Simplex final_simplex;
  std::vector<IterationEvent> events;
  bool stalled = false;
  std::size_t evaluations = 0;
};

/// Iterates from `start` until max_iterations or a stall.
RunResult run_from(Simplex start, const OptimizerConfig& config,
                   EvaluationCounter& objective, const Bounds& bounds);

/// Random initialization followed by run_from.
RunResult run(std::size_t dimension, const OptimizerConfig& config,
              const Objective& objective, const Bounds& bounds);
RunResult run(std::size_t dimension, const OptimizerConfig& config,
              const Objective& objective);

}  // namespace qloop::nmopt
