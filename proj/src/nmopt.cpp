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

#include "qloop/nmopt.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "qloop/errors.hpp"

namespace qloop::nmopt {

void OptimizerConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(gamma_exp > 1.0)) throw ValidationError("gamma_exp must be > 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!(delta_shrink > 0.0 && delta_shrink < 1.0)) {
    throw ValidationError("delta_shrink must lie in (0, 1)");
  }
  if (max_iterations < 0) throw ValidationError("max_iterations must be >= 0");
  if (!(init_lo <= init_hi) || !std::isfinite(init_lo) || !std::isfinite(init_hi)) {
    throw ValidationError("init_range must be finite with lo <= hi");
  }
  if (stall_tolerance && !(*stall_tolerance >= 0.0)) {
    throw ValidationError("stall_tolerance must be >= 0");
  }
  if (stall_window < 1) throw ValidationError("stall_window must be >= 1");
}

Bounds Bounds::uniform(std::size_t dimension, double lo, double hi) {
  return Bounds{std::vector<double>(dimension, lo), std::vector<double>(dimension, hi)};
}

Bounds Bounds::unbounded(std::size_t dimension) {
  const double inf = std::numeric_limits<double>::infinity();
  return uniform(dimension, -inf, inf);
}

void Bounds::validate(std::size_t dimension) const {
  if (lower.size() != dimension || upper.size() != dimension) {
    throw ValidationError("bounds have the wrong dimension");
  }
  for (std::size_t i = 0; i < dimension; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw ValidationError("bounds must satisfy lower <= upper");
    }
  }
}

Point Bounds::clamp(Point x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lower[i], upper[i]);
  }
  return x;
}

std::string_view to_string(Move m) {
  switch (m) {
    case Move::kReflect: return "reflect";
    case Move::kExpand: return "expand";
    case Move::kContractOutside: return "contract_outside";
    case Move::kContractInside: return "contract_inside";
    case Move::kShrink: return "shrink";
  }
  return "unknown";
}

std::optional<Move> move_from_string(std::string_view s) {
  for (Move m : {Move::kReflect, Move::kExpand, Move::kContractOutside,
                 Move::kContractInside, Move::kShrink}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

double EvaluationCounter::operator()(std::span<const double> x) {
  ++count_;
  const double v = f_(x);
  if (std::isnan(v)) {
    std::clog << "warning: objective returned NaN at evaluation " << count_
              << "; treating it as +inf\n";
    return std::numeric_limits<double>::infinity();
  }
  return v;
}

namespace {

void sort_simplex(Simplex& s) {
  std::vector<std::size_t> order(s.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
  Simplex sorted;
  sorted.vertices.reserve(order.size());
  sorted.values.reserve(order.size());
  for (std::size_t i : order) {
    sorted.vertices.push_back(std::move(s.vertices[i]));
    sorted.values.push_back(s.values[i]);
  }
  s = std::move(sorted);
}

// centroid + t * (centroid - worst)
Point along(const Point& centroid, const Point& worst, double t) {
  Point x(centroid.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = centroid[i] + t * (centroid[i] - worst[i]);
  }
  return x;
}

}  // namespace

Simplex make_simplex(std::vector<Point> vertices, EvaluationCounter& objective) {
  if (vertices.size() < 2) {
    throw ValidationError("a simplex needs at least two vertices");
  }
  const std::size_t d = vertices.front().size();
  if (vertices.size() != d + 1) {
    throw ValidationError("a simplex in " + std::to_string(d) + " dimensions needs " +
                          std::to_string(d + 1) + " vertices");
  }
  Simplex s;
  for (auto& v : vertices) {
    if (v.size() != d) throw ValidationError("simplex vertices differ in dimension");
    s.values.push_back(objective(v));
    s.vertices.push_back(std::move(v));
  }
  sort_simplex(s);
  return s;
}

Simplex initialize(std::size_t dimension, const OptimizerConfig& config,
                   EvaluationCounter& objective, const Bounds& bounds) {
  config.validate();
  if (dimension < 1) throw ValidationError("dimension must be >= 1");
  bounds.validate(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    if (!std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i])) {
      throw ValidationError("random initialization needs finite bounds");
    }
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> vertices(dimension + 1, Point(dimension));
  for (auto& v : vertices) {
    for (std::size_t i = 0; i < dimension; ++i) {
      v[i] = bounds.lower[i] + (bounds.upper[i] - bounds.lower[i]) * unit(rng);
    }
  }
  return make_simplex(std::move(vertices), objective);
}

Simplex initialize(std::size_t dimension, const OptimizerConfig& config,
                   EvaluationCounter& objective) {
  return initialize(dimension, config, objective,
                    Bounds::uniform(dimension, config.init_lo, config.init_hi));
}

StepResult step(Simplex s, const OptimizerConfig& config, EvaluationCounter& objective,
                const Bounds& bounds) {
  const std::size_t d = s.dimension();
  if (d < 1 || s.vertices.size() != d + 1 || s.values.size() != d + 1) {
    throw ValidationError("step needs a simplex with D + 1 evaluated vertices");
  }
  Point centroid(d, 0.0);
  for (std::size_t v = 0; v < d; ++v) {
    for (std::size_t i = 0; i < d; ++i) centroid[i] += s.vertices[v][i];
  }
  for (double& c : centroid) c /= static_cast<double>(d);

  const Point& worst = s.vertices[d];
  const double f_best = s.values[0];
  const double f_second_worst = s.values[d - 1];
  const double f_worst = s.values[d];

  auto replace_worst = [&](Point x, double f, Move m) {
    s.vertices[d] = std::move(x);
    s.values[d] = f;
    sort_simplex(s);
    return StepResult{std::move(s), m};
  };

  Point reflected = bounds.clamp(along(centroid, worst, config.alpha));
  const double f_reflected = objective(reflected);

  if (f_reflected < f_best) {
    Point expanded = bounds.clamp(along(centroid, worst, config.gamma_exp * config.alpha));
    const double f_expanded = objective(expanded);
    if (f_expanded < f_reflected) {
      return replace_worst(std::move(expanded), f_expanded, Move::kExpand);
    }
    return replace_worst(std::move(reflected), f_reflected, Move::kReflect);
  }
  if (f_reflected < f_second_worst) {
    return replace_worst(std::move(reflected), f_reflected, Move::kReflect);
  }
  if (f_reflected < f_worst) {
    Point contracted = bounds.clamp(along(centroid, worst, config.beta * config.alpha));
    const double f_contracted = objective(contracted);
    if (f_contracted <= f_reflected) {
      return replace_worst(std::move(contracted), f_contracted, Move::kContractOutside);
    }
  } else {
    Point contracted = bounds.clamp(along(centroid, worst, -config.beta * config.alpha));
    const double f_contracted = objective(contracted);
    if (f_contracted < f_worst) {
      return replace_worst(std::move(contracted), f_contracted, Move::kContractInside);
    }
  }

  const Point& best = s.vertices[0];
  for (std::size_t v = 1; v <= d; ++v) {
    for (std::size_t i = 0; i < d; ++i) {
      s.vertices[v][i] = best[i] + config.delta_shrink * (s.vertices[v][i] - best[i]);
    }
    s.values[v] = objective(s.vertices[v]);
  }
  sort_simplex(s);
  return StepResult{std::move(s), Move::kShrink};
}

RunResult run_from(Simplex start, const OptimizerConfig& config,
                   EvaluationCounter& objective, const Bounds& bounds) {
  config.validate();
  bounds.validate(start.dimension());
  RunResult result;
  result.initial = start;
  Simplex current = std::move(start);
  std::vector<double> best_history{current.best_value()};

  for (int g = 1; g <= config.max_iterations; ++g) {
    StepResult r = step(std::move(current), config, objective, bounds);
    current = std::move(r.simplex);
    result.events.push_back(IterationEvent{g, r.move, current.best_value(), current.best(),
                                           objective.count()});
    best_history.push_back(current.best_value());
    if (config.stall_tolerance && g >= config.stall_window) {
      const double earlier = best_history[static_cast<std::size_t>(g - config.stall_window)];
      if (earlier - current.best_value() < *config.stall_tolerance) {
        result.stalled = true;
        break;
      }
    }
  }
  result.best_vertex = current.best();
  result.best_value = current.best_value();
  result.final_simplex = std::move(current);
  result.evaluations = objective.count();
  return result;
}

RunResult run(std::size_t dimension, const OptimizerConfig& config,
              const Objective& objective, const Bounds& bounds) {
  EvaluationCounter counter(objective);
  Simplex start = initialize(dimension, config, counter, bounds);
  return run_from(std::move(start), config, counter, bounds);
}

RunResult run(std::size_t dimension, const OptimizerConfig& config,
              const Objective& objective) {
  return run(dimension, config, objective,
             Bounds::uniform(dimension, config.init_lo, config.init_hi));
}

}  // namespace qloop::nmopt
