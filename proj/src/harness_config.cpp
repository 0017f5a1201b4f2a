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

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>
#include <tuple>

#include "qloop/errors.hpp"
#include "qloop/harness.hpp"

namespace qloop::harness {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!j.is_object()) {
    throw ValidationError(std::string(where) + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) {
      throw ValidationError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::pair<double, double> read_pair(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ValidationError(std::string(key) + " must be a two-element array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

const char* to_string(FitnessMode m) {
  return m == FitnessMode::kExact ? "exact" : "sampled";
}

}  // namespace

metrology::StrataSet StrataChoice::build() const {
  if (kind == Kind::kExperiment) return metrology::experiment_strata();
  return metrology::gaussian_strata(k, dx2);
}

void RunConfig::validate() const {
  system.validate();
  noise.validate();
  optimizer.validate();
  if (strata.kind == StrataChoice::Kind::kGaussian &&
      (strata.k < 3 || strata.k % 2 == 0 || !(strata.dx2 > 0.0))) {
    throw ValidationError("gaussian strata need odd K >= 3 and dx2 > 0");
  }
  if (fitness_mode == FitnessMode::kSampled && shots_per_term < 1) {
    throw ValidationError("sampled fitness needs shots_per_term >= 1");
  }
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  if (record_stride < 1) throw ValidationError("record_stride must be >= 1");
  if (optimizer.init_hi < -system.amplitude_bound ||
      optimizer.init_lo > system.amplitude_bound) {
    throw ValidationError("optimizer init_range does not overlap the amplitude bound");
  }
}

json to_json(const RunConfig& c) {
  json system = {
      {"n_qubits", c.system.n_qubits},
      {"coupling_J", c.system.coupling_j},
      {"segments_M", c.system.segments_m},
      {"has_drift", c.system.has_drift},
      {"amplitude_bound", c.system.amplitude_bound},
      {"segment_duration", c.system.segment_duration},
      {"field_scale", c.system.field_scale},
  };
  system["dt_bounds"] = c.system.dt_bounds
                            ? json::array({c.system.dt_bounds->min, c.system.dt_bounds->max})
                            : json(nullptr);
  json strata = c.strata.kind == StrataChoice::Kind::kExperiment
                    ? json{{"kind", "experiment"}}
                    : json{{"kind", "gaussian"}, {"K", c.strata.k}, {"dx2", c.strata.dx2}};
  json optimizer = {
      {"alpha", c.optimizer.alpha},
      {"gamma_exp", c.optimizer.gamma_exp},
      {"beta", c.optimizer.beta},
      {"delta_shrink", c.optimizer.delta_shrink},
      {"max_iterations", c.optimizer.max_iterations},
      {"init_range", json::array({c.optimizer.init_lo, c.optimizer.init_hi})},
      {"seed", c.optimizer.seed},
      {"stall_window", c.optimizer.stall_window},
  };
  optimizer["stall_tolerance"] =
      c.optimizer.stall_tolerance ? json(*c.optimizer.stall_tolerance) : json(nullptr);
  return json{
      {"system", system},
      {"fitness_mode", to_string(c.fitness_mode)},
      {"strata", strata},
      {"noise", {{"p", c.noise.p}, {"applications", c.noise.applications}}},
      {"shots_per_term", c.shots_per_term},
      {"optimizer", optimizer},
      {"restarts", c.restarts},
      {"output_path", c.output_path},
      {"record_true_qfi", c.record_true_qfi},
      {"record_noon_fidelity", c.record_noon_fidelity},
      {"record_stride", c.record_stride},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    check_keys(j,
               {"system", "fitness_mode", "strata", "noise", "shots_per_term", "optimizer",
                "restarts", "output_path", "record_true_qfi", "record_noon_fidelity",
                "record_stride"},
               "config");
    if (j.contains("system")) {
      const json& s = j.at("system");
      check_keys(s,
                 {"n_qubits", "coupling_J", "segments_M", "has_drift", "amplitude_bound",
                  "dt_bounds", "segment_duration", "field_scale"},
                 "system");
      read(s, "n_qubits", c.system.n_qubits);
      read(s, "coupling_J", c.system.coupling_j);
      read(s, "segments_M", c.system.segments_m);
      read(s, "has_drift", c.system.has_drift);
      read(s, "amplitude_bound", c.system.amplitude_bound);
      read(s, "segment_duration", c.system.segment_duration);
      read(s, "field_scale", c.system.field_scale);
      if (s.contains("dt_bounds")) {
        if (s.at("dt_bounds").is_null()) {
          c.system.dt_bounds.reset();
        } else {
          auto [lo, hi] = read_pair(s, "dt_bounds");
          c.system.dt_bounds = spinsys::TimeBounds{lo, hi};
        }
      }
    }
    if (j.contains("fitness_mode")) {
      const auto mode = j.at("fitness_mode").get<std::string>();
      if (mode == "exact") {
        c.fitness_mode = FitnessMode::kExact;
      } else if (mode == "sampled") {
        c.fitness_mode = FitnessMode::kSampled;
      } else {
        throw ValidationError("fitness_mode must be 'exact' or 'sampled'");
      }
    }
    if (j.contains("strata")) {
      const json& s = j.at("strata");
      check_keys(s, {"kind", "K", "dx2"}, "strata");
      const auto kind = s.at("kind").get<std::string>();
      if (kind == "experiment") {
        if (s.contains("K") || s.contains("dx2")) {
          throw ValidationError("experiment strata take no K or dx2");
        }
        c.strata.kind = StrataChoice::Kind::kExperiment;
      } else if (kind == "gaussian") {
        c.strata.kind = StrataChoice::Kind::kGaussian;
        read(s, "K", c.strata.k);
        read(s, "dx2", c.strata.dx2);
      } else {
        throw ValidationError("strata kind must be 'experiment' or 'gaussian'");
      }
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      check_keys(n, {"p", "applications"}, "noise");
      read(n, "p", c.noise.p);
      read(n, "applications", c.noise.applications);
    }
    read(j, "shots_per_term", c.shots_per_term);
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      check_keys(o,
                 {"alpha", "gamma_exp", "beta", "delta_shrink", "max_iterations", "init_range",
                  "seed", "stall_tolerance", "stall_window"},
                 "optimizer");
      read(o, "alpha", c.optimizer.alpha);
      read(o, "gamma_exp", c.optimizer.gamma_exp);
      read(o, "beta", c.optimizer.beta);
      read(o, "delta_shrink", c.optimizer.delta_shrink);
      read(o, "max_iterations", c.optimizer.max_iterations);
      read(o, "seed", c.optimizer.seed);
      read(o, "stall_window", c.optimizer.stall_window);
      if (o.contains("init_range")) {
        std::tie(c.optimizer.init_lo, c.optimizer.init_hi) = read_pair(o, "init_range");
      }
      if (o.contains("stall_tolerance") && !o.at("stall_tolerance").is_null()) {
        c.optimizer.stall_tolerance = o.at("stall_tolerance").get<double>();
      }
    }
    read(j, "restarts", c.restarts);
    read(j, "output_path", c.output_path);
    read(j, "record_true_qfi", c.record_true_qfi);
    read(j, "record_noon_fidelity", c.record_noon_fidelity);
    read(j, "record_stride", c.record_stride);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

RunConfig fig3_preset() {
  RunConfig c;
  c.system = spinsys::single_qubit_experiment();
  c.fitness_mode = FitnessMode::kExact;
  c.strata.kind = StrataChoice::Kind::kExperiment;
  c.optimizer.max_iterations = 25;
  c.optimizer.init_lo = -1000.0;
  c.optimizer.init_hi = 1000.0;
  c.optimizer.seed = 2020;
  c.restarts = 5;
  c.output_path = "runs/fig3";
  c.record_stride = 1;
  return c;
}

RunConfig fig2_preset(int n_qubits) {
  RunConfig c;
  c.system = spinsys::spin_chain_defaults(n_qubits);
  c.fitness_mode = FitnessMode::kExact;
  c.strata = StrataChoice{StrataChoice::Kind::kGaussian, 1001, 1e-3};
  c.optimizer.max_iterations = 10000 * n_qubits;
  c.optimizer.init_lo = -c.system.amplitude_bound;
  c.optimizer.init_hi = c.system.amplitude_bound;
  c.optimizer.seed = 1;
  c.optimizer.stall_tolerance = 1e-12;
  c.optimizer.stall_window = 2000;
  c.restarts = 5;
  c.output_path = "runs/fig2/n" + std::to_string(n_qubits);
  c.record_stride = 100;
  return c;
}

nmopt::Bounds parameter_bounds(const RunConfig& config) {
  const auto& s = config.system;
  nmopt::Bounds b{s.lower_bounds(), s.upper_bounds()};
  const std::size_t per_segment = s.parameters_per_segment();
  for (std::size_t i = 0; i < b.lower.size(); ++i) {
    const bool is_duration = s.has_drift && (i % per_segment) == per_segment - 1;
    if (!is_duration) {
      b.lower[i] = std::max(b.lower[i], config.optimizer.init_lo);
      b.upper[i] = std::min(b.upper[i], config.optimizer.init_hi);
    }
  }
  return b;
}

}  // namespace qloop::harness
