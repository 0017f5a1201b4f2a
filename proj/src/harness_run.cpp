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
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qloop/errors.hpp"
#include "qloop/harness.hpp"
#include "qloop/seeding.hpp"

namespace qloop::harness {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kRecordMagic = "# qloop learning record v1";

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("record " + path.string() + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ProbeObjective::ProbeObjective(const RunConfig& config, std::uint64_t sampling_seed)
    : config_(config),
      model_(config.system),
      encoding_{config.system.n_qubits, 0.0},
      strata_(config.strata.build()),
      averager_(encoding_, strata_),
      sampling_seed_(sampling_seed) {
  config_.validate();
}

qcore::QuantumState ProbeObjective::probe(std::span<const double> params) const {
  return model_.prepare_probe(spinsys::ControlSequence::from_flat(config_.system, params));
}

metrology::FitnessReport ProbeObjective::exact_fitness(std::span<const double> params) const {
  return averager_.fitness(probe(params));
}

double ProbeObjective::operator()(std::span<const double> params) {
  const std::size_t call = calls_++;
  const qcore::QuantumState state = probe(params);
  if (config_.fitness_mode == FitnessMode::kExact) {
    return 1.0 - averager_.purity_loss(state);
  }
  const auto sampled =
      swapsim::sampled_fitness(state, encoding_, strata_, config_.noise,
                               config_.shots_per_term, derive_seed(sampling_seed_, call));
  return 1.0 - sampled.report.delta_gamma;
}

nmopt::Objective build_objective(const RunConfig& config, std::uint64_t sampling_seed) {
  auto objective = std::make_shared<ProbeObjective>(config, sampling_seed);
  return [objective](std::span<const double> params) { return (*objective)(params); };
}

nmopt::Objective build_objective(const RunConfig& config) {
  return build_objective(config, derive_seed(config.optimizer.seed, 0));
}

LearningRunRecord run_restart(const RunConfig& config, int restart) {
  config.validate();
  const auto start_time = std::chrono::steady_clock::now();

  LearningRunRecord record;
  record.config = config;
  record.restart = restart;
  record.seed = config.optimizer.seed + static_cast<std::uint64_t>(restart);

  nmopt::OptimizerConfig opt = config.optimizer;
  opt.seed = record.seed;
  auto objective = std::make_shared<ProbeObjective>(config, derive_seed(record.seed, 0));
  const nmopt::Objective f = [objective](std::span<const double> p) {
    return (*objective)(p);
  };
  const nmopt::RunResult result =
      nmopt::run(config.system.parameter_count(), opt, f, parameter_bounds(config));

  const double dx2 = config.strata.build().dx2();
  const metrology::PhaseEncoding enc{config.system.n_qubits, 0.0};
  const bool single_qubit = config.system.n_qubits == 1;

  std::vector<double> cached_params;
  RecordRow cached;
  auto make_row = [&](int g, double best_value, const std::vector<double>& params,
                      std::string move, std::size_t evaluations) {
    RecordRow row;
    row.g = g;
    row.delta_gamma = 1.0 - best_value;
    row.fql = 2.0 * row.delta_gamma / dx2;
    row.move = std::move(move);
    row.evaluations = evaluations;
    row.params = params;
    if (params == cached_params) {
      row.fq_true = cached.fq_true;
      row.noon_fidelity = cached.noon_fidelity;
      row.bloch_delta = cached.bloch_delta;
      row.bloch_phi = cached.bloch_phi;
      return row;
    }
    const qcore::QuantumState probe = objective->probe(params);
    row.fq_true = config.record_true_qfi ? metrology::qfi_pure(probe, enc) : kNaN;
    row.noon_fidelity =
        config.record_noon_fidelity ? metrology::noon_fidelity(probe).fidelity : kNaN;
    if (single_qubit) {
      const auto& a = probe.amplitudes();
      row.bloch_delta = 2.0 * std::atan2(std::abs(a(1)), std::abs(a(0)));
      row.bloch_phi = std::remainder(std::arg(a(1)) - std::arg(a(0)), 2.0 * std::numbers::pi);
    }
    cached_params = params;
    cached = row;
    return row;
  };

  record.rows.push_back(make_row(0, result.initial.best_value(), result.initial.best(), "init",
                                 result.initial.vertices.size()));
  for (std::size_t i = 0; i < result.events.size(); ++i) {
    const auto& e = result.events[i];
    const bool last = i + 1 == result.events.size();
    if (e.iteration % config.record_stride == 0 || last) {
      record.rows.push_back(make_row(e.iteration, e.best_value, e.best_vertex,
                                     std::string(nmopt::to_string(e.move)),
                                     e.evaluations_used));
    }
  }
  record.stalled = result.stalled;
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return record;
}

std::filesystem::path record_path(const RunConfig& config, int restart) {
  return std::filesystem::path(config.output_path) /
         ("n" + std::to_string(config.system.n_qubits) + "_restart" +
          std::to_string(restart) + ".csv");
}

void write_record(const LearningRunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write record " + path.string());
  const bool bloch = record.config.system.n_qubits == 1;
  out << kRecordMagic << '\n';
  out << "# config " << to_json(record.config).dump() << '\n';
  out << "# restart " << record.restart << '\n';
  out << "# seed " << record.seed << '\n';
  out << "# stalled " << (record.stalled ? 1 : 0) << '\n';
  out << "# wall_time_s " << format_double(record.wall_time_s) << '\n';
  out << "g,delta_gamma,fql,fq_true,noon_fidelity,move,evaluations";
  if (bloch) out << ",bloch_delta,bloch_phi";
  for (std::size_t i = 0; i < record.config.system.parameter_count(); ++i) out << ",p" << i;
  out << '\n';
  for (const auto& r : record.rows) {
    out << r.g << ',' << format_double(r.delta_gamma) << ',' << format_double(r.fql) << ','
        << format_double(r.fq_true) << ',' << format_double(r.noon_fidelity) << ',' << r.move
        << ',' << r.evaluations;
    if (bloch) out << ',' << format_double(r.bloch_delta) << ',' << format_double(r.bloch_phi);
    for (double p : r.params) out << ',' << format_double(p);
    out << '\n';
  }
  if (!out) throw IoError("failed while writing record " + path.string());
}

LearningRunRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record " + path.string());
  LearningRunRecord record;
  std::string line;
  if (!std::getline(in, line) || line != kRecordMagic) {
    throw IoError("record " + path.string() + ": missing header");
  }
  auto header_value = [&](std::string_view key) {
    if (!std::getline(in, line)) throw IoError("record " + path.string() + ": truncated header");
    const std::string prefix = "# " + std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) {
      throw IoError("record " + path.string() + ": expected '" + std::string(key) + "'");
    }
    return line.substr(prefix.size());
  };
  try {
    record.config = config_from_json(json::parse(header_value("config")));
  } catch (const json::exception& e) {
    throw IoError("record " + path.string() + ": bad config: " + e.what());
  }
  record.restart = std::stoi(header_value("restart"));
  record.seed = std::stoull(header_value("seed"));
  record.stalled = header_value("stalled") == "1";
  record.wall_time_s = parse_double(header_value("wall_time_s"), path);

  if (!std::getline(in, line)) throw IoError("record " + path.string() + ": no column header");
  const auto columns = split(line, ',');
  const bool bloch = columns.size() > 7 && columns[7] == "bloch_delta";
  const std::size_t first_param = bloch ? 9 : 7;
  const std::size_t n_params = record.config.system.parameter_count();
  if (columns.size() != first_param + n_params) {
    throw IoError("record " + path.string() + ": column count does not match the config");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != columns.size()) {
      throw IoError("record " + path.string() + ": ragged row");
    }
    RecordRow r;
    r.g = static_cast<int>(parse_double(f[0], path));
    r.delta_gamma = parse_double(f[1], path);
    r.fql = parse_double(f[2], path);
    r.fq_true = parse_double(f[3], path);
    r.noon_fidelity = parse_double(f[4], path);
    r.move = std::string(f[5]);
    r.evaluations = static_cast<std::size_t>(parse_double(f[6], path));
    if (bloch) {
      r.bloch_delta = parse_double(f[7], path);
      r.bloch_phi = parse_double(f[8], path);
    }
    for (std::size_t i = first_param; i < f.size(); ++i) r.params.push_back(parse_double(f[i], path));
    record.rows.push_back(std::move(r));
  }
  return record;
}

Summary summarize(const std::vector<LearningRunRecord>& records) {
  if (records.empty()) throw ValidationError("summarize needs at least one record");
  std::map<int, std::vector<const LearningRunRecord*>> by_n;
  for (const auto& r : records) {
    if (r.rows.empty()) throw ValidationError("record for restart " + std::to_string(r.restart) + " has no rows");
    by_n[r.config.system.n_qubits].push_back(&r);
  }
  auto nan_max = [](double a, double b) {
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::max(a, b);
  };
  Summary summary;
  for (const auto& [n, group] : by_n) {
    SummaryRow row;
    row.n_qubits = n;
    row.restarts = group.size();
    row.best_fql = -std::numeric_limits<double>::infinity();
    row.best_fq_true = kNaN;
    row.best_noon_fidelity = kNaN;
    const LearningRunRecord* best = nullptr;
    for (const auto* r : group) {
      const RecordRow& last = r->rows.back();
      if (last.fql > row.best_fql) {
        row.best_fql = last.fql;
        best = r;
      }
      row.best_fq_true = nan_max(row.best_fq_true, last.fq_true);
      row.best_noon_fidelity = nan_max(row.best_noon_fidelity, last.noon_fidelity);
    }
    row.best_restart = best->restart;
    const double n2 = static_cast<double>(n) * n;
    row.fq_ratio = (std::isnan(row.best_fq_true) ? row.best_fql : row.best_fq_true) / n2;
    const double final_gamma = best->rows.back().delta_gamma;
    for (const auto& r : best->rows) {
      if (r.delta_gamma >= 0.95 * final_gamma) {
        row.iterations_to_95 = r.g;
        break;
      }
    }
    row.converged = row.fq_ratio >= kConvergedRatio;
    summary.rows.push_back(row);
  }
  return summary;
}

json to_json(const Summary& summary) {
  json rows = json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"n_qubits", r.n_qubits},
                    {"restarts", r.restarts},
                    {"best_restart", r.best_restart},
                    {"best_fql", r.best_fql},
                    {"best_fq_true", r.best_fq_true},
                    {"fq_ratio", r.fq_ratio},
                    {"best_noon_fidelity", r.best_noon_fidelity},
                    {"iterations_to_95", r.iterations_to_95},
                    {"converged", r.converged}});
  }
  return json{{"rows", rows}};
}

void write_summary(const Summary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write summary " + path.string());
  out << to_json(summary).dump(2) << '\n';
  if (!out) throw IoError("failed while writing summary " + path.string());
}

ExperimentOutcome run_experiment(const RunConfig& config, int jobs) {
  config.validate();
  const std::filesystem::path dir(config.output_path);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::optional<LearningRunRecord>> slots(static_cast<std::size_t>(config.restarts));
  std::vector<RunFailure> failures;
  std::mutex mu;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < config.restarts; r = next++) {
      try {
        LearningRunRecord rec = run_restart(config, r);
        write_record(rec, record_path(config, r));
        slots[static_cast<std::size_t>(r)] = std::move(rec);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        std::clog << "restart " << r << " failed: " << e.what() << '\n';
        failures.push_back({r, e.what()});
      }
    }
  };
  const int threads = std::clamp(jobs, 1, config.restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentOutcome outcome;
  for (auto& s : slots) {
    if (s) outcome.records.push_back(std::move(*s));
  }
  std::sort(failures.begin(), failures.end(),
            [](const RunFailure& a, const RunFailure& b) { return a.restart < b.restart; });
  outcome.failures = std::move(failures);
  if (!outcome.records.empty()) {
    outcome.summary = summarize(outcome.records);
    write_summary(outcome.summary, dir / "summary.json");
  }
  return outcome;
}

}  // namespace qloop::harness
