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
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qloop/harness.hpp"

namespace qloop::harness {

namespace {

InvariantCheck check(std::string name, bool passed, double worst) {
  std::ostringstream detail;
  detail << "worst " << worst;
  return {std::move(name), passed, detail.str()};
}

}  // namespace

std::vector<InvariantCheck> validate_invariants(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<InvariantCheck> out;
  constexpr int kDraws = 50;

  {
    double worst = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const int n = 1 + i % 3;
      const auto spec = spinsys::spin_chain_defaults(n);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> p(spec.parameter_count());
      const auto lo = spec.lower_bounds();
      const auto hi = spec.upper_bounds();
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
      const auto c = spinsys::ControlSequence::from_flat(spec, p);
      const auto U = spinsys::sequence_propagator(spec, c);
      const double defect = (U.adjoint() * U - qcore::identity(U.rows())).cwiseAbs().maxCoeff();
      worst = std::max(worst, defect);
    }
    out.push_back(check("propagator_unitary", worst <= 1e-10, worst));
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < kDraws; ++i) {
      const int n = 1 + i % 3;
      const auto probe = qcore::random_pure_state(n, rng);
      const metrology::PhaseEncoding enc{n, 0.0};
      const auto report = metrology::fitness(probe, enc, metrology::gaussian_strata(101, 1e-3));
      const double gap = metrology::qfi_pure(probe, enc) - report.fql;
      worst = std::min(worst, gap);
      ok = ok && gap >= -1e-3 && report.delta_gamma >= -1e-12;
    }
    out.push_back(check("proxy_bounded_by_qfi", ok, worst));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const int n = 1 + i % 2;
      const auto a = qcore::random_mixed_state(n, rng);
      const auto b = qcore::random_pure_state(n, rng);
      const double diff =
          std::abs(swapsim::swap_test_exact(a, b, {}) - qcore::trace_overlap(a, b) / 2.0);
      worst = std::max(worst, diff);
    }
    out.push_back(check("swap_test_matches_overlap", worst <= 1e-10, worst));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const int n = 1 + i % 3;
      const auto probe = qcore::random_pure_state(n, rng);
      const metrology::PhaseEncoding enc{n, 0.0};
      worst = std::max(worst, std::abs(metrology::qfi_pure(probe, enc) -
                                       metrology::qfi_mixed(qcore::QuantumState::mixed(
                                                                probe.density_matrix()),
                                                            enc)));
    }
    out.push_back(check("qfi_pure_matches_mixed", worst <= 1e-8, worst));
  }

  {
    bool ok = true;
    std::size_t logged = 0;
    for (int i = 0; i < 10; ++i) {
      nmopt::OptimizerConfig cfg;
      cfg.seed = seed + static_cast<std::uint64_t>(i);
      cfg.max_iterations = 200;
      cfg.init_lo = -2.0;
      cfg.init_hi = 2.0;
      const auto result = nmopt::run(4, cfg, [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.5) * (v - 0.5);
        return s;
      });
      double prev = result.initial.best_value();
      std::size_t evals = result.initial.vertices.size();
      for (const auto& e : result.events) {
        ok = ok && e.best_value <= prev && e.evaluations_used >= evals;
        prev = e.best_value;
        evals = e.evaluations_used;
        ++logged;
      }
      ok = ok && result.evaluations == evals;
    }
    out.push_back({"optimizer_monotone_best", ok, std::to_string(logged) + " events"});
  }

  return out;
}

}  // namespace qloop::harness
