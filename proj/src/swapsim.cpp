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

#include "qloop/swapsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "qloop/errors.hpp"
#include "qloop/seeding.hpp"

namespace qloop::swapsim {

using qcore::ComplexMatrix;

void NoiseModel::validate() const {
  if (!(p >= 0.0 && p < 0.5)) {
    throw ValidationError("noise p must lie in [0, 0.5), got " + std::to_string(p));
  }
  if (applications < 0) {
    throw ValidationError("noise applications must be >= 0");
  }
}

double attenuation(const NoiseModel& noise) {
  noise.validate();
  return std::pow(1.0 - 2.0 * noise.p, noise.applications);
}

QuantumState dephase(const QuantumState& state, double p, int qubit) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ValidationError("dephase: p must lie in [0, 1)");
  }
  const int n = state.n_qubits();
  if (qubit < 0 || qubit >= n) {
    throw ValidationError("dephase: qubit index out of range");
  }
  // I_z rho I_z = rho_ij / 4 when the qubit agrees in i and j, -rho_ij / 4
  // otherwise, so coherent blocks pick up (1 - p) - p = 1 - 2p.
  const int shift = n - 1 - qubit;
  const double factor = 1.0 - 2.0 * p;
  ComplexMatrix rho = state.density_matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      if (((i >> shift) & 1) != ((j >> shift) & 1)) {
        rho(i, j) *= factor;
      }
    }
  }
  return QuantumState::mixed(std::move(rho));
}

double swap_test_exact(const QuantumState& a, const QuantumState& b,
                       const NoiseModel& noise) {
  noise.validate();
  if (a.n_qubits() != b.n_qubits()) {
    throw ValidationError("swap_test: registers differ in size");
  }
  // The controlled-SWAP is block diagonal in the ancilla basis, so ancilla
  // dephasing commutes with it and only rescales the |0><1| block, which
  // carries (rho_a (x) rho_b) SWAP. After the Hadamard,
  // <I_z> = Re(c_01) Tr(rho_a rho_b) with c_01 the ancilla coherence.
  QuantumState ancilla = QuantumState::pure(
      (qcore::ComplexVector(2) << (std::numbers::sqrt2 / 2.0), (std::numbers::sqrt2 / 2.0))
          .finished());
  for (int k = 0; k < noise.applications; ++k) {
    ancilla = dephase(ancilla, noise.p, 0);
  }
  const double coherence = ancilla.density_matrix()(0, 1).real();
  return coherence * qcore::trace_overlap(a, b);
}

SwapTestResult swap_test_sampled(const QuantumState& a, const QuantumState& b,
                                 const NoiseModel& noise, std::size_t shots,
                                 std::uint64_t seed) {
  if (shots < 1) {
    throw ValidationError("swap_test_sampled needs at least one shot");
  }
  const double exact = swap_test_exact(a, b, noise);
  const double p_plus = std::clamp(0.5 + exact, 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> draw(shots, p_plus);
  const auto plus = static_cast<double>(draw(rng));
  const auto n = static_cast<double>(shots);

  SwapTestResult r;
  r.shots = shots;
  r.mean_iz = (plus - 0.5 * n) / n;  // (plus * 1/2 - minus * 1/2) / n
  r.est_overlap = 2.0 * r.mean_iz / attenuation(noise);
  if (shots > 1) {
    const double sample_var = std::max(0.0, (0.25 - r.mean_iz * r.mean_iz) * n / (n - 1.0));
    r.std_err = std::sqrt(sample_var / n);
  } else {
    r.std_err = 0.5;  // one +-1/2 outcome: use the per-shot bound
  }
  return r;
}

SampledFitnessReport sampled_fitness(const QuantumState& probe,
                                     const metrology::PhaseEncoding& enc,
                                     const metrology::StrataSet& strata,
                                     const NoiseModel& noise,
                                     std::size_t shots_per_term,
                                     std::uint64_t seed) {
  noise.validate();
  std::vector<QuantumState> encoded;
  encoded.reserve(strata.size());
  for (double x : strata.points()) {
    encoded.push_back(metrology::encode(probe, enc, x));
  }

  SampledFitnessReport out;
  std::uint64_t stream = 0;
  out.probe_purity =
      swap_test_sampled(probe, probe, noise, shots_per_term, derive_seed(seed, stream++));

  const auto k = static_cast<double>(strata.size());
  double avg_purity = 0.0;
  for (std::size_t j = 0; j < encoded.size(); ++j) {
    for (std::size_t l = j; l < encoded.size(); ++l) {
      PairEstimate e{j, l,
                     swap_test_sampled(encoded[j], encoded[l], noise, shots_per_term,
                                       derive_seed(seed, stream++))};
      avg_purity += (j == l ? 1.0 : 2.0) * e.result.est_overlap / (k * k);
      out.pairs.push_back(e);
    }
  }

  const double probe_purity = out.probe_purity.est_overlap;
  if (strata.dx2() > 0.0) {
    out.report = metrology::make_report(probe_purity, avg_purity, strata.dx2());
  } else {
    out.report.purity_probe = probe_purity;
    out.report.purity_avg = avg_purity;
    out.report.delta_gamma = probe_purity - avg_purity;
    out.report.fql = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::uint64_t repetition_budget(double delta, double p) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("repetition_budget: delta must be positive");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw ValidationError("repetition_budget: p must lie in [0, 1)");
  }
  return static_cast<std::uint64_t>(std::ceil(4.0 / (delta * (1.0 - p) * (1.0 - p))));
}

}  // namespace qloop::swapsim
