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
 * Emulation of the SWAP-test purity readout: an ancilla prepared in |+>,
 * a controlled-SWAP of two registers, a Hadamard and an I_z measurement of
 * the ancilla, with dephasing on the ancilla and finite shot counts.
 *
 * Noiseless, the ancilla reads <I_z> = Tr(rho_a rho_b) / 2. The dephasing
 * channel (1-p) rho + 4p I_z rho I_z scales ancilla coherence by (1 - 2p)
 * per application, so the signal is attenuated by (1 - 2p)^applications.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qloop/metrology.hpp"
#include "qloop/qcore.hpp"

namespace qloop::swapsim {

using qcore::QuantumState;

/// Ancilla dephasing. p must lie in [0, 0.5) so the attenuation stays
/// positive and can be divided out.
struct NoiseModel {
  double p = 0.0;
  int applications = 2;

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

/// (1 - 2p)^applications.
double attenuation(const NoiseModel& noise);

/// (1-p) rho + 4p I_z^q rho I_z^q on qubit q (0-based). p in [0, 1).
QuantumState dephase(const QuantumState& state, double p, int qubit);

/// Exact ancilla <I_z> of the noisy SWAP test on (a, b).
double swap_test_exact(const QuantumState& a, const QuantumState& b,
                       const NoiseModel& noise);

struct SwapTestResult {
  double mean_iz = 0.0;      // sample mean of the +-1/2 outcomes
  std::size_t shots = 0;
  double est_overlap = 0.0;  // 2 * mean_iz / attenuation
  double std_err = 0.0;      // of mean_iz
};

/// Draws `shots` ancilla outcomes with P(+1/2) = 1/2 + swap_test_exact.
/// Deterministic for a given seed.
SwapTestResult swap_test_sampled(const QuantumState& a, const QuantumState& b,
                                 const NoiseModel& noise, std::size_t shots,
                                 std::uint64_t seed);

struct PairEstimate {
  std::size_t j = 0;
  std::size_t k = 0;  // j <= k
  SwapTestResult result;
};

struct SampledFitnessReport {
  metrology::FitnessReport report;  // fql is NaN when the strata have dx2 == 0
  SwapTestResult probe_purity;
  std::vector<PairEstimate> pairs;  // K (K + 1) / 2 entries
};

/// Purity loss from SWAP tests: Tr(rho_C^2) from one test on two probe copies
/// and Tr(rho_avg^2) = (1/K^2) sum_j Tr(rho_j^2) + (2/K^2) sum_{j<k}
/// Tr(rho_j rho_k) from one test per pair of encoded copies. Each test uses
/// `shots_per_term` shots and its own seed derived from `seed`.
SampledFitnessReport sampled_fitness(const QuantumState& probe,
                                     const metrology::PhaseEncoding& enc,
                                     const metrology::StrataSet& strata,
                                     const NoiseModel& noise,
                                     std::size_t shots_per_term,
                                     std::uint64_t seed);

/// ceil(4 / (delta (1 - p)^2)).
std::uint64_t repetition_budget(double delta, double p);

}  // namespace qloop::swapsim
