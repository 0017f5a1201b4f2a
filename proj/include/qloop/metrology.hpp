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
 * Phase encoding with the collective generator H = sum_i I_z^i, quantum
 * Fisher information, stratified Gaussian phase averaging and the
 * purity-loss fitness F_Q^L = 2 * delta_gamma / dx2.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qloop/qcore.hpp"

namespace qloop::metrology {

using qcore::QuantumState;

/// U_phi = exp(-i phi sum_i I_z^i) on n qubits.
struct PhaseEncoding {
  int n_qubits = 1;
  double phi = 0.0;
};

/// Equal-weight phase offsets approximating a zero-mean distribution.
class StrataSet {
 public:
  explicit StrataSet(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double mean() const;
  /// Bessel-corrected variance sum x_k^2 / (K - 1); zero for a single point.
  double dx2() const { return dx2_; }

 private:
  std::vector<double> points_;
  double dx2_ = 0.0;
};

/// The nine offsets used on the NMR processor; Bessel variance 1.0721.
StrataSet experiment_strata();

/// Conditional means of K equal-probability strata of a zero-mean Gaussian,
/// rescaled so the Bessel-corrected variance is exactly dx2. K odd, K >= 3.
StrataSet gaussian_strata(int k, double dx2);

/// Reports above this dx2 are outside the small-fluctuation regime where
/// F_Q >= F_Q^L is guaranteed; the value is then only a proxy.
inline constexpr double kProxyRegimeDx2 = 0.1;

struct FitnessReport {
  double purity_probe = 0.0;
  double purity_avg = 0.0;
  double delta_gamma = 0.0;
  double fql = 0.0;
  double dx2 = 0.0;
  bool proxy_regime = false;
};

/// Builds a report from the two purities. Throws ValidationError if dx2 <= 0.
FitnessReport make_report(double purity_probe, double purity_avg, double dx2);

/// Sum_i I_z^i eigenvalue of computational basis state `index`.
double collective_z(int n_qubits, std::uint64_t index);

/// U rho U^dagger with U = exp(-i (phi + offset) H).
QuantumState encode(const QuantumState& state, const PhaseEncoding& enc,
                    double offset);

/// Precomputed strata average for one encoding. Because H is diagonal, the
/// averaged state only rescales rho_{b b'} by the characteristic function
/// chi(d) = mean_k exp(-i (phi + x_k) d) of d = h_b - h_b', an integer in
/// [-N, N].
class PhaseAverager {
 public:
  PhaseAverager(const PhaseEncoding& enc, const StrataSet& strata);

  qcore::ComplexMatrix averaged_density(const QuantumState& probe) const;
  /// Tr(rho^2) - Tr(rho_avg^2), accumulated without cancellation.
  double purity_loss(const QuantumState& probe) const;
  FitnessReport fitness(const QuantumState& probe) const;

 private:
  qcore::Complex chi(int d) const { return chi_[static_cast<std::size_t>(d + n_)]; }
  double loss(int d) const { return loss_[static_cast<std::size_t>(d + n_)]; }

  int n_;
  double dx2_;
  std::vector<qcore::Complex> chi_;
  std::vector<double> loss_;  // 1 - |chi(d)|^2
};

/// (1/K) sum_k rho_{phi + x_k}.
QuantumState averaged_state(const QuantumState& probe, const PhaseEncoding& enc,
                            const StrataSet& strata);

/// Purity loss and F_Q^L of the probe. Throws ValidationError if dx2 == 0.
FitnessReport fitness(const QuantumState& probe, const PhaseEncoding& enc,
                      const StrataSet& strata);

/// 4 Var(H) for a pure probe; throws ValidationError for density matrices.
double qfi_pure(const QuantumState& probe, const PhaseEncoding& enc);

/// Spectral QFI 2 sum (l_i - l_j)^2 / (l_i + l_j) |<i|H|j>|^2, skipping pairs
/// with l_i + l_j <= kQfiRegularization.
inline constexpr double kQfiRegularization = 1e-12;
double qfi_mixed(const QuantumState& probe, const PhaseEncoding& enc);

/// (|0...0> + e^{i theta} |1...1>) / sqrt(2).
QuantumState noon_state(int n_qubits, double theta);

struct NoonMatch {
  double best_theta = 0.0;  // in (-pi, pi]
  double fidelity = 0.0;
};

/// Closest NOON state to a pure probe: fidelity (|a_0| + |a_1|) / sqrt(2) at
/// theta = arg(a_1) - arg(a_0), with a_0, a_1 the |0...0>, |1...1> amplitudes.
NoonMatch noon_fidelity(const QuantumState& probe);

}  // namespace qloop::metrology
