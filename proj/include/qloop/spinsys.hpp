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
 * Spin-chain physics: qubit-local angular momentum operators, the
 * nearest-neighbour Ising drift and piecewise-constant control propagators.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qloop/qcore.hpp"

namespace qloop::spinsys {

using qcore::ComplexMatrix;
using qcore::QuantumState;

enum class Axis { X, Y, Z };

struct TimeBounds {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const TimeBounds&) const = default;
};

/// Physical description of the controllable system.
///
/// With drift, each segment m carries per-qubit fields bx, by and a duration
/// dt[m], and evolves under 2*pi*(J sum I_z I_z + sum bx I_x + by I_y).
/// Without drift the segment duration is the fixed `segment_duration` and the
/// generator is field_scale * sum (bx I_x + by I_y); field_scale converts raw
/// amplitudes to angular rate, so field_scale * bx * segment_duration is the
/// rotation angle.
struct SpinSystemSpec {
  int n_qubits = 1;
  double coupling_j = 1.0;
  int segments_m = 1;
  bool has_drift = true;
  double amplitude_bound = 4.0;
  std::optional<TimeBounds> dt_bounds = TimeBounds{0.01, 0.5};
  double segment_duration = 1.0;
  double field_scale = 1.0;

  void validate() const;
  std::size_t parameters_per_segment() const;
  std::size_t parameter_count() const;
  /// Per-coordinate box in flattened parameter order.
  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;

  bool operator==(const SpinSystemSpec&) const = default;
};

/// Chain defaults: J = 1, M = 2N, dt in [0.01, 0.5], |B| <= 4.
SpinSystemSpec spin_chain_defaults(int n_qubits);

/// Single driftless qubit with M = 3 segments of 10 us (T = 30 us) and raw
/// amplitudes in [-1000, 1000]. field_scale is in rad/us per amplitude unit
/// and defaults to pi / (1000 * 10 us): a full-scale segment is a pi rotation.
SpinSystemSpec single_qubit_experiment();

/// Control fields for every segment, one value object per candidate.
///
/// Flattened layout is segment-major: for each segment, bx[0..N), by[0..N)
/// and then dt when the system has drift.
class ControlSequence {
 public:
  /// Throws ValidationError on a size mismatch or out-of-bounds entry.
  static ControlSequence from_flat(const SpinSystemSpec& spec,
                                   std::span<const double> params);

  std::vector<double> flatten() const;

  const SpinSystemSpec& spec() const { return spec_; }
  double bx(int segment, int qubit) const;
  double by(int segment, int qubit) const;
  /// Segment duration; the fixed one for driftless systems.
  double dt(int segment) const;

 private:
  explicit ControlSequence(SpinSystemSpec spec) : spec_(std::move(spec)) {}

  SpinSystemSpec spec_;
  std::vector<double> bx_;  // [segment * N + qubit]
  std::vector<double> by_;
  std::vector<double> dt_;
};

/// sigma_axis / 2 on qubit `qubit` (0-based, leftmost factor is qubit 0).
ComplexMatrix local_operator(int n_qubits, int qubit, Axis axis);

/// 2*pi*J sum_i I_z^{i-1} I_z^i; zero for a single qubit.
ComplexMatrix ising_drift(const SpinSystemSpec& spec);

/// Caches the operator basis of one system so candidates can be evaluated
/// without rebuilding Kronecker products. Immutable after construction.
class SpinChainModel {
 public:
  explicit SpinChainModel(SpinSystemSpec spec);

  const SpinSystemSpec& spec() const { return spec_; }

  /// Hermitian generator G_m such that U_m = exp(-i dt_m G_m).
  ComplexMatrix segment_generator(const ControlSequence& c, int segment) const;
  ComplexMatrix segment_propagator(const ControlSequence& c, int segment) const;
  /// U_M ... U_2 U_1, segment 0 applied first.
  ComplexMatrix sequence_propagator(const ControlSequence& c) const;
  QuantumState prepare_probe(const ControlSequence& c,
                             const QuantumState& initial) const;
  QuantumState prepare_probe(const ControlSequence& c) const;

 private:
  void check_sequence(const ControlSequence& c) const;

  SpinSystemSpec spec_;
  ComplexMatrix drift_;
  std::vector<ComplexMatrix> ix_;
  std::vector<ComplexMatrix> iy_;
};

ComplexMatrix segment_propagator(const SpinSystemSpec& spec,
                                 const ControlSequence& c, int segment);
ComplexMatrix sequence_propagator(const SpinSystemSpec& spec,
                                  const ControlSequence& c);
/// U_C |initial>; `initial` defaults to |0...0>.
QuantumState prepare_probe(const SpinSystemSpec& spec, const ControlSequence& c,
                           const std::optional<QuantumState>& initial = std::nullopt);

}  // namespace qloop::spinsys
