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

#include "qloop/spinsys.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qloop/errors.hpp"

namespace qloop::spinsys {

using qcore::Complex;
using qcore::ComplexVector;

void SpinSystemSpec::validate() const {
  if (n_qubits < 1 || n_qubits > 10) {
    throw ValidationError("n_qubits must be in [1, 10]");
  }
  if (segments_m < 1) {
    throw ValidationError("segments_m must be >= 1");
  }
  if (!(amplitude_bound > 0.0) || !std::isfinite(amplitude_bound)) {
    throw ValidationError("amplitude_bound must be positive");
  }
  if (!std::isfinite(coupling_j)) {
    throw ValidationError("coupling_j must be finite");
  }
  if (has_drift) {
    if (!dt_bounds) {
      throw ValidationError("dt_bounds are required when the system has drift");
    }
    if (!(dt_bounds->min > 0.0) || !(dt_bounds->max >= dt_bounds->min) ||
        !std::isfinite(dt_bounds->max)) {
      throw ValidationError("dt_bounds must satisfy 0 < min <= max");
    }
  } else {
    if (!(segment_duration > 0.0) || !(field_scale > 0.0)) {
      throw ValidationError("driftless systems need positive segment_duration and field_scale");
    }
  }
}

std::size_t SpinSystemSpec::parameters_per_segment() const {
  return 2 * static_cast<std::size_t>(n_qubits) + (has_drift ? 1 : 0);
}

std::size_t SpinSystemSpec::parameter_count() const {
  return static_cast<std::size_t>(segments_m) * parameters_per_segment();
}

std::vector<double> SpinSystemSpec::lower_bounds() const {
  std::vector<double> lo;
  lo.reserve(parameter_count());
  for (int m = 0; m < segments_m; ++m) {
    lo.insert(lo.end(), 2 * static_cast<std::size_t>(n_qubits), -amplitude_bound);
    if (has_drift) {
      lo.push_back(dt_bounds->min);
    }
  }
  return lo;
}

std::vector<double> SpinSystemSpec::upper_bounds() const {
  std::vector<double> hi;
  hi.reserve(parameter_count());
  for (int m = 0; m < segments_m; ++m) {
    hi.insert(hi.end(), 2 * static_cast<std::size_t>(n_qubits), amplitude_bound);
    if (has_drift) {
      hi.push_back(dt_bounds->max);
    }
  }
  return hi;
}

SpinSystemSpec spin_chain_defaults(int n_qubits) {
  SpinSystemSpec spec;
  spec.n_qubits = n_qubits;
  spec.coupling_j = 1.0;
  spec.segments_m = 2 * n_qubits;
  spec.has_drift = true;
  spec.amplitude_bound = 4.0;
  spec.dt_bounds = TimeBounds{0.01, 0.5};
  spec.validate();
  return spec;
}

SpinSystemSpec single_qubit_experiment() {
  SpinSystemSpec spec;
  spec.n_qubits = 1;
  spec.coupling_j = 0.0;
  spec.segments_m = 3;
  spec.has_drift = false;
  spec.amplitude_bound = 1000.0;
  spec.dt_bounds = std::nullopt;
  spec.segment_duration = 30.0 / 3;  // us
  spec.field_scale = std::numbers::pi / (1000.0 * spec.segment_duration);
  spec.validate();
  return spec;
}

ControlSequence ControlSequence::from_flat(const SpinSystemSpec& spec,
                                           std::span<const double> params) {
  spec.validate();
  if (params.size() != spec.parameter_count()) {
    throw ValidationError("control vector has " + std::to_string(params.size()) +
                          " entries, expected " +
                          std::to_string(spec.parameter_count()));
  }
  ControlSequence c(spec);
  const auto n = static_cast<std::size_t>(spec.n_qubits);
  const auto m_count = static_cast<std::size_t>(spec.segments_m);
  c.bx_.resize(n * m_count);
  c.by_.resize(n * m_count);
  auto it = params.begin();
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t i = 0; i < n; ++i) c.bx_[m * n + i] = *it++;
    for (std::size_t i = 0; i < n; ++i) c.by_[m * n + i] = *it++;
    if (spec.has_drift) c.dt_.push_back(*it++);
  }
  for (double b : c.bx_) {
    if (!(std::abs(b) <= spec.amplitude_bound)) {
      throw ValidationError("bx amplitude " + std::to_string(b) + " out of bounds");
    }
  }
  for (double b : c.by_) {
    if (!(std::abs(b) <= spec.amplitude_bound)) {
      throw ValidationError("by amplitude " + std::to_string(b) + " out of bounds");
    }
  }
  for (double t : c.dt_) {
    if (!(t >= spec.dt_bounds->min && t <= spec.dt_bounds->max)) {
      throw ValidationError("dt " + std::to_string(t) + " out of bounds");
    }
  }
  return c;
}

std::vector<double> ControlSequence::flatten() const {
  std::vector<double> out;
  out.reserve(spec_.parameter_count());
  const auto n = static_cast<std::size_t>(spec_.n_qubits);
  for (std::size_t m = 0; m < static_cast<std::size_t>(spec_.segments_m); ++m) {
    out.insert(out.end(), bx_.begin() + m * n, bx_.begin() + (m + 1) * n);
    out.insert(out.end(), by_.begin() + m * n, by_.begin() + (m + 1) * n);
    if (spec_.has_drift) out.push_back(dt_[m]);
  }
  return out;
}

double ControlSequence::bx(int segment, int qubit) const {
  return bx_.at(static_cast<std::size_t>(segment * spec_.n_qubits + qubit));
}

double ControlSequence::by(int segment, int qubit) const {
  return by_.at(static_cast<std::size_t>(segment * spec_.n_qubits + qubit));
}

double ControlSequence::dt(int segment) const {
  if (!spec_.has_drift) {
    if (segment < 0 || segment >= spec_.segments_m) {
      throw ValidationError("segment index out of range");
    }
    return spec_.segment_duration;
  }
  return dt_.at(static_cast<std::size_t>(segment));
}

ComplexMatrix local_operator(int n_qubits, int qubit, Axis axis) {
  if (n_qubits < 1 || qubit < 0 || qubit >= n_qubits) {
    throw ValidationError("local_operator: qubit " + std::to_string(qubit) +
                          " out of range for " + std::to_string(n_qubits) + " qubits");
  }
  ComplexMatrix single(2, 2);
  switch (axis) {
    case Axis::X:
      single << 0.0, 0.5, 0.5, 0.0;
      break;
    case Axis::Y:
      single << 0.0, Complex(0.0, -0.5), Complex(0.0, 0.5), 0.0;
      break;
    case Axis::Z:
      single << 0.5, 0.0, 0.0, -0.5;
      break;
  }
  const Eigen::Index left = Eigen::Index{1} << qubit;
  const Eigen::Index right = Eigen::Index{1} << (n_qubits - qubit - 1);
  return qcore::kron(qcore::kron(qcore::identity(left), single),
                     qcore::identity(right));
}

ComplexMatrix ising_drift(const SpinSystemSpec& spec) {
  const Eigen::Index dim = Eigen::Index{1} << spec.n_qubits;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  // Diagonal: <b| I_z^{i-1} I_z^i |b> = +1/4 if the bits agree, else -1/4.
  for (Eigen::Index b = 0; b < dim; ++b) {
    double acc = 0.0;
    for (int i = 1; i < spec.n_qubits; ++i) {
      const int shift_prev = spec.n_qubits - i;
      const int shift_cur = spec.n_qubits - i - 1;
      const bool agree = ((b >> shift_prev) & 1) == ((b >> shift_cur) & 1);
      acc += agree ? 0.25 : -0.25;
    }
    h(b, b) = 2.0 * std::numbers::pi * spec.coupling_j * acc;
  }
  return h;
}

SpinChainModel::SpinChainModel(SpinSystemSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  drift_ = spec_.has_drift ? ising_drift(spec_)
                           : ComplexMatrix::Zero(Eigen::Index{1} << spec_.n_qubits,
                                                 Eigen::Index{1} << spec_.n_qubits);
  for (int i = 0; i < spec_.n_qubits; ++i) {
    ix_.push_back(local_operator(spec_.n_qubits, i, Axis::X));
    iy_.push_back(local_operator(spec_.n_qubits, i, Axis::Y));
  }
}

void SpinChainModel::check_sequence(const ControlSequence& c) const {
  if (!(c.spec() == spec_)) {
    throw ValidationError("control sequence belongs to a different system");
  }
}

ComplexMatrix SpinChainModel::segment_generator(const ControlSequence& c,
                                                int segment) const {
  check_sequence(c);
  if (segment < 0 || segment >= spec_.segments_m) {
    throw ValidationError("segment index out of range");
  }
  ComplexMatrix g = drift_;
  const double scale = spec_.has_drift ? 2.0 * std::numbers::pi : spec_.field_scale;
  for (int i = 0; i < spec_.n_qubits; ++i) {
    g += (scale * c.bx(segment, i)) * ix_[static_cast<std::size_t>(i)];
    g += (scale * c.by(segment, i)) * iy_[static_cast<std::size_t>(i)];
  }
  return g;
}

ComplexMatrix SpinChainModel::segment_propagator(const ControlSequence& c,
                                                 int segment) const {
  return qcore::expm_hermitian_generator(segment_generator(c, segment), c.dt(segment));
}

ComplexMatrix SpinChainModel::sequence_propagator(const ControlSequence& c) const {
  ComplexMatrix u = qcore::identity(Eigen::Index{1} << spec_.n_qubits);
  for (int m = 0; m < spec_.segments_m; ++m) {
    u = segment_propagator(c, m) * u;
  }
  return u;
}

QuantumState SpinChainModel::prepare_probe(const ControlSequence& c,
                                           const QuantumState& initial) const {
  check_sequence(c);
  if (initial.n_qubits() != spec_.n_qubits) {
    throw ValidationError("initial state has the wrong number of qubits");
  }
  if (!initial.is_pure()) {
    throw ValidationError("initial state must be pure");
  }
  ComplexVector psi = initial.amplitudes();
  for (int m = 0; m < spec_.segments_m; ++m) {
    const auto eig = qcore::hermitian_eig(segment_generator(c, m));
    psi = qcore::apply_spectral_propagator(eig, c.dt(m), psi);
  }
  return QuantumState::pure(std::move(psi));
}

QuantumState SpinChainModel::prepare_probe(const ControlSequence& c) const {
  return prepare_probe(c, QuantumState::zeros(spec_.n_qubits));
}

ComplexMatrix segment_propagator(const SpinSystemSpec& spec,
                                 const ControlSequence& c, int segment) {
  return SpinChainModel(spec).segment_propagator(c, segment);
}

ComplexMatrix sequence_propagator(const SpinSystemSpec& spec,
                                  const ControlSequence& c) {
  return SpinChainModel(spec).sequence_propagator(c);
}

QuantumState prepare_probe(const SpinSystemSpec& spec, const ControlSequence& c,
                           const std::optional<QuantumState>& initial) {
  SpinChainModel model(spec);
  return initial ? model.prepare_probe(c, *initial) : model.prepare_probe(c);
}

}  // namespace qloop::spinsys
