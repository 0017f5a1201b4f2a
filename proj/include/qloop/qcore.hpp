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
 * Dense complex linear algebra and quantum-state primitives.
 *
 * Everything here is sized for Hilbert spaces of at most 2^10 dimensions and
 * uses dense storage. Qubit 0 is the leftmost Kronecker factor, i.e. the most
 * significant bit of a computational-basis index, and |0> is the +1/2
 * eigenstate of I_z = sigma_z / 2.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <variant>

#include <Eigen/Dense>

namespace qloop::qcore {

using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Eigen::Index kMaxDimension = Eigen::Index{1} << 10;

/// Tolerances used when validating states on construction.
inline constexpr double kStateTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;

ComplexMatrix identity(Eigen::Index dim);

/// Kronecker product. Throws CapacityError when the result exceeds
/// kMaxDimension along either axis.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Max-abs deviation from Hermiticity, scaled by max(1, max |h_ij|).
double hermiticity_defect(const ComplexMatrix& h);
bool is_hermitian(const ComplexMatrix& h, double tol = kHermitianTolerance);

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors;  // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix, h = V diag(lambda) V^dagger.
EigenDecomposition hermitian_eig(const ComplexMatrix& h);

/// exp(-i h t) for Hermitian h, built from the eigendecomposition.
ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t);

/// Applies exp(-i t diag(lambda)) in the eigenbasis to a vector.
ComplexVector apply_spectral_propagator(const EigenDecomposition& eig, double t,
                                        const ComplexVector& v);

/// A pure state vector or a density matrix on n qubits.
///
/// Construction validates the invariants (normalization, Hermiticity, unit
/// trace, positive semidefiniteness) and throws ValidationError on failure.
/// Instances are immutable.
class QuantumState {
 public:
  static QuantumState pure(ComplexVector amplitudes);
  static QuantumState mixed(ComplexMatrix rho);
  static QuantumState basis(int n_qubits, std::uint64_t index);
  static QuantumState zeros(int n_qubits) { return basis(n_qubits, 0); }
  static QuantumState maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits_; }
  bool is_pure() const { return std::holds_alternative<ComplexVector>(repr_); }

  /// Amplitudes of a pure state. Throws ValidationError for density matrices.
  const ComplexVector& amplitudes() const;
  /// rho for mixed states, |psi><psi| for pure ones.
  ComplexMatrix density_matrix() const;

 private:
  QuantumState(int n_qubits, std::variant<ComplexVector, ComplexMatrix> repr)
      : n_qubits_(n_qubits), repr_(std::move(repr)) {}

  int n_qubits_;
  std::variant<ComplexVector, ComplexMatrix> repr_;
};

/// Number of qubits for a power-of-two dimension; throws otherwise.
int qubits_for_dimension(Eigen::Index dim);

/// Tr(rho^2). Exactly 1 for pure states.
double purity(const QuantumState& s);
double purity(const ComplexMatrix& rho);

/// Re Tr(rho_a rho_b). Symmetric in its arguments to the last bit.
double trace_overlap(const QuantumState& a, const QuantumState& b);

/// |<a|b>| for pure states of equal size.
double fidelity_pure(const QuantumState& a, const QuantumState& b);

/// Haar-random pure state.
QuantumState random_pure_state(int n_qubits, std::mt19937_64& rng);
/// Random full-rank density matrix from the Hilbert-Schmidt ensemble.
QuantumState random_mixed_state(int n_qubits, std::mt19937_64& rng);

}  // namespace qloop::qcore
