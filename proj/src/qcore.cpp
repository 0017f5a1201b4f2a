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

#include "qloop/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "qloop/errors.hpp"

namespace qloop::qcore {

ComplexMatrix identity(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw CapacityError("kron: result " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " exceeds dimension budget " +
                        std::to_string(kMaxDimension));
  }
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const ComplexMatrix& h, double tol) {
  return h.size() > 0 && hermiticity_defect(h) <= tol;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
  if (!is_hermitian(h)) {
    throw ValidationError("hermitian_eig: input is not Hermitian");
  }
  const ComplexMatrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expm_hermitian_generator(const ComplexMatrix& h, double t) {
  const EigenDecomposition eig = hermitian_eig(h);
  ComplexVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -eig.eigenvalues(k) * t);
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexVector apply_spectral_propagator(const EigenDecomposition& eig, double t,
                                        const ComplexVector& v) {
  ComplexVector coeffs = eig.eigenvectors.adjoint() * v;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::polar(1.0, -eig.eigenvalues(k) * t);
  }
  return eig.eigenvectors * coeffs;
}

int qubits_for_dimension(Eigen::Index dim) {
  if (dim < 2 || dim > kMaxDimension || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw ValidationError("dimension " + std::to_string(dim) +
                          " is not a power of two in [2, 2^10]");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

QuantumState QuantumState::pure(ComplexVector amplitudes) {
  const int n = qubits_for_dimension(amplitudes.size());
  const double norm2 = amplitudes.squaredNorm();
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kStateTolerance) {
    throw ValidationError("pure state is not normalized (|psi|^2 = " +
                          std::to_string(norm2) + ")");
  }
  return QuantumState(n, std::move(amplitudes));
}

QuantumState QuantumState::mixed(ComplexMatrix rho) {
  if (rho.rows() != rho.cols()) {
    throw ValidationError("density matrix must be square");
  }
  const int n = qubits_for_dimension(rho.rows());
  if (!rho.allFinite() || !is_hermitian(rho, kStateTolerance)) {
    throw ValidationError("density matrix is not Hermitian");
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kStateTolerance) {
    throw ValidationError("density matrix trace is " + std::to_string(tr));
  }
  const ComplexMatrix sym = (rho + rho.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStateTolerance) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
  return QuantumState(n, sym);
}

QuantumState QuantumState::basis(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > 10) {
    throw ValidationError("basis state needs 1..10 qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (index >= static_cast<std::uint64_t>(dim)) {
    throw ValidationError("basis index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(n_qubits, std::move(v));
}

QuantumState QuantumState::maximally_mixed(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return mixed(identity(dim) / static_cast<double>(dim));
}

const ComplexVector& QuantumState::amplitudes() const {
  if (const auto* v = std::get_if<ComplexVector>(&repr_)) {
    return *v;
  }
  throw ValidationError("state is a density matrix, not a pure vector");
}

ComplexMatrix QuantumState::density_matrix() const {
  if (const auto* v = std::get_if<ComplexVector>(&repr_)) {
    return *v * v->adjoint();
  }
  return std::get<ComplexMatrix>(repr_);
}

double purity(const ComplexMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.cwiseAbs2().sum();
}

double purity(const QuantumState& s) {
  if (s.is_pure()) {
    return 1.0;
  }
  return purity(s.density_matrix());
}

namespace {

// Sum of Re(a_ij) Re(b_ij) + Im(a_ij) Im(b_ij): the expression is symmetric
// under a <-> b term by term, so the result is too.
double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      acc += a(i, j).real() * b(i, j).real() + a(i, j).imag() * b(i, j).imag();
    }
  }
  return acc;
}

}  // namespace

double trace_overlap(const QuantumState& a, const QuantumState& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw ValidationError("trace_overlap: qubit counts differ");
  }
  if (a.is_pure() && b.is_pure()) {
    return std::norm(a.amplitudes().dot(b.amplitudes()));
  }
  return hermitian_inner(a.density_matrix(), b.density_matrix());
}

double fidelity_pure(const QuantumState& a, const QuantumState& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw ValidationError("fidelity_pure: qubit counts differ");
  }
  if (!a.is_pure() || !b.is_pure()) {
    throw ValidationError("fidelity_pure: both states must be pure");
  }
  return std::min(1.0, std::abs(a.amplitudes().dot(b.amplitudes())));
}

QuantumState random_pure_state(int n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(k) = Complex(re, im);
  }
  v.normalize();
  return QuantumState::pure(std::move(v));
}

QuantumState random_mixed_state(int n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QuantumState::mixed(std::move(rho));
}

}  // namespace qloop::qcore
