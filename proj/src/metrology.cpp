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

#include "qloop/metrology.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "qloop/errors.hpp"

namespace qloop::metrology {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::ComplexVector;

namespace {

int popcount(Eigen::Index b) {
  return std::popcount(static_cast<std::uint64_t>(b));
}

void check_encoding(const QuantumState& s, const PhaseEncoding& enc) {
  if (s.n_qubits() != enc.n_qubits) {
    throw ValidationError("state has " + std::to_string(s.n_qubits()) +
                          " qubits but the encoding acts on " +
                          std::to_string(enc.n_qubits));
  }
}

}  // namespace

StrataSet::StrataSet(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw ValidationError("strata set must contain at least one point");
  }
  for (double x : points_) {
    if (!std::isfinite(x)) throw ValidationError("strata points must be finite");
  }
  if (points_.size() > 1) {
    double sum_sq = 0.0;
    for (double x : points_) sum_sq += x * x;
    dx2_ = sum_sq / static_cast<double>(points_.size() - 1);
  }
}

double StrataSet::mean() const {
  return std::accumulate(points_.begin(), points_.end(), 0.0) /
         static_cast<double>(points_.size());
}

StrataSet experiment_strata() {
  return StrataSet({-1.7046, -0.9757, -0.5922, -0.2832, 0.0, 0.2832, 0.5922,
                    0.9757, 1.7046});
}

StrataSet gaussian_strata(int k, double dx2) {
  if (k < 3 || k % 2 == 0) {
    throw ValidationError("gaussian_strata: K must be odd and >= 3");
  }
  if (!(dx2 > 0.0) || !std::isfinite(dx2)) {
    throw ValidationError("gaussian_strata: dx2 must be positive");
  }
  const boost::math::normal_distribution<double> unit;
  const auto kd = static_cast<double>(k);
  const int half = k / 2;
  std::vector<double> upper(static_cast<std::size_t>(half));
  // Stratum j (j = half+1 .. k-1) spans quantiles [j/K, (j+1)/K); its
  // conditional mean is K * (pdf(lo) - pdf(hi)).
  for (int j = half + 1; j < k; ++j) {
    const double lo = boost::math::quantile(unit, j / kd);
    const double pdf_lo = boost::math::pdf(unit, lo);
    const double pdf_hi =
        (j + 1 == k) ? 0.0 : boost::math::pdf(unit, boost::math::quantile(unit, (j + 1) / kd));
    upper[static_cast<std::size_t>(j - half - 1)] = kd * (pdf_lo - pdf_hi);
  }
  double sum_sq = 0.0;
  for (double m : upper) sum_sq += 2.0 * m * m;
  const double scale = std::sqrt(dx2 * (kd - 1.0) / sum_sq);

  std::vector<double> points(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < half; ++j) {
    const double v = scale * upper[static_cast<std::size_t>(j)];
    points[static_cast<std::size_t>(half + 1 + j)] = v;
    points[static_cast<std::size_t>(half - 1 - j)] = -v;
  }
  return StrataSet(std::move(points));
}

FitnessReport make_report(double purity_probe, double purity_avg, double dx2) {
  if (!(dx2 > 0.0)) {
    throw ValidationError("fitness needs a strata set with dx2 > 0");
  }
  FitnessReport r;
  r.purity_probe = purity_probe;
  r.purity_avg = purity_avg;
  r.delta_gamma = purity_probe - purity_avg;
  r.dx2 = dx2;
  r.fql = 2.0 * r.delta_gamma / dx2;
  r.proxy_regime = dx2 > kProxyRegimeDx2;
  return r;
}

double collective_z(int n_qubits, std::uint64_t index) {
  return 0.5 * n_qubits - std::popcount(index);
}

QuantumState encode(const QuantumState& state, const PhaseEncoding& enc,
                    double offset) {
  check_encoding(state, enc);
  const double theta = enc.phi + offset;
  const int n = state.n_qubits();
  if (state.is_pure()) {
    ComplexVector psi = state.amplitudes();
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
      psi(b) *= std::polar(1.0, -theta * collective_z(n, static_cast<std::uint64_t>(b)));
    }
    return QuantumState::pure(std::move(psi));
  }
  ComplexMatrix rho = state.density_matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      rho(i, j) *= std::polar(1.0, -theta * (popcount(j) - popcount(i)));
    }
  }
  return QuantumState::mixed(std::move(rho));
}

PhaseAverager::PhaseAverager(const PhaseEncoding& enc, const StrataSet& strata)
    : n_(enc.n_qubits), dx2_(strata.dx2()) {
  if (n_ < 1) throw ValidationError("encoding needs at least one qubit");
  const auto k = static_cast<double>(strata.size());
  for (int d = -n_; d <= n_; ++d) {
    Complex acc = 0.0;
    for (double x : strata.points()) {
      acc += std::polar(1.0, -(enc.phi + x) * d);
    }
    chi_.push_back(acc / k);
    loss_.push_back(std::max(0.0, 1.0 - std::norm(chi_.back())));
  }
}

ComplexMatrix PhaseAverager::averaged_density(const QuantumState& probe) const {
  if (probe.n_qubits() != n_) {
    throw ValidationError("probe size does not match the encoding");
  }
  ComplexMatrix rho = probe.density_matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      rho(i, j) *= chi(popcount(j) - popcount(i));
    }
  }
  return rho;
}

double PhaseAverager::purity_loss(const QuantumState& probe) const {
  if (probe.n_qubits() != n_) {
    throw ValidationError("probe size does not match the encoding");
  }
  double acc = 0.0;
  if (probe.is_pure()) {
    // Only the weight on each excitation number w matters for a pure probe.
    std::vector<double> weight(static_cast<std::size_t>(n_ + 1), 0.0);
    const ComplexVector& psi = probe.amplitudes();
    for (Eigen::Index b = 0; b < psi.size(); ++b) {
      weight[static_cast<std::size_t>(popcount(b))] += std::norm(psi(b));
    }
    for (int w = 0; w <= n_; ++w) {
      for (int v = 0; v <= n_; ++v) {
        acc += weight[static_cast<std::size_t>(w)] * weight[static_cast<std::size_t>(v)] *
               loss(v - w);
      }
    }
    return acc;
  }
  const ComplexMatrix rho = probe.density_matrix();
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      acc += std::norm(rho(i, j)) * loss(popcount(j) - popcount(i));
    }
  }
  return acc;
}

FitnessReport PhaseAverager::fitness(const QuantumState& probe) const {
  const double p = qcore::purity(probe);
  const double loss_value = purity_loss(probe);
  return make_report(p, p - loss_value, dx2_);
}

QuantumState averaged_state(const QuantumState& probe, const PhaseEncoding& enc,
                            const StrataSet& strata) {
  check_encoding(probe, enc);
  return QuantumState::mixed(PhaseAverager(enc, strata).averaged_density(probe));
}

FitnessReport fitness(const QuantumState& probe, const PhaseEncoding& enc,
                      const StrataSet& strata) {
  check_encoding(probe, enc);
  if (!(strata.dx2() > 0.0)) {
    throw ValidationError("fitness needs a strata set with dx2 > 0");
  }
  return PhaseAverager(enc, strata).fitness(probe);
}

double qfi_pure(const QuantumState& probe, const PhaseEncoding& enc) {
  check_encoding(probe, enc);
  if (!probe.is_pure()) {
    throw ValidationError("qfi_pure needs a pure probe; use qfi_mixed");
  }
  const ComplexVector& psi = probe.amplitudes();
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const double p = std::norm(psi(b));
    const double h = collective_z(probe.n_qubits(), static_cast<std::uint64_t>(b));
    m1 += p * h;
    m2 += p * h * h;
  }
  return std::max(0.0, 4.0 * (m2 - m1 * m1));
}

double qfi_mixed(const QuantumState& probe, const PhaseEncoding& enc) {
  check_encoding(probe, enc);
  const auto eig = qcore::hermitian_eig(probe.density_matrix());
  const Eigen::Index dim = probe.dim();
  qcore::RealVector h(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    h(b) = collective_z(probe.n_qubits(), static_cast<std::uint64_t>(b));
  }
  const ComplexMatrix h_eig = eig.eigenvectors.adjoint() * h.asDiagonal() * eig.eigenvectors;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double li = eig.eigenvalues(i);
      const double lj = eig.eigenvalues(j);
      if (li + lj > kQfiRegularization) {
        acc += (li - lj) * (li - lj) / (li + lj) * std::norm(h_eig(i, j));
      }
    }
  }
  return 2.0 * acc;
}

QuantumState noon_state(int n_qubits, double theta) {
  if (n_qubits < 1 || n_qubits > 10) {
    throw ValidationError("noon_state needs 1..10 qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexVector psi = ComplexVector::Zero(dim);
  psi(0) = (std::numbers::sqrt2 / 2.0);
  psi(dim - 1) = std::polar((std::numbers::sqrt2 / 2.0), theta);
  return QuantumState::pure(std::move(psi));
}

NoonMatch noon_fidelity(const QuantumState& probe) {
  if (!probe.is_pure()) {
    throw ValidationError("noon_fidelity needs a pure probe");
  }
  const ComplexVector& psi = probe.amplitudes();
  const Complex a0 = psi(0);
  const Complex a1 = psi(psi.size() - 1);
  NoonMatch m;
  m.fidelity = std::min(1.0, (std::abs(a0) + std::abs(a1)) * (std::numbers::sqrt2 / 2.0));
  double theta = std::remainder(std::arg(a1) - std::arg(a0), 2.0 * std::numbers::pi);
  if (theta <= -std::numbers::pi) theta += 2.0 * std::numbers::pi;
  m.best_theta = theta;
  return m;
}

}  // namespace qloop::metrology
