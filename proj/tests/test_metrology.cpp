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
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qloop/errors.hpp"
#include "qloop/metrology.hpp"

namespace {

using namespace qloop::metrology;
using qloop::ValidationError;
using qloop::qcore::Complex;
using qloop::qcore::ComplexMatrix;
using qloop::qcore::ComplexVector;
using qloop::qcore::QuantumState;
using namespace std::complex_literals;

constexpr double kPi = std::numbers::pi;

QuantumState plus_state() {
  ComplexVector v(2);
  v << 1.0, 1.0;
  return QuantumState::pure(v / std::sqrt(2.0));
}

// Collective generator built from single-qubit I_z factors.
ComplexMatrix collective_generator(int n) {
  ComplexMatrix z(2, 2);
  z << 0.5, 0, 0, -0.5;
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int q = 0; q < n; ++q) {
    ComplexMatrix term = ComplexMatrix::Identity(1, 1);
    for (int s = 0; s < n; ++s)
      term = qloop::qcore::kron(term, s == q ? z : ComplexMatrix::Identity(2, 2));
    h += term;
  }
  return h;
}

ComplexMatrix encoded_density(const ComplexMatrix& rho, int n, double angle) {
  const ComplexMatrix u = qloop::qcore::expm_hermitian_generator(collective_generator(n), angle);
  return u * rho * u.adjoint();
}

// Brute-force average over strata using dense unitaries.
ComplexMatrix brute_average(const QuantumState& probe, const StrataSet& strata, double phi) {
  const ComplexMatrix rho = probe.density_matrix();
  ComplexMatrix avg = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (double x : strata.points()) avg += encoded_density(rho, probe.n_qubits(), phi + x);
  return avg / static_cast<double>(strata.size());
}

double trace_sq(const ComplexMatrix& m) { return (m * m).trace().real(); }

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double root_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix sa = psd_sqrt(a);
  const ComplexMatrix inner = sa * b * sa;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((inner + inner.adjoint()) / 2.0);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

// Bures-metric oracle: 8 (1 - sqrt F) / eps^2, Richardson-extrapolated.
double bures_qfi(const ComplexMatrix& rho, int n) {
  auto estimate = [&](double eps) {
    return 8.0 * (1.0 - root_fidelity(rho, encoded_density(rho, n, eps))) / (eps * eps);
  };
  const double h = 2e-3;
  return (4.0 * estimate(h / 2.0) - estimate(h)) / 3.0;
}

TEST(ExperimentStrata, NinePointsWithQuotedVariance) {
  const auto s = experiment_strata();
  EXPECT_EQ(s.size(), 9u);
  EXPECT_NEAR(s.mean(), 0.0, 1e-12);
  double sum_sq = 0.0;
  for (double x : s.points()) sum_sq += x * x;
  EXPECT_NEAR(sum_sq, 8.577, 5e-4);
  EXPECT_NEAR(s.dx2(), 1.0721, 1e-4);
  EXPECT_NEAR(s.dx2(), sum_sq / 8.0, 1e-15);
}

TEST(GaussianStrata, ReproducesExperimentPoints) {
  const auto g = gaussian_strata(9, 1.0721);
  const auto e = experiment_strata();
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(g.points()[i], e.points()[i], 5e-4) << i;
}

TEST(GaussianStrata, ConditionalMeansByQuadrature) {
  // Midpoint-rule conditional means of the unit Gaussian, rescaled independently.
  const int k = 9;
  std::vector<double> means(k, 0.0);
  std::vector<double> mass(k, 0.0);
  const int steps = 2'000'000;
  const double lo = -9.0;
  const double hi = 9.0;
  const double dx = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double x = lo + (i + 0.5) * dx;
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const int stratum = std::min(k - 1, static_cast<int>(cdf * k));
    const double w = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi) * dx;
    means[stratum] += x * w;
    mass[stratum] += w;
  }
  double sum_sq = 0.0;
  for (int i = 0; i < k; ++i) {
    means[i] /= mass[i];
    sum_sq += means[i] * means[i];
  }
  const double scale = std::sqrt(1.0721 * (k - 1) / sum_sq);
  const auto g = gaussian_strata(k, 1.0721);
  for (int i = 0; i < k; ++i) EXPECT_NEAR(g.points()[i], means[i] * scale, 1e-5) << i;
}

TEST(GaussianStrata, SymmetricWithRequestedVariance) {
  for (int k : {3, 5, 9, 101, 1001}) {
    for (double dx2 : {1e-4, 1e-3, 0.5}) {
      const auto g = gaussian_strata(k, dx2);
      EXPECT_NEAR(g.mean(), 0.0, 1e-12);
      EXPECT_NEAR(g.dx2(), dx2, 1e-12 * dx2);
      for (int i = 0; i < k; ++i) EXPECT_EQ(g.points()[i], -g.points()[k - 1 - i]);
    }
  }
}

TEST(GaussianStrata, ThreeStrataClosedForm) {
  const auto g = gaussian_strata(3, 0.001);
  EXPECT_EQ(g.points()[1], 0.0);
  // Two outer points with Bessel variance 2 a^2 / 2.
  EXPECT_NEAR(g.points()[2], std::sqrt(0.001), 1e-15);
  EXPECT_NEAR(g.points()[0], -std::sqrt(0.001), 1e-15);
}

TEST(GaussianStrata, RejectsInvalidArguments) {
  EXPECT_THROW(gaussian_strata(4, 0.001), ValidationError);
  EXPECT_THROW(gaussian_strata(1, 0.001), ValidationError);
  EXPECT_THROW(gaussian_strata(9, 0.0), ValidationError);
  EXPECT_THROW(gaussian_strata(9, -1.0), ValidationError);
}

TEST(Encode, MatchesDenseUnitary) {
  std::mt19937_64 rng(41);
  for (int n = 1; n <= 3; ++n) {
    const auto psi = qloop::qcore::random_pure_state(n, rng);
    const PhaseEncoding enc{n, 0.4};
    const auto out = encode(psi, enc, -0.15);
    const ComplexMatrix expected = encoded_density(psi.density_matrix(), n, 0.25);
    EXPECT_LT((out.density_matrix() - expected).norm(), 1e-12);
    const auto rho = qloop::qcore::random_mixed_state(n, rng);
    EXPECT_LT((encode(rho, enc, 0.3).density_matrix() -
               encoded_density(rho.density_matrix(), n, 0.7)).norm(),
              1e-12);
  }
}

TEST(Encode, Examples) {
  std::mt19937_64 rng(43);
  const auto psi = qloop::qcore::random_pure_state(2, rng);
  const PhaseEncoding enc{2, 0.8};
  EXPECT_NEAR(qloop::qcore::fidelity_pure(encode(psi, enc, -0.8), psi), 1.0, 1e-14);
  EXPECT_LT((encode(psi, enc, -0.8).amplitudes() - psi.amplitudes()).norm(), 1e-14);

  const auto rotated = encode(plus_state(), PhaseEncoding{1, kPi / 4}, kPi / 4);
  const auto& a = rotated.amplitudes();
  EXPECT_NEAR(std::arg(a(1) / a(0)), kPi / 2, 1e-14);
  EXPECT_NEAR(std::abs(a(0)), 1.0 / std::sqrt(2.0), 1e-15);

  const auto zeros = QuantumState::zeros(3);
  EXPECT_NEAR(qloop::qcore::fidelity_pure(encode(zeros, PhaseEncoding{3, 1.3}, 0.0), zeros), 1.0,
              1e-15);
  EXPECT_THROW(encode(zeros, PhaseEncoding{2, 0.0}, 0.0), ValidationError);
}

TEST(CollectiveZ, Eigenvalues) {
  const ComplexMatrix h = collective_generator(3);
  for (std::uint64_t b = 0; b < 8; ++b) EXPECT_NEAR(collective_z(3, b), h(b, b).real(), 1e-15);
}

TEST(AveragedState, MatchesBruteForce) {
  std::mt19937_64 rng(47);
  for (int n = 1; n <= 3; ++n) {
    const auto psi = qloop::qcore::random_pure_state(n, rng);
    const auto strata = gaussian_strata(7, 0.3);
    const auto avg = averaged_state(psi, PhaseEncoding{n, 0.2}, strata);
    EXPECT_FALSE(avg.is_pure());
    EXPECT_LT((avg.density_matrix() - brute_average(psi, strata, 0.2)).norm(), 1e-12);
    const auto rho = qloop::qcore::random_mixed_state(n, rng);
    EXPECT_LT((averaged_state(rho, PhaseEncoding{n, 0.0}, experiment_strata()).density_matrix() -
               brute_average(rho, experiment_strata(), 0.0)).norm(),
              1e-12);
  }
}

TEST(AveragedState, Examples) {
  const auto zeros = QuantumState::zeros(2);
  const auto avg = averaged_state(zeros, PhaseEncoding{2, 0.0}, experiment_strata());
  EXPECT_NEAR(qloop::qcore::purity(avg), 1.0, 1e-14);
  EXPECT_LT((avg.density_matrix() - zeros.density_matrix()).norm(), 1e-14);

  const auto single = averaged_state(plus_state(), PhaseEncoding{1, 0.3}, StrataSet({0.0}));
  EXPECT_NEAR(qloop::qcore::purity(single), 1.0, 1e-14);

  const auto plus = averaged_state(plus_state(), PhaseEncoding{1, 0.0}, experiment_strata());
  const auto strata = experiment_strata();
  double cos_sum = 0.0;
  for (double x : strata.points()) cos_sum += std::cos(x);
  const double magnitude = 2.0 * std::abs(plus.density_matrix()(0, 1));
  EXPECT_NEAR(magnitude, cos_sum / 9.0, 1e-14);
  EXPECT_NEAR(magnitude, 0.6038, 1e-4);
}

TEST(AveragedState, NeverIncreasesPurity) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const auto probe = trial % 2 ? qloop::qcore::random_pure_state(n, rng)
                                 : qloop::qcore::random_mixed_state(n, rng);
    const auto avg = averaged_state(probe, PhaseEncoding{n, 0.0}, gaussian_strata(9, 0.5));
    EXPECT_LE(qloop::qcore::purity(avg), qloop::qcore::purity(probe) + 1e-12);
  }
}

TEST(Fitness, ZeroStateHasNoLoss) {
  const auto r = fitness(QuantumState::zeros(3), PhaseEncoding{3, 0.0}, gaussian_strata(9, 1e-3));
  EXPECT_NEAR(r.delta_gamma, 0.0, 1e-15);
  EXPECT_NEAR(r.fql, 0.0, 1e-12);
  EXPECT_FALSE(r.proxy_regime);
}

TEST(Fitness, PlusStateAgainstGaussianGrid) {
  // Dense grid integral of the Gaussian characteristic function.
  const double var = 1e-3;
  const int points = 1001;
  const double sigma = std::sqrt(var);
  double weight = 0.0;
  double chi = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = -8.0 * sigma + 16.0 * sigma * i / (points - 1);
    const double w = std::exp(-0.5 * x * x / var);
    weight += w;
    chi += w * std::cos(x);
  }
  chi /= weight;
  const double oracle = (1.0 - chi * chi) / 2.0;
  EXPECT_NEAR(oracle, (1.0 - std::exp(-var)) / 2.0, 1e-9);
  EXPECT_NEAR(oracle, 4.9975e-4, 1e-8);

  const auto r = fitness(plus_state(), PhaseEncoding{1, 0.0}, gaussian_strata(2001, var));
  EXPECT_NEAR(r.delta_gamma, oracle, 1e-3 * oracle);
  EXPECT_NEAR(r.fql, 0.9995, 1e-3);
  EXPECT_NEAR(r.delta_gamma, r.purity_probe - r.purity_avg, 1e-12);
}

TEST(Fitness, PlusStateExperimentStrata) {
  const auto strata = experiment_strata();
  const auto r = fitness(plus_state(), PhaseEncoding{1, 0.0}, strata);
  const ComplexMatrix avg = brute_average(plus_state(), strata, 0.0);
  EXPECT_NEAR(r.delta_gamma, 1.0 - trace_sq(avg), 1e-13);
  EXPECT_NEAR(r.delta_gamma, 0.3177, 1e-4);
  EXPECT_TRUE(r.proxy_regime);
  EXPECT_NEAR(r.fql, 2.0 * r.delta_gamma / strata.dx2(), 1e-15);
}

TEST(Fitness, MatchesBruteForcePurityDifference) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const auto probe = trial % 3 ? qloop::qcore::random_pure_state(n, rng)
                                 : qloop::qcore::random_mixed_state(n, rng);
    const auto strata = gaussian_strata(9, 0.05);
    const auto r = fitness(probe, PhaseEncoding{n, 0.0}, strata);
    const double expected = trace_sq(probe.density_matrix()) - trace_sq(brute_average(probe, strata, 0.0));
    EXPECT_NEAR(r.delta_gamma, expected, 1e-12);
    EXPECT_GE(r.delta_gamma, 0.0);
    EXPECT_LE(r.delta_gamma, r.purity_probe);
  }
}

TEST(Fitness, IndependentOfPhi) {
  std::mt19937_64 rng(61);
  const auto probe = qloop::qcore::random_pure_state(3, rng);
  const auto strata = gaussian_strata(9, 0.2);
  const double base = fitness(probe, PhaseEncoding{3, 0.0}, strata).delta_gamma;
  for (double phi : {0.3, -1.2, 2.9}) {
    EXPECT_NEAR(fitness(probe, PhaseEncoding{3, phi}, strata).delta_gamma, base, 1e-13);
  }
}

TEST(Fitness, RejectsZeroVariance) {
  EXPECT_THROW(fitness(plus_state(), PhaseEncoding{1, 0.0}, StrataSet({0.0})), ValidationError);
}

TEST(Fitness, ProxyBoundedByQfiAndShrinkingGap) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const auto probe = qloop::qcore::random_pure_state(n, rng);
    const PhaseEncoding enc{n, 0.0};
    const double q = qfi_pure(probe, enc);
    double previous_gap = 1e300;
    for (double dx2 : {1e-2, 1e-3, 1e-4}) {
      const auto r = fitness(probe, enc, gaussian_strata(1001, dx2));
      const double gap = q - r.fql;
      EXPECT_GE(gap, -1e-3);
      EXPECT_LE(std::abs(gap), previous_gap + 1e-9);
      previous_gap = std::abs(gap);
      if (dx2 == 1e-4) EXPECT_LE(r.fql, n * n + 1e-6);
    }
  }
}

TEST(QfiPure, Examples) {
  for (int n = 1; n <= 5; ++n) {
    const PhaseEncoding enc{n, 0.0};
    EXPECT_NEAR(qfi_pure(QuantumState::zeros(n), enc), 0.0, 1e-12);
    ComplexVector plus = ComplexVector::Ones(Eigen::Index{1} << n);
    EXPECT_NEAR(qfi_pure(QuantumState::pure(plus / plus.norm()), enc), n, 1e-12);
    for (double theta : {0.0, 0.7, -2.1}) {
      EXPECT_NEAR(qfi_pure(noon_state(n, theta), enc), n * n, 1e-12);
    }
  }
  EXPECT_THROW(qfi_pure(QuantumState::maximally_mixed(1), PhaseEncoding{1, 0.0}), ValidationError);
}

TEST(QfiPure, VarianceOfDenseGenerator) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    const auto psi = qloop::qcore::random_pure_state(n, rng);
    const ComplexMatrix h = collective_generator(n);
    const ComplexVector& v = psi.amplitudes();
    const double m1 = v.dot(h * v).real();
    const double m2 = v.dot(h * h * v).real();
    const double q = qfi_pure(psi, PhaseEncoding{n, 0.0});
    EXPECT_NEAR(q, 4.0 * (m2 - m1 * m1), 1e-12);
    EXPECT_GE(q, -1e-12);
    EXPECT_LE(q, n * n + 1e-12);
    EXPECT_NEAR(qfi_pure(encode(psi, PhaseEncoding{n, 1.1}, 0.0), PhaseEncoding{n, 0.0}), q, 1e-9);
  }
}

TEST(QfiMixed, Examples) {
  EXPECT_NEAR(qfi_mixed(QuantumState::mixed(noon_state(2, 0.3).density_matrix()),
                        PhaseEncoding{2, 0.0}),
              4.0, 1e-8);
  EXPECT_NEAR(qfi_mixed(QuantumState::maximally_mixed(1), PhaseEncoding{1, 0.0}), 0.0, 1e-14);
}

TEST(QfiMixed, MatchesBuresOracle) {
  const ComplexMatrix noisy_plus =
      0.9 * plus_state().density_matrix() + 0.1 * ComplexMatrix::Identity(2, 2) / 2.0;
  const double q = qfi_mixed(QuantumState::mixed(noisy_plus), PhaseEncoding{1, 0.0});
  EXPECT_NEAR(q, bures_qfi(noisy_plus, 1), 1e-6);
  // Closed form for a Bloch vector of length r in the equatorial plane.
  EXPECT_NEAR(q, 0.81, 1e-12);

  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const ComplexMatrix rho = qloop::qcore::random_mixed_state(n, rng).density_matrix();
    EXPECT_NEAR(qfi_mixed(QuantumState::mixed(rho), PhaseEncoding{n, 0.0}), bures_qfi(rho, n),
                1e-5);
  }
}

TEST(QfiMixed, ReducesToPureFormula) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const auto psi = qloop::qcore::random_pure_state(n, rng);
    const PhaseEncoding enc{n, 0.0};
    EXPECT_NEAR(qfi_mixed(QuantumState::mixed(psi.density_matrix()), enc), qfi_pure(psi, enc), 1e-8);
  }
}

TEST(Noon, States) {
  const auto one = noon_state(1, 0.0);
  EXPECT_NEAR(qloop::qcore::fidelity_pure(one, plus_state()), 1.0, 1e-15);
  const auto bell = noon_state(2, 0.0);
  EXPECT_NEAR(bell.amplitudes()(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(bell.amplitudes()(3).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(bell.amplitudes()(1), Complex(0.0));
  EXPECT_EQ(bell.amplitudes()(2), Complex(0.0));
  EXPECT_NEAR(qfi_pure(noon_state(5, 2.2), PhaseEncoding{5, 0.0}), 25.0, 1e-12);
}

TEST(Noon, FidelityExamples) {
  const auto m = noon_fidelity(noon_state(3, 1.2));
  EXPECT_NEAR(m.fidelity, 1.0, 1e-14);
  EXPECT_NEAR(m.best_theta, 1.2, 1e-14);
  EXPECT_NEAR(noon_fidelity(QuantumState::zeros(4)).fidelity, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(noon_fidelity(noon_state(2, -3.0)).best_theta, -3.0, 1e-14);
}

TEST(Noon, ClosedFormMatchesThetaGrid) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 4;
    const auto psi = qloop::qcore::random_pure_state(n, rng);
    const int grid = 100'000;
    double best = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double theta = -kPi + 2.0 * kPi * i / grid;
      best = std::max(best, qloop::qcore::fidelity_pure(noon_state(n, theta), psi));
    }
    const auto m = noon_fidelity(psi);
    EXPECT_NEAR(m.fidelity, best, 1e-6);
    EXPECT_NEAR(qloop::qcore::fidelity_pure(noon_state(n, m.best_theta), psi), m.fidelity, 1e-12);
  }
}

}  // namespace
