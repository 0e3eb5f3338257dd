// Copyright 2026 The bsamp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "bsamp/numerics/haar.hpp"
#include "bsamp/states/fock.hpp"
#include "bsamp/states/gaussian_state.hpp"
#include "oracles.hpp"

namespace bsamp {
namespace {

double max_abs(const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Squeezer, Derived) {
  const SqueezerSpec s{0.697, 0.0};
  EXPECT_NEAR(s.mean_photons(), std::sinh(0.697) * std::sinh(0.697), 1e-15);
  EXPECT_NEAR(s.mean_photons(), 0.569, 1e-3);
  EXPECT_LT(s.lambda(), 1.0);
}

TEST(Smsv, VacuumAndVariance) {
  EXPECT_LE(max_abs(smsv_state({{0, 0}, {0, 1}}).cov() - 0.5 * RealMatrix::Identity(4, 4)), 1e-15);
  const GaussianState s = smsv_state({{0.697, 0.0}});
  EXPECT_NEAR(s.cov()(0, 0), std::exp(-1.394) / 2.0, 1e-12);
  EXPECT_NEAR(s.cov()(0, 0), 0.12405, 1e-5);
  EXPECT_NEAR(s.cov()(1, 1), std::exp(1.394) / 2.0, 1e-12);
  EXPECT_NEAR(s.mean_photons()[0], 0.569, 1e-3);
  EXPECT_NEAR(s.purity(), 1.0, 1e-12);
  EXPECT_THROW(smsv_state({{-0.1, 0}}), ConfigError);
}

TEST(Smsv, RotatedPhaseKeepsDeterminant) {
  const GaussianState s = smsv_state({{0.5, 1.1}});
  EXPECT_NEAR(s.cov().determinant(), 0.25, 1e-12);
  EXPECT_NEAR(s.cov()(0, 1), -std::sin(1.1) * std::sinh(1.0) / 2.0, 1e-12);
}

TEST(Tmsv, MarginalIsThermal) {
  EXPECT_LE(max_abs(tmsv_state({{0, 0}}).cov() - 0.5 * RealMatrix::Identity(4, 4)), 1e-15);
  const GaussianState t = tmsv_state({{0.176, 0.0}});
  EXPECT_NEAR(t.mean_photons()[0], std::sinh(0.176) * std::sinh(0.176), 1e-14);
  EXPECT_NEAR(t.mean_photons()[1], 0.0312, 1e-4);
  const GaussianState marg = t.reduced({0});
  const GaussianState th = thermal_state({std::sinh(0.176) * std::sinh(0.176)});
  EXPECT_LE(max_abs(marg.cov() - th.cov()), 1e-14);
}

TEST(Tmsv, JointDistribution) {
  const double r = 0.4;
  const double lam2 = std::tanh(r) * std::tanh(r);
  const FockDistribution d = fock_distribution(tmsv_state({{r, 0.3}}), 10);
  for (size_t i = 0; i < d.size(); ++i) {
    const PhotonPattern p = d.pattern(i);
    const double expect = p[0] == p[1] ? (1 - lam2) * std::pow(lam2, p[0]) : 0.0;
    EXPECT_NEAR(d.probabilities()[i], expect, 1e-12) << p.str();
  }
}

TEST(Thermal, Basics) {
  EXPECT_LE(max_abs(thermal_state({0.0}).cov() - 0.5 * RealMatrix::Identity(2, 2)), 0.0);
  const GaussianState t = thermal_state({1.0});
  EXPECT_DOUBLE_EQ(t.cov()(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(t.cov()(1, 1), 1.5);
  const FockDistribution d = fock_distribution(thermal_state({2.3}), 12);
  for (int n = 0; n <= 12; ++n) {
    EXPECT_NEAR(d.at(PhotonPattern{n}), oracle::thermal_probability(2.3, n), 1e-12);
  }
  EXPECT_THROW(thermal_state({-1.0}), ConfigError);
}

TEST(Thermal, TwoModeProduct) {
  const FockDistribution d = fock_distribution(thermal_state({0.5, 0.5}), 8);
  for (size_t i = 0; i < d.size(); ++i) {
    const PhotonPattern p = d.pattern(i);
    const double expect = oracle::thermal_probability(0.5, p[0]) * oracle::thermal_probability(0.5, p[1]);
    EXPECT_NEAR(d.probabilities()[i], expect, 1e-10);
  }
}

TEST(GaussianStateType, RejectsUnphysical) {
  EXPECT_THROW(GaussianState(0.1 * RealMatrix::Identity(2, 2)), NumericError);
  RealMatrix asym = 0.5 * RealMatrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(GaussianState{asym}, SymmetryError);
  EXPECT_THROW(GaussianState(RealMatrix::Identity(3, 3)), DimensionError);
}

TEST(GaussianStateType, MomentsRoundTrip) {
  const GaussianState s = apply_unitary(smsv_state({{0.3, 0.2}, {0.7, -1.0}, {0.1, 2.0}}), haar_unitary(3, 4));
  const GaussianState back = GaussianState::from_moments(s.moments());
  EXPECT_LE(max_abs(back.cov() - s.cov()), 1e-14);
}

TEST(ApplyUnitary, IdentityAndSymplectic) {
  const GaussianState s = smsv_state({{0.3, 0.2}, {0.7, -1.0}});
  EXPECT_LE(max_abs(apply_unitary(s, UnitaryMatrix::identity(2)).cov() - s.cov()), 1e-15);

  const UnitaryMatrix u = haar_unitary(5, 11);
  const RealMatrix sm = symplectic_from_unitary(u.matrix());
  EXPECT_NEAR(sm.determinant(), 1.0, 1e-12);
  const RealMatrix om = symplectic_form(5);
  EXPECT_LE(max_abs(sm * om * sm.transpose() - om), 1e-12);
  EXPECT_LE(max_abs(sm * sm.transpose() - RealMatrix::Identity(10, 10)), 1e-12);
}

TEST(ApplyUnitary, BeamsplitterSeparatesTmsv) {
  ComplexMatrix bs(2, 2);
  bs << 1, 1, 1, -1;
  bs /= std::sqrt(2.0);
  const GaussianState out = apply_unitary(tmsv_state({{0.6, 0.0}}), UnitaryMatrix(bs));
  const ComplexMoments m = out.moments();
  EXPECT_LE(std::abs(m.m(0, 1)), 1e-12);
  EXPECT_LE(std::abs(m.n(0, 1)), 1e-12);
  EXPECT_LE(max_abs(out.cov().topRightCorner(2, 2)), 1e-12);
  EXPECT_LE(max_abs(out.cov()(Eigen::seq(0, 3, 2), Eigen::seq(1, 3, 2))), 1e-12);
  EXPECT_NEAR(out.purity(), 1.0, 1e-12);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(m.m(i, i)), std::sinh(0.6) * std::cosh(0.6), 1e-12);
}

TEST(ApplyUnitary, SubsetAndErrors) {
  const GaussianState s = thermal_state({0.2, 0.4, 0.6});
  EXPECT_THROW(apply_unitary(s, haar_unitary(2, 1), {0}), DimensionError);
  EXPECT_THROW(apply_unitary(s, haar_unitary(2, 1), {0, 0}), DimensionError);
  const GaussianState t = apply_unitary(s, haar_unitary(2, 1), {0, 2});
  EXPECT_NEAR(t.mean_photons()[1], 0.4, 1e-14);
  EXPECT_NEAR(t.mean_photons()[0] + t.mean_photons()[2], 0.8, 1e-13);
}

TEST(ApplyLoss, Basics) {
  const GaussianState s = smsv_state({{0.4, 0.5}, {0.9, 0.0}});
  EXPECT_LE(max_abs(apply_loss(s, {1.0, 1.0}).cov() - s.cov()), 1e-15);
  EXPECT_LE(max_abs(apply_loss(s, {0.0, 0.0}).cov() - 0.5 * RealMatrix::Identity(4, 4)), 1e-15);
  EXPECT_NEAR(apply_loss(thermal_state({1.0}), {0.384}).mean_photons()[0], 0.384, 1e-14);
  EXPECT_THROW(apply_loss(s, {1.2, 1.0}), ConfigError);
  EXPECT_THROW(apply_loss(s, {1.0}), DimensionError);
}

TEST(ApplyLoss, Composition) {
  const GaussianState s = apply_unitary(smsv_state({{0.4, 0.5}, {0.9, 0.0}, {0.2, 1.0}}), haar_unitary(3, 8));
  const std::vector<double> e1{0.9, 0.5, 0.3};
  const std::vector<double> e2{0.2, 0.7, 0.95};
  std::vector<double> e12(3);
  for (int i = 0; i < 3; ++i) e12[i] = e1[i] * e2[i];
  EXPECT_LE(max_abs(apply_loss(apply_loss(s, e1), e2).cov() - apply_loss(s, e12).cov()), 1e-12);
}

TEST(FockProbability, VacuumAndSelectionRule) {
  EXPECT_NEAR(fock_probability(GaussianState::vacuum(3), PhotonPattern{0, 0, 0}), 1.0, 1e-15);
  EXPECT_EQ(fock_probability(smsv_state({{0.5, 0.0}}), PhotonPattern{1}), 0.0);
  const double t = std::tanh(0.5);
  const double closed = std::norm(-t / 2.0 * std::sqrt(2.0)) / std::cosh(0.5);
  EXPECT_NEAR(fock_probability(smsv_state({{0.5, 0.0}}), PhotonPattern{2}), closed, 1e-14);
}

TEST(FockProbability, SmsvClosedForm) {
  for (double r : {0.3, 0.5, 0.9}) {
    for (double phi : {0.0, 0.7}) {
      const GaussianState s = smsv_state({{r, phi}});
      for (int n = 0; n <= 10; ++n) {
        const double expect = std::norm(oracle::smsv_amplitude(r, phi, n));
        EXPECT_NEAR(fock_probability(s, PhotonPattern{n}), expect, 1e-12) << r << " " << n;
      }
    }
  }
}

TEST(FockProbability, TmsvClosedForm) {
  for (double r : {0.3, 0.5}) {
    const GaussianState s = tmsv_state({{r, 0.4}});
    for (int a = 0; a <= 10; ++a) {
      for (int b = 0; a + b <= 10; ++b) {
        const double expect = std::norm(oracle::tmsv_amplitude(r, 0.4, a, b));
        EXPECT_NEAR(fock_probability(s, PhotonPattern{a, b}), expect, 1e-12);
      }
    }
  }
}

TEST(FockProbability, LargeTotalUsesRepeatedFormula) {
  const GaussianState s = tmsv_state({{0.9, 0.0}});
  const double lam2 = std::pow(std::tanh(0.9), 2);
  EXPECT_NEAR(fock_probability(s, PhotonPattern{13, 13}), (1 - lam2) * std::pow(lam2, 13), 1e-12);
  EXPECT_THROW(fock_probability(s, PhotonPattern{16, 16}), CapacityError);
}

TEST(FockProbability, MultimodeAgreesWithDistribution) {
  const GaussianState s = apply_loss(
      apply_unitary(smsv_state({{0.4, 0.1}, {0.6, 1.0}, {0.2, -0.5}}), haar_unitary(3, 21)), {0.9, 0.6, 0.8});
  const FockDistribution d = fock_distribution(s, 3);
  for (size_t i = 0; i < d.size(); i += 3) {
    EXPECT_NEAR(fock_probability(s, d.pattern(i)), d.probabilities()[i], 1e-12) << d.pattern(i).str();
  }
}

TEST(FockDistribution, PureRouteMatchesHafnian) {
  const GaussianState s = apply_unitary(smsv_state({{0.4, 0.1}, {0.6, 1.0}, {0.2, -0.5}}), haar_unitary(3, 2));
  const FockDistribution d = fock_distribution(s, 4);
  for (size_t i = 0; i < d.size(); ++i) {
    EXPECT_NEAR(fock_probability(s, d.pattern(i)), d.probabilities()[i], 1e-12) << d.pattern(i).str();
  }
}

TEST(FockDistribution, VacuumAndBudget) {
  const FockDistribution d = fock_distribution(GaussianState::vacuum(2), 3);
  EXPECT_DOUBLE_EQ(d.at(PhotonPattern{0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(d.total(), 1.0);
  EXPECT_THROW(fock_distribution(GaussianState::vacuum(8), 9), BudgetError);
}

TEST(FockDistribution, TmsvTailBound) {
  const FockDistribution d = fock_distribution(tmsv_state({{0.3, 0.0}}), 8);
  EXPECT_GE(d.total(), 0.9999);
  EXPECT_LE(d.total(), 1.0 + 1e-9);
}

TEST(FockDistribution, MarginalMatchesThermal) {
  const double r = 0.5;
  const GaussianState marg = tmsv_state({{r, 0.2}}).reduced({1});
  const FockDistribution a = fock_distribution(marg, 12);
  const FockDistribution b = fock_distribution(thermal_state({std::sinh(r) * std::sinh(r)}), 12);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.probabilities()[i], b.probabilities()[i], 1e-9);
}

TEST(FockDistribution, TotalPhotonsUnitaryInvariant) {
  const GaussianState in = smsv_state({{0.3, 0.0}, {0.2, 1.0}, {0.25, 2.0}});
  const GaussianState out = apply_unitary(in, haar_unitary(3, 7));
  auto mean_total = [](const FockDistribution& d) {
    double acc = 0.0;
    for (size_t i = 0; i < d.size(); ++i) acc += d.pattern(i).total() * d.probabilities()[i];
    return acc;
  };
  const FockDistribution a = fock_distribution(in, 16);
  const FockDistribution b = fock_distribution(out, 16);
  ASSERT_GE(a.total(), 1 - 1e-6);
  ASSERT_GE(b.total(), 1 - 1e-6);
  EXPECT_NEAR(mean_total(a), mean_total(b), 1e-8);
}

TEST(FockDistribution, MonotoneInCutoff) {
  const GaussianState s = apply_unitary(smsv_state({{0.6, 0.0}, {0.5, 0.3}}), haar_unitary(2, 5));
  double prev = 0.0;
  for (int c = 0; c <= 20; c += 2) {
    const double t = fock_distribution(s, c).total();
    EXPECT_GE(t, prev - 1e-15);
    prev = t;
  }
  EXPECT_NEAR(prev, 1.0, 1e-5);
}

TEST(FockDistribution, EvenPhotonRuleForUncoupledModes) {
  const FockDistribution d = fock_distribution(smsv_state({{0.5, 0.2}, {0.8, 1.3}}), 9);
  for (size_t i = 0; i < d.size(); ++i) {
    const PhotonPattern p = d.pattern(i);
    if (p[0] % 2 || p[1] % 2) {
      EXPECT_LE(d.probabilities()[i], 1e-12);
    }
  }
}

TEST(FockDistribution, MixedLossyMatchesHafnian) {
  const GaussianState s = apply_loss(tmsv_state({{0.5, 0.3}}), {0.6, 0.3});
  const FockDistribution d = fock_distribution(s, 6);
  for (size_t i = 0; i < d.size(); ++i) {
    EXPECT_NEAR(fock_probability(s, d.pattern(i)), d.probabilities()[i], 1e-12);
  }
}

}  // namespace
}  // namespace bsamp
