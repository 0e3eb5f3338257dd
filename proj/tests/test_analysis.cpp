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

#include <random>

#include "bsamp/analysis/analysis.hpp"
#include "bsamp/numerics/rng.hpp"
#include "bsamp/sampler/sampler.hpp"
#include "oracles.hpp"

namespace bsamp {
namespace {

CountHistogram histogram_of(double (*p)(double, int), double mean, int cutoff) {
  std::vector<double> v;
  for (int n = 0; n <= cutoff; ++n) v.push_back(p(mean, n));
  return CountHistogram(v);
}

TEST(CountHistogram, Basics) {
  const CountHistogram h({2, 6, 2});
  EXPECT_EQ(h.cutoff(), 2);
  EXPECT_DOUBLE_EQ(h.total(), 10);
  const auto p = h.normalized();
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.mean(), 1.0);
  EXPECT_THROW(CountHistogram({1, -1}), ConfigError);
  EXPECT_THROW(CountHistogram().normalized(), NumericError);
  const CountHistogram s = CountHistogram::from_samples({0, 2, 2, 1});
  EXPECT_EQ(s.counts(), (std::vector<double>{1, 1, 2}));
}

TEST(G2, Poisson) {
  EXPECT_NEAR(g2(histogram_of(oracle::poisson_probability, 1.0, 20)), 1.0, 1e-6);
}

TEST(G2, Thermal) {
  EXPECT_NEAR(g2(histogram_of(oracle::thermal_probability, 0.57, 400)), 2.0, 1e-6);
}

TEST(G2, SqueezedVacuumMarginal) {
  const double r = std::asinh(std::sqrt(0.5));
  std::vector<double> p;
  for (int n = 0; n <= 300; ++n) p.push_back(std::norm(oracle::smsv_amplitude(r, 0.0, n)));
  EXPECT_NEAR(g2(CountHistogram(p)), 3.0 + 1.0 / 0.5, 1e-6);
}

TEST(G2, TailWarningAndErrors) {
  const G2Result t = g2_checked(histogram_of(oracle::thermal_probability, 2.0, 3));
  EXPECT_TRUE(t.tail_warning);
  EXPECT_GT(t.tail_mass, 1e-3);
  EXPECT_FALSE(g2_checked(histogram_of(oracle::thermal_probability, 0.01, 10)).tail_warning);
  EXPECT_THROW(g2(CountHistogram({5, 0, 0})), NumericError);
}

TEST(G2, CoherentMixturesAreAtLeastOne) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + uniform_index(rng, 4);
    std::vector<double> p(60, 0.0);
    double wsum = 0.0;
    for (int c = 0; c < k; ++c) {
      const double w = uniform01(rng) + 0.01, mean = 3.0 * uniform01(rng) + 0.01;
      wsum += w;
      for (int n = 0; n < 60; ++n) p[n] += w * oracle::poisson_probability(mean, n);
    }
    for (double& x : p) x /= wsum;
    EXPECT_GE(g2(CountHistogram(p)), 1.0 - 1e-9) << trial;
  }
}

TEST(Schmidt, Examples) {
  EXPECT_DOUBLE_EQ(schmidt_modes(2.0), 1.0);
  EXPECT_NEAR(schmidt_modes(1.95), 1.0526, 1e-4);
  EXPECT_NEAR(schmidt_modes(1.95), 1.05, 0.03);
  EXPECT_DOUBLE_EQ(schmidt_modes(1.5), 2.0);
  EXPECT_THROW(schmidt_modes(1.0), NumericError);
  EXPECT_THROW(schmidt_modes(0.7), NumericError);
  for (double k = 1.0; k <= 10.0; k += 0.25) EXPECT_NEAR(schmidt_modes(1.0 + 1.0 / k), k, 1e-12);
}

TEST(HomPolarization, Examples) {
  EXPECT_DOUBLE_EQ(hom_visibility_polarization(1000, 0), 1.0);
  EXPECT_DOUBLE_EQ(hom_visibility_polarization(1000, 500), 0.0);
  EXPECT_NEAR(hom_visibility_polarization(1000, 18.5), 0.963, 1e-12);
  EXPECT_THROW(hom_visibility_polarization(0, 0), ConfigError);
}

TEST(Multiphoton, Limits) {
  const auto z = multiphoton_correction(500, 1e-9, 0.4, 0.1, 1e6);
  EXPECT_LT(z.false_counts, 1e-18);
  EXPECT_NEAR(z.corrected, 500 / 1e-18, 1e-6 * 500 / 1e-18);
  EXPECT_EQ(multiphoton_correction(500, 0.1, 1.0, 0.1, 1e9).false_counts, 0.0);
  const auto h = multiphoton_correction(5000, 0.1, 0.4, 0.1, 1e9, 0.04);
  EXPECT_NEAR(h.corrected, (5000 - h.false_counts) / (0.04 * 0.04), 1e-9);
  EXPECT_THROW(multiphoton_correction(-1, 0.1, 0.4, 0.1, 1), ConfigError);
  EXPECT_THROW(multiphoton_correction(1, 0.1, 1.4, 0.1, 1), ConfigError);
  EXPECT_THROW(multiphoton_correction(1, 0.0, 0.4, 0.1, 1), NumericError);
}

TEST(Multiphoton, ClampsNegative) {
  const auto c = multiphoton_correction(0.0, 0.1, 0.4, 0.1, 1e9);
  EXPECT_TRUE(c.clamped);
  EXPECT_EQ(c.corrected, 0.0);
}

TEST(Multiphoton, LinearInCoincidences) {
  const double nf = multiphoton_correction(0, 0.05, 0.4, 0.1, 1e9).false_counts;
  auto f = [](double nc) { return multiphoton_correction(nc, 0.05, 0.4, 0.1, 1e9).corrected; };
  const double a = nf + 100, b = nf + 350;
  EXPECT_NEAR(f(2 * a + 3 * b), 2 * f(a) + 3 * f(b) + 4 * nf / (0.05 * 0.05), 1e-6 * f(b));
  EXPECT_NEAR(f(b) - f(a), 250 / (0.05 * 0.05), 1e-6);
}

// Probability that photons a (input 1) and b (input 2) exit a 50:50 splitter as one photon per port.
double splitter_one_one(int a, int b, bool distinguishable) {
  if (a + b != 2) return 0.0;
  if (a == 1 && b == 1) return distinguishable ? 0.5 : 0.0;
  ComplexMatrix u(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  u << s, s, s, -s;
  const int row = a == 2 ? 0 : 1;
  ComplexMatrix sub(2, 2);
  sub << u(row, 0), u(row, 1), u(row, 0), u(row, 1);
  return std::norm(oracle::permanent_ryser(sub)) / 2.0;
}

TEST(Multiphoton, MonteCarloOfPairConfigurations) {
  const double eta_h = 0.4, eta_s = 0.1, mean = 0.1;
  Rng rng(7);
  std::bernoulli_distribution keep_h(eta_h), keep_s(eta_s);
  const int trials = 2000000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const int pairs1 = t % 2 ? 2 : 1, pairs2 = 3 - pairs1;
    int h1 = 0, h2 = 0, s1 = 0, s2 = 0;
    for (int k = 0; k < pairs1; ++k) {
      h1 += keep_h(rng);
      s1 += keep_s(rng);
    }
    for (int k = 0; k < pairs2; ++k) {
      h2 += keep_h(rng);
      s2 += keep_s(rng);
    }
    if (h1 != 1 || h2 != 1) continue;
    hits += uniform01(rng) < splitter_one_one(s1, s2, false);
  }
  // Each configuration occurs with probability about mean^3 per trigger.
  const double n_t = 1e9;
  const double simulated = 2.0 * mean * mean * mean * n_t * hits / trials;
  const double formula = multiphoton_correction(0, mean, eta_h, eta_s, n_t).false_counts;
  // The closed form counts one of the two herald photons in the doubled arm; the simulation counts both.
  EXPECT_NEAR(simulated / formula, 2.0, 0.2);
}

TEST(Dispersion, Examples) {
  const double tau = 1e-12, gvd = -26e-30 / 1e-3;
  EXPECT_NEAR(dispersion_visibility(tau, gvd, 18.0), 0.974, 1e-3);
  EXPECT_DOUBLE_EQ(dispersion_visibility(tau, gvd, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(dispersion_visibility(tau, gvd, 18.0), dispersion_visibility(tau, gvd, -18.0));
  EXPECT_THROW(dispersion_visibility(0.0, gvd, 1.0), ConfigError);
  double prev = 1.0;
  for (double l = 0.0; l < 5000.0; l += 50.0) {
    const double v = dispersion_visibility(tau, gvd, l);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Klyshko, Examples) {
  const auto k = klyshko({{100, 50}, {100, 200}, {100, 400}});
  EXPECT_DOUBLE_EQ(k[0].eta_signal, 1.0);
  EXPECT_DOUBLE_EQ(k[0].eta_herald, 1.0);
  EXPECT_FALSE(k[0].unphysical);
  EXPECT_DOUBLE_EQ(k[1].eta_signal, 0.25);
  EXPECT_DOUBLE_EQ(k[1].eta_herald, 0.125);
  EXPECT_NEAR(k[1].eta_signal_sigma, 0.25 * std::sqrt(1.0 / 50 + 1.0 / 200), 1e-15);
  EXPECT_TRUE(klyshko({{10}, {5}, {20}})[0].unphysical);
  EXPECT_THROW(klyshko({{1}, {0}, {1}}), NumericError);
  EXPECT_THROW(klyshko({{1, 1}, {1}, {1, 1}}), DimensionError);
}

TEST(Klyshko, PhysicalInputsGiveUnitInterval) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const double h = 1 + uniform_index(rng, 1000), s = 1 + uniform_index(rng, 1000);
    const double c = uniform_index(rng, static_cast<int>(std::min(h, s)) + 1);
    const auto k = klyshko({{c}, {h}, {s}})[0];
    EXPECT_FALSE(k.unphysical);
    EXPECT_GE(k.eta_signal, 0.0);
    EXPECT_LE(k.eta_signal, 1.0);
    EXPECT_GE(k.eta_herald, 0.0);
    EXPECT_LE(k.eta_herald, 1.0);
  }
}

TEST(Klyshko, RecoversSampledEfficiencies) {
  ExperimentConfig cfg;
  cfg.modes = 2;
  cfg.squeezers.assign(2, {0.1, 0.0});
  cfg.unitary = UnitaryMatrix::identity(2);
  cfg.eta_signal.assign(2, 0.087);
  cfg.eta_herald.assign(2, 0.384);
  cfg.schedule.pattern = {Regime::SBS};
  const auto ks = klyshko(klyshko_counts(draw_samples(cfg, 1000000, 9)));
  for (const auto& k : ks) {
    EXPECT_NEAR(k.eta_signal, 0.087, 3 * k.eta_signal_sigma);
    EXPECT_NEAR(k.eta_herald, 0.384, 3 * k.eta_herald_sigma);
  }
}

TEST(Klyshko, AverageOfSpreadModes) {
  const std::vector<double> eta{0.066, 0.072, 0.078, 0.084, 0.090, 0.096, 0.096, 0.114};
  KlyshkoCounts in;
  for (double e : eta) {
    in.herald_singles.push_back(1e6);
    in.coincidences.push_back(e * 1e6);
    in.signal_singles.push_back(e * 1e6 / 0.384);
  }
  const auto ks = klyshko(in);
  double mean = 0.0;
  for (const auto& k : ks) mean += k.eta_signal / ks.size();
  double var = 0.0;
  for (const auto& k : ks) var += (k.eta_signal - mean) * (k.eta_signal - mean) / (ks.size() - 1);
  EXPECT_NEAR(mean, 0.087, 1e-9);
  EXPECT_NEAR(std::sqrt(var), 0.015, 1e-3);
  for (const auto& k : ks) EXPECT_NEAR(k.eta_herald, 0.384, 1e-9);
}

TEST(Squeezing, Examples) {
  const auto e = reconstruct_squeezing(std::vector<double>(8, 0.031 * 0.384), std::vector<double>(8, 0.384));
  EXPECT_NEAR(e.r, 0.176, 2e-3);
  EXPECT_NEAR(e.n_gen, 0.031, 1e-12);
  const double n1 = std::sinh(1.0) * std::sinh(1.0);
  const auto one = reconstruct_squeezing({n1}, {1.0});
  EXPECT_NEAR(one.r, 1.0, 1e-12);
  EXPECT_NEAR(one.db, 8.686, 1e-3);
  EXPECT_DOUBLE_EQ(reconstruct_squeezing({0.3, 0.7}, {1.0, 1.0}).n_gen_per_mode[1], 0.7);
  EXPECT_THROW(reconstruct_squeezing({0.3}, {0.0}), NumericError);
  EXPECT_THROW(reconstruct_squeezing({0.3}, {0.5, 0.5}), DimensionError);
}

TEST(Squeezing, UncertaintyMatchesFiniteDifference) {
  const double n = 0.05, eta = 0.087, sn = 1e-4;
  const auto e = reconstruct_squeezing({n}, {eta}, {sn});
  const double d = (std::asinh(std::sqrt((n + 1e-7) / eta)) - std::asinh(std::sqrt((n - 1e-7) / eta))) / 2e-7;
  EXPECT_NEAR(e.r_sigma, d * sn, 1e-6 * d * sn);
  EXPECT_NEAR(e.n_gen_sigma, sn / eta, 1e-15);
}

// Heralded single-photon HOM coincidences from permanents of the splitter for an overlap s.
double hom_coincidence(double overlap) {
  ComplexMatrix u(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  u << s, s, s, -s;
  const double ind = std::norm(oracle::permanent_ryser(u));
  const double dist = oracle::permanent_ryser(ComplexMatrix(u.cwiseAbs2().cast<cplx>())).real();
  return overlap * ind + (1.0 - overlap) * dist;
}

std::vector<HomPoint> hom_data(double k_modes, double center, double width, double scale, bool distinguishable = false) {
  std::vector<HomPoint> pts;
  for (int i = -12; i <= 12; ++i) {
    const double x = center + 0.25 * i;
    const double overlap = distinguishable ? 0.0 : std::exp(-0.5 * std::pow((x - center) / width, 2)) / k_modes;
    pts.push_back({x, scale * hom_coincidence(overlap)});
  }
  return pts;
}

TEST(HomScan, IndistinguishablePhotons) {
  const HomFit f = hom_scan(hom_data(1.0, 0.3, 0.6, 1000));
  EXPECT_NEAR(f.visibility, 1.0, 1e-6);
  EXPECT_NEAR(f.center, 0.3, 1e-6);
  EXPECT_NEAR(f.width, 0.6, 1e-6);
  EXPECT_NEAR(f.baseline, 500, 1e-3);
}

TEST(HomScan, SchmidtLimitedVisibility) {
  const HomFit f = hom_scan(hom_data(1.05, -0.4, 0.5, 2000));
  EXPECT_NEAR(f.visibility, 1.0 / 1.05, 1e-6);
  EXPECT_NEAR(f.visibility, 0.952, 1e-3);
}

TEST(HomScan, DistinguishablePhotonsAreFlat) {
  const HomFit f = hom_scan(hom_data(1.0, 0.0, 0.5, 1000, true));
  EXPECT_TRUE(f.flat);
  EXPECT_EQ(f.visibility, 0.0);
}

TEST(HomScan, Errors) {
  auto pts = hom_data(1.0, 0.0, 0.5, 1000);
  pts.resize(4);
  EXPECT_THROW(hom_scan(pts), ConfigError);
  EXPECT_THROW(hom_scan(std::vector<HomPoint>(6, {0.0, 0.0})), NumericError);
}

TEST(HomScan, FixedWidthAndNoise) {
  auto pts = hom_data(1.1, 0.1, 0.5, 20000);
  Rng rng(10);
  for (auto& p : pts) p.coincidences = std::poisson_distribution<int>(p.coincidences)(rng);
  HomFitOptions opt;
  opt.fixed_width = 0.5;
  const HomFit f = hom_scan(pts, opt);
  EXPECT_EQ(f.width, 0.5);
  EXPECT_NEAR(f.visibility, 1.0 / 1.1, 0.02);
  EXPECT_NEAR(f.center, 0.1, 0.02);
}

TEST(HomScan, CorrectionRemovesFalseCoincidences) {
  const HomCorrection c{0.05, 0.4, 0.1, 1e9};
  const double nf = multiphoton_correction(0, c.mean_n, c.eta_h, c.eta_s, c.n_t).false_counts;
  auto pts = hom_data(1.0, 0.0, 0.5, 1000);
  for (auto& p : pts) p.coincidences += nf;
  const HomFit raw = hom_scan(pts);
  HomFitOptions opt;
  opt.correction = c;
  const HomFit fixed = hom_scan(pts, opt);
  EXPECT_LT(raw.visibility, 0.99);
  EXPECT_NEAR(fixed.visibility, 1.0, 1e-6);
}

}  // namespace
}  // namespace bsamp
