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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/combinatorics.hpp"
#include "bsamp/numerics/rng.hpp"
#include "bsamp/states/fock.hpp"

namespace bsamp {

inline PhotonPattern apply_pnr_truncation(const PhotonPattern& pattern, int cutoff) {
  if (cutoff < 1) throw ConfigError("apply_pnr_truncation: cutoff must be >= 1");
  PhotonPattern out = pattern;
  for (int& c : out.counts) c = std::min(c, cutoff);
  return out;
}

// P(k | n, d) = C(d,k) S(n,k) k! / d^n: k distinct detectors hit by n photons.
inline std::vector<double> blinding_distribution(int n, int d) {
  if (d < 1) throw ConfigError("blinding_distribution: need at least one detector");
  if (n < 0 || n > kStirlingMaxN) throw CapacityError("blinding_distribution: n outside [0, 30]");
  const int kmax = std::min(n, d);
  std::vector<double> p(kmax + 1, 0.0);
  if (n == 0) {
    p[0] = 1.0;
    return p;
  }
  const double log_dn = n * std::log(static_cast<double>(d));
  for (int k = 1; k <= kmax; ++k) {
    const double s = to_double(stirling2(n, k));
    if (s == 0.0) continue;
    p[k] = std::exp(std::log(binomial(d, k)) + std::log(s) + log_factorial(k) - log_dn);
  }
  return p;
}

struct HeraldDetectorModel {
  int detectors = 16;
  int pulses_per_train = 8;
  double efficiency = 0.4;
  bool blinding_enabled = false;

  void validate() const {
    if (detectors < 1) throw ConfigError("herald_detector.detectors must be >= 1");
    if (pulses_per_train < 1) throw ConfigError("herald_detector.pulses_per_train must be >= 1");
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("herald efficiency outside [0,1]");
  }
};

// Thermal law P(n) = <n>^n / (1+<n>)^{n+1} on 0..n_max.
inline std::vector<double> thermal_law(double mean, int n_max) {
  std::vector<double> p(n_max + 1);
  for (int n = 0; n <= n_max; ++n) p[n] = std::pow(mean, n) / std::pow(1.0 + mean, n + 1);
  return p;
}

namespace detail {

// P(j unblinded among k distinct hit detectors), with u of the d detectors unblinded.
inline double hypergeometric(int j, int k, int u, int d) {
  if (j < 0 || j > k || j > u || k - j > d - u) return 0.0;
  return binomial(u, j) * binomial(d - u, k - j) / binomial(d, k);
}

// Row l of the per-pulse response for n incident photons and b blinded detectors.
inline std::vector<double> pulse_response(int n, int b, const HeraldDetectorModel& m) {
  const int d = m.detectors;
  const std::vector<double> hit = blinding_distribution(n, d);
  std::vector<double> out(std::min(n, d) + 1, 0.0);
  for (int k = 0; k < static_cast<int>(hit.size()); ++k) {
    if (hit[k] == 0.0) continue;
    for (int j = 0; j <= k; ++j) {
      const double pj = hypergeometric(j, k, d - b, d);
      if (pj == 0.0) continue;
      for (int l = 0; l <= j; ++l) {
        out[l] += hit[k] * pj * binomial(j, l) * std::pow(m.efficiency, l) * std::pow(1.0 - m.efficiency, j - l);
      }
    }
  }
  return out;
}

inline int thermal_truncation(double mean) {
  if (mean <= 0.0) return 0;
  const double ratio = mean / (1.0 + mean);
  const int n = static_cast<int>(std::ceil(std::log(1e-12) / std::log(ratio)));
  return std::clamp(n, 1, kStirlingMaxN);
}

}  // namespace detail

// Columns indexed by input n, rows by detected m; each column sums to 1.
// Blinded detectors from earlier pulses of the train stay blinded.
inline std::vector<std::vector<double>> herald_assignment_matrix(const HeraldDetectorModel& model,
                                                                 double mean_photons, int pulse_index) {
  model.validate();
  if (pulse_index < 0 || pulse_index >= model.pulses_per_train) {
    throw ConfigError("herald_assignment_matrix: pulse_index outside the train");
  }
  if (!(mean_photons >= 0.0)) throw ConfigError("herald_assignment_matrix: negative mean");
  const int d = model.detectors;
  const int n_max = detail::thermal_truncation(mean_photons);
  std::vector<double> source = thermal_law(mean_photons, n_max);
  double mass = 0.0;
  for (double p : source) mass += p;
  for (double& p : source) p /= mass;

  // Distribution of blinded detector count before each pulse.
  std::vector<double> blinded(d + 1, 0.0);
  blinded[0] = 1.0;
  for (int pulse = 0; pulse < pulse_index; ++pulse) {
    std::vector<double> next(d + 1, 0.0);
    for (int b = 0; b <= d; ++b) {
      if (blinded[b] == 0.0) continue;
      for (int n = 0; n <= n_max; ++n) {
        const std::vector<double> resp = detail::pulse_response(n, b, model);
        for (int l = 0; l < static_cast<int>(resp.size()); ++l) {
          if (b + l <= d) next[b + l] += blinded[b] * source[n] * resp[l];
        }
      }
    }
    blinded = next;
  }

  std::vector<std::vector<double>> out(n_max + 1, std::vector<double>(n_max + 1, 0.0));
  for (int n = 0; n <= n_max; ++n) {
    for (int b = 0; b <= d; ++b) {
      if (blinded[b] == 0.0) continue;
      const std::vector<double> resp = detail::pulse_response(n, b, model);
      for (int l = 0; l < static_cast<int>(resp.size()); ++l) out[l][n] += blinded[b] * resp[l];
    }
  }
  return out;
}

// Sum_n P_thermal(n) (1 - P(n|n)) at a given pulse.
inline double misassignment_probability(const HeraldDetectorModel& model, double mean_photons, int pulse_index) {
  const auto matrix = herald_assignment_matrix(model, mean_photons, pulse_index);
  const int n_max = static_cast<int>(matrix.size()) - 1;
  const std::vector<double> source = thermal_law(mean_photons, n_max);
  double err = 0.0;
  for (int n = 0; n <= n_max; ++n) err += source[n] * (1.0 - matrix[n][n]);
  return err;
}

inline double worst_pulse_misassignment(const HeraldDetectorModel& model, double mean_photons) {
  double worst = 0.0;
  for (int p = 0; p < model.pulses_per_train; ++p) {
    worst = std::max(worst, misassignment_probability(model, mean_photons, p));
  }
  return worst;
}

// Ceiling on the misassignment probability when only n = 0 is always right: 1 - P_thermal(0).
inline double misassignment_ceiling(double mean_photons) { return mean_photons / (1.0 + mean_photons); }

// Monte Carlo of one multiplexed herald detector over a pulse train.
class HeraldDetectorState {
 public:
  explicit HeraldDetectorState(const HeraldDetectorModel& m) : model_(m), blinded_(m.detectors, false) {}

  void reset() {
    std::fill(blinded_.begin(), blinded_.end(), false);
  }

  int detect(int photons, Rng& rng) {
    hit_.assign(model_.detectors, false);
    for (int i = 0; i < photons; ++i) hit_[uniform_index(rng, model_.detectors)] = true;
    int clicks = 0;
    for (int k = 0; k < model_.detectors; ++k) {
      if (!hit_[k] || blinded_[k]) continue;
      if (uniform01(rng) < model_.efficiency) {
        ++clicks;
        blinded_[k] = true;
      }
    }
    return clicks;
  }

 private:
  HeraldDetectorModel model_;
  std::vector<bool> blinded_;
  std::vector<bool> hit_;
};

struct ExtinctionRatio {
  double db = 0.0;
  bool infinite = false;
};

// 10 log10(counts(0) / sum of off-time counts); zero off-time counts give +inf, flagged.
inline ExtinctionRatio extinction_ratio(const std::map<int, double>& counts_by_delay) {
  const auto on = counts_by_delay.find(0);
  if (on == counts_by_delay.end() || !(on->second > 0.0)) {
    throw ConfigError("extinction_ratio: on-time bin missing or empty");
  }
  double off = 0.0;
  for (const auto& [delay, c] : counts_by_delay) {
    if (c < 0.0) throw ConfigError("extinction_ratio: negative counts");
    if (delay != 0) off += c;
  }
  if (off == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {10.0 * std::log10(on->second / off), false};
}

}  // namespace bsamp
