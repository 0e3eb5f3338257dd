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
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsamp/error.hpp"
#include "bsamp/sampler/records.hpp"

namespace bsamp {

// Photon-number histogram indexed by n = 0..cutoff. Holds raw counts or probabilities.
class CountHistogram {
 public:
  CountHistogram() = default;
  explicit CountHistogram(std::vector<double> counts) : counts_(std::move(counts)) {
    for (double c : counts_) {
      if (!std::isfinite(c) || c < 0.0) throw ConfigError("histogram: counts must be finite and non-negative");
    }
  }

  static CountHistogram from_samples(const std::vector<int>& ns) {
    std::vector<double> c;
    for (int n : ns) {
      if (n < 0) throw ConfigError("histogram: negative photon number");
      if (n >= static_cast<int>(c.size())) c.resize(n + 1, 0.0);
      c[n] += 1.0;
    }
    return CountHistogram(std::move(c));
  }

  int cutoff() const { return static_cast<int>(counts_.size()) - 1; }
  const std::vector<double>& counts() const { return counts_; }
  double total() const { return std::accumulate(counts_.begin(), counts_.end(), 0.0); }

  std::vector<double> normalized() const {
    const double t = total();
    if (t <= 0.0) throw NumericError("histogram: empty");
    std::vector<double> p(counts_);
    for (double& x : p) x /= t;
    return p;
  }

  double mean() const {
    const auto p = normalized();
    double m = 0.0;
    for (size_t n = 0; n < p.size(); ++n) m += n * p[n];
    return m;
  }

  double tail_mass() const { return counts_.empty() ? 0.0 : normalized().back(); }

 private:
  std::vector<double> counts_;
};

inline constexpr double kTailWarningMass = 1e-3;

struct G2Result {
  double value = 0.0;
  double tail_mass = 0.0;
  bool tail_warning = false;
};

inline G2Result g2_checked(const CountHistogram& h) {
  const auto p = h.normalized();
  double m1 = 0.0, m2 = 0.0;
  for (size_t n = 0; n < p.size(); ++n) {
    m1 += n * p[n];
    m2 += n * (n - 1.0) * p[n];
  }
  if (m1 <= 0.0) throw NumericError("g2: zero mean photon number");
  G2Result r;
  r.value = m2 / (m1 * m1);
  r.tail_mass = p.back();
  r.tail_warning = r.tail_mass > kTailWarningMass;
  return r;
}

inline double g2(const CountHistogram& h) { return g2_checked(h).value; }

inline double schmidt_modes(double g2_value) {
  if (!(g2_value > 1.0)) throw NumericError("schmidt_modes: g2 must exceed 1");
  return 1.0 / (g2_value - 1.0);
}

inline double hom_visibility_polarization(double n_max, double n_min) {
  if (!(n_max > 0.0)) throw ConfigError("hom_visibility_polarization: n_max must be positive");
  return (0.5 * n_max - n_min) / (0.5 * n_max);
}

struct MultiphotonCorrection {
  double false_counts = 0.0;
  double corrected = 0.0;
  bool clamped = false;
};

// Removes false four-folds from two-plus-one pair events and normalizes by the squared herald mean.
// herald_mean defaults to mean_n.
inline MultiphotonCorrection multiphoton_correction(double n_c, double mean_n, double eta_h, double eta_s,
                                                    double n_t, std::optional<double> herald_mean = std::nullopt) {
  if (n_c < 0 || mean_n < 0 || n_t < 0) throw ConfigError("multiphoton_correction: inputs must be non-negative");
  if (eta_h < 0 || eta_h > 1 || eta_s < 0 || eta_s > 1) {
    throw ConfigError("multiphoton_correction: efficiencies must lie in [0,1]");
  }
  const double norm = herald_mean.value_or(mean_n);
  if (!(norm > 0.0)) throw NumericError("multiphoton_correction: herald mean photon number must be positive");
  MultiphotonCorrection out;
  out.false_counts = (1 - eta_h) * (1 - eta_s) * eta_h * eta_h * eta_s * eta_s * mean_n * mean_n * mean_n * n_t;
  double diff = n_c - out.false_counts;
  if (diff < 0.0) {
    diff = 0.0;
    out.clamped = true;
  }
  out.corrected = diff / (norm * norm);
  return out;
}

// Intensity visibility after dispersive broadening. SI units: s, s^2/m, m.
inline double dispersion_visibility(double tau0, double gvd, double delta_l) {
  if (!(tau0 > 0.0)) throw ConfigError("dispersion_visibility: tau0 must be positive");
  const double t2 = tau0 * tau0;
  const double b = gvd * delta_l / 2.0;
  return t2 / std::sqrt(t2 * t2 + b * b);
}

struct KlyshkoMode {
  double eta_signal = 0.0;
  double eta_signal_sigma = 0.0;
  double eta_herald = 0.0;
  double eta_herald_sigma = 0.0;
  bool unphysical = false;
};

struct KlyshkoCounts {
  std::vector<double> coincidences;
  std::vector<double> herald_singles;
  std::vector<double> signal_singles;
};

inline std::vector<KlyshkoMode> klyshko(const KlyshkoCounts& k) {
  const size_t m = k.coincidences.size();
  if (k.herald_singles.size() != m || k.signal_singles.size() != m) {
    throw DimensionError("klyshko: count vectors differ in length");
  }
  std::vector<KlyshkoMode> out(m);
  for (size_t i = 0; i < m; ++i) {
    const double c = k.coincidences[i], h = k.herald_singles[i], s = k.signal_singles[i];
    if (c < 0) throw ConfigError("klyshko: negative coincidences in mode " + std::to_string(i));
    if (!(h > 0) || !(s > 0)) throw NumericError("klyshko: zero singles in mode " + std::to_string(i));
    auto& o = out[i];
    o.eta_signal = c / h;
    o.eta_herald = c / s;
    const double rc = c > 0 ? 1.0 / c : 0.0;
    o.eta_signal_sigma = o.eta_signal * std::sqrt(rc + 1.0 / h);
    o.eta_herald_sigma = o.eta_herald * std::sqrt(rc + 1.0 / s);
    o.unphysical = c > std::min(h, s);
  }
  return out;
}

// Click-based singles and coincidences per mode from heralded records.
inline KlyshkoCounts klyshko_counts(const std::vector<SampleRecord>& records) {
  KlyshkoCounts k;
  for (const auto& r : records) {
    const size_t m = r.signal.counts.size();
    if (r.herald.counts.size() != m) throw DimensionError("klyshko_counts: herald and signal widths differ");
    if (k.coincidences.empty()) {
      k.coincidences.assign(m, 0.0);
      k.herald_singles.assign(m, 0.0);
      k.signal_singles.assign(m, 0.0);
    } else if (k.coincidences.size() != m) {
      throw DimensionError("klyshko_counts: inconsistent mode count");
    }
    for (size_t i = 0; i < m; ++i) {
      const bool h = r.herald[i] > 0, s = r.signal[i] > 0;
      k.herald_singles[i] += h;
      k.signal_singles[i] += s;
      k.coincidences[i] += h && s;
    }
  }
  return k;
}

struct SqueezingEstimate {
  double r = 0.0;
  double r_sigma = 0.0;
  double db = 0.0;
  double db_sigma = 0.0;
  double n_gen = 0.0;
  double n_gen_sigma = 0.0;
  std::vector<double> n_gen_per_mode;
};

inline constexpr double kDbPerNeper = 8.685889638065035;  // 20 log10(e)

// Uncertainty vectors may be empty (treated as exact).
inline SqueezingEstimate reconstruct_squeezing(const std::vector<double>& measured_means,
                                               const std::vector<double>& eta_herald,
                                               const std::vector<double>& means_sigma = {},
                                               const std::vector<double>& eta_sigma = {}) {
  const size_t m = measured_means.size();
  if (m == 0) throw ConfigError("reconstruct_squeezing: no modes");
  if (eta_herald.size() != m) throw DimensionError("reconstruct_squeezing: efficiency count mismatch");
  if ((!means_sigma.empty() && means_sigma.size() != m) || (!eta_sigma.empty() && eta_sigma.size() != m)) {
    throw DimensionError("reconstruct_squeezing: uncertainty count mismatch");
  }
  SqueezingEstimate e;
  double var_r = 0.0, var_n = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (!(eta_herald[i] > 0.0)) throw NumericError("reconstruct_squeezing: zero efficiency in mode " + std::to_string(i));
    if (measured_means[i] < 0.0) throw ConfigError("reconstruct_squeezing: negative mean photon number");
    const double n = measured_means[i] / eta_herald[i];
    const double sn = means_sigma.empty() ? 0.0 : means_sigma[i] / eta_herald[i];
    const double se = eta_sigma.empty() ? 0.0 : n * eta_sigma[i] / eta_herald[i];
    const double sig_n2 = sn * sn + se * se;
    e.n_gen_per_mode.push_back(n);
    e.n_gen += n / m;
    e.r += std::asinh(std::sqrt(n)) / m;
    var_n += sig_n2 / (m * m);
    if (n > 0.0) {
      const double d = 1.0 / (2.0 * std::sqrt(n * (1.0 + n)));
      var_r += d * d * sig_n2 / (m * m);
    }
  }
  e.r_sigma = std::sqrt(var_r);
  e.n_gen_sigma = std::sqrt(var_n);
  e.db = kDbPerNeper * e.r;
  e.db_sigma = kDbPerNeper * e.r_sigma;
  return e;
}

struct HomPoint {
  double delay = 0.0;
  double coincidences = 0.0;
};

struct HomCorrection {
  double mean_n = 0.0;
  double eta_h = 0.0;
  double eta_s = 0.0;
  double n_t = 0.0;
};

struct HomFitOptions {
  std::optional<double> fixed_width;
  std::optional<HomCorrection> correction;
  int max_iterations = 200;
};

struct HomFit {
  double visibility = 0.0;
  double center = 0.0;
  double width = 0.0;
  double baseline = 0.0;
  double rms_residual = 0.0;
  bool flat = false;
  int iterations = 0;
};

namespace detail {

// y = b (1 - v exp(-(x - c)^2 / (2 w^2)))
inline double hom_model(const Eigen::Vector4d& p, double x) {
  const double z = (x - p[2]) / p[3];
  return p[0] * (1.0 - p[1] * std::exp(-0.5 * z * z));
}

inline Eigen::Vector4d hom_gradient(const Eigen::Vector4d& p, double x) {
  const double z = (x - p[2]) / p[3];
  const double g = std::exp(-0.5 * z * z);
  Eigen::Vector4d d;
  d[0] = 1.0 - p[1] * g;
  d[1] = -p[0] * g;
  d[2] = -p[0] * p[1] * g * z / p[3];
  d[3] = -p[0] * p[1] * g * z * z / p[3];
  return d;
}

}  // namespace detail

inline constexpr int kHomMinPoints = 5;

inline HomFit hom_scan(std::vector<HomPoint> points, const HomFitOptions& opt = {}) {
  if (static_cast<int>(points.size()) < kHomMinPoints) {
    throw ConfigError("hom_scan: need at least " + std::to_string(kHomMinPoints) + " delay points");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.delay) || !std::isfinite(p.coincidences)) throw NumericError("hom_scan: non-finite input");
  }
  if (opt.correction) {
    const auto& c = *opt.correction;
    for (auto& p : points) p.coincidences = multiphoton_correction(p.coincidences, c.mean_n, c.eta_h, c.eta_s, c.n_t).corrected;
  }
  std::sort(points.begin(), points.end(), [](const HomPoint& a, const HomPoint& b) { return a.delay < b.delay; });
  const int n = static_cast<int>(points.size());

  double ymax = 0.0, ymin = std::numeric_limits<double>::infinity();
  int imin = 0;
  double mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    ymax = std::max(ymax, points[i].coincidences);
    if (points[i].coincidences < ymin) {
      ymin = points[i].coincidences;
      imin = i;
    }
    mean_y += points[i].coincidences / n;
  }
  if (ymax <= 0.0) throw NumericError("hom_scan: all coincidence counts are zero");
  const double span = points.back().delay - points.front().delay;
  if (!(span > 0.0)) throw NumericError("hom_scan: delay settings are all equal");

  HomFit fit;
  if (ymax - ymin <= 1e-12 * ymax) {
    fit.flat = true;
    fit.baseline = mean_y;
    fit.center = points[imin].delay;
    fit.width = opt.fixed_width.value_or(span);
    return fit;
  }

  // Baseline from the outer quarter of the scan on each side.
  double base = 0.0;
  int nb = 0;
  for (int i = 0; i < n; ++i) {
    if (i < std::max(1, n / 4) || i >= n - std::max(1, n / 4)) {
      base += points[i].coincidences;
      ++nb;
    }
  }
  base /= nb;
  if (base <= ymin) base = ymax;
  Eigen::Vector4d p;
  p << base, 1.0 - ymin / base, points[imin].delay, opt.fixed_width.value_or(span / 6.0);
  const bool free_width = !opt.fixed_width.has_value();
  const int np = free_width ? 4 : 3;

  auto cost = [&](const Eigen::Vector4d& q) {
    double s = 0.0;
    for (const auto& pt : points) {
      const double r = pt.coincidences - detail::hom_model(q, pt.delay);
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double current = cost(p);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (const auto& pt : points) {
      Eigen::Vector4d g = detail::hom_gradient(p, pt.delay);
      if (!free_width) g[3] = 0.0;
      const double r = pt.coincidences - detail::hom_model(p, pt.delay);
      jtj += g * g.transpose();
      jtr += g * r;
    }
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd a = jtj.topLeftCorner(np, np);
      for (int k = 0; k < np; ++k) a(k, k) += lambda * std::max(a(k, k), 1e-30);
      const Eigen::VectorXd step = a.ldlt().solve(jtr.head(np));
      Eigen::Vector4d trial = p;
      trial.head(np) += step;
      trial[3] = std::abs(trial[3]);
      const double c = cost(trial);
      if (std::isfinite(c) && c < current) {
        const double rel = (current - c) / std::max(current, 1e-300);
        p = trial;
        current = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (rel < 1e-14) it = opt.max_iterations;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  if (!p.allFinite() || p[0] <= 0.0) throw NumericError("hom_scan: fit did not converge");
  fit.baseline = p[0];
  fit.visibility = p[1];
  fit.center = p[2];
  fit.width = p[3];
  fit.rms_residual = std::sqrt(current / n);
  fit.iterations = std::min(it + 1, opt.max_iterations);
  return fit;
}

}  // namespace bsamp
