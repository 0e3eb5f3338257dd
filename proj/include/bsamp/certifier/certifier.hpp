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
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <thread>
#include <unordered_map>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/eigen.hpp"
#include "bsamp/numerics/matrix.hpp"
#include "bsamp/numerics/rng.hpp"
#include "bsamp/sampler/config.hpp"
#include "bsamp/sampler/records.hpp"
#include "bsamp/states/fock.hpp"

namespace bsamp {

struct PatternHash {
  size_t operator()(const PhotonPattern& p) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int c : p.counts) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

// Raw first and second moment sums plus the pattern histogram used for resampling.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int modes = 0) : modes_(modes), sum_n_(modes, 0), sum_nn_(modes * modes, 0) {}

  int modes() const { return modes_; }
  std::int64_t shot_count() const { return n_; }
  std::int64_t sum_n(int j) const { return sum_n_[j]; }
  std::int64_t sum_nn(int j, int k) const { return sum_nn_[j * modes_ + k]; }
  const std::unordered_map<PhotonPattern, std::int64_t, PatternHash>& histogram() const { return hist_; }

  void accumulate(const PhotonPattern& p, std::int64_t weight = 1) {
    if (p.size() != modes_) {
      throw DimensionError("MomentAccumulator: pattern length " + std::to_string(p.size()) + " != modes " +
                           std::to_string(modes_));
    }
    n_ += weight;
    for (int j = 0; j < modes_; ++j) {
      if (p[j] == 0) continue;
      sum_n_[j] += weight * p[j];
      for (int k = 0; k < modes_; ++k) sum_nn_[j * modes_ + k] += weight * p[j] * p[k];
    }
    hist_[p] += weight;
  }

  void merge(const MomentAccumulator& other) {
    if (other.modes_ != modes_) throw DimensionError("MomentAccumulator::merge: mode count mismatch");
    n_ += other.n_;
    for (int j = 0; j < modes_; ++j) sum_n_[j] += other.sum_n_[j];
    for (size_t i = 0; i < sum_nn_.size(); ++i) sum_nn_[i] += other.sum_nn_[i];
    for (const auto& [p, c] : other.hist_) hist_[p] += c;
  }

  std::vector<double> means() const {
    std::vector<double> mu(modes_);
    for (int j = 0; j < modes_; ++j) mu[j] = static_cast<double>(sum_n_[j]) / static_cast<double>(n_);
    return mu;
  }

 private:
  int modes_;
  std::int64_t n_ = 0;
  std::vector<std::int64_t> sum_n_;
  std::vector<std::int64_t> sum_nn_;
  std::unordered_map<PhotonPattern, std::int64_t, PatternHash> hist_;
};

// C - B with C_jk = <n_j n_k> - <n_j><n_k>, B = diag<n_j>, plug-in (1/N) moments.
inline SymmetricMatrix criterion_matrix(const MomentAccumulator& acc) {
  if (acc.shot_count() < 2) throw ConfigError("criterion_matrix: need at least 2 shots");
  const int m = acc.modes();
  const double n = static_cast<double>(acc.shot_count());
  const std::vector<double> mu = acc.means();
  RealMatrix c(m, m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) c(j, k) = static_cast<double>(acc.sum_nn(j, k)) / n - mu[j] * mu[k];
    c(j, j) -= mu[j];
  }
  return SymmetricMatrix(c);
}

// Normally ordered (M+1)x(M+1) moment matrix [[1, <n_k>], [<n_j>, <:n_j n_k:>]].
inline SymmetricMatrix moment_matrix(const MomentAccumulator& acc) {
  const int m = acc.modes();
  const double n = static_cast<double>(acc.shot_count());
  const std::vector<double> mu = acc.means();
  RealMatrix out(m + 1, m + 1);
  out(0, 0) = 1.0;
  for (int j = 0; j < m; ++j) {
    out(0, j + 1) = out(j + 1, 0) = mu[j];
    for (int k = 0; k < m; ++k) out(j + 1, k + 1) = static_cast<double>(acc.sum_nn(j, k)) / n - (j == k ? mu[j] : 0.0);
  }
  return SymmetricMatrix(out);
}

struct CriterionResult {
  SymmetricMatrix matrix;
  double min_eigenvalue = 0.0;
  RealVector eigenvector;
  double uncertainty = 0.0;        // 1 sigma: RMS bootstrap spectral deviation of the matrix
  double min_eigenvalue_spread = 0.0;  // standard deviation of bootstrap minimum eigenvalues
  double n_sigma = 0.0;            // |min_eigenvalue| / uncertainty
  std::int64_t shot_count = 0;
  Regime regime = Regime::GBS;
  std::int64_t bin_start = 0;
  std::int64_t bin_end = 0;
  double mean_photons_signal = 0.0;
};

constexpr std::int64_t kMinCertifyShots = 100;
constexpr int kDefaultBootstrapRounds = 200;

namespace detail {

constexpr std::uint64_t kStreamBootstrap = 0x626f6f74ULL;

// Multinomial resample of the histogram via sequential binomials.
inline std::vector<std::int64_t> multinomial_resample(const std::vector<std::int64_t>& counts, std::int64_t n, Rng& rng) {
  std::vector<std::int64_t> out(counts.size(), 0);
  std::int64_t remaining = n;
  double mass = static_cast<double>(n);
  for (size_t i = 0; i < counts.size() && remaining > 0; ++i) {
    if (i + 1 == counts.size()) {
      out[i] = remaining;
      break;
    }
    const double p = std::clamp(static_cast<double>(counts[i]) / mass, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> bin(remaining, p);
    out[i] = bin(rng);
    remaining -= out[i];
    mass -= static_cast<double>(counts[i]);
  }
  return out;
}

inline double spectral_norm(const RealMatrix& d) {
  const Eigensystem es = jacobi_eigensystem(SymmetricMatrix(d));
  return std::max(std::abs(es.values[0]), std::abs(es.values[es.values.size() - 1]));
}

}  // namespace detail

// Minimum eigenvalue of C - B with bootstrap uncertainty; rounds run in parallel with per-round seeds.
inline CriterionResult certify(const MomentAccumulator& acc, int bootstrap_rounds = kDefaultBootstrapRounds,
                               std::uint64_t seed = kDefaultSeed, int threads = 1) {
  if (acc.shot_count() < kMinCertifyShots) {
    throw ConfigError("certify: need at least " + std::to_string(kMinCertifyShots) + " shots, got " +
                      std::to_string(acc.shot_count()));
  }
  if (bootstrap_rounds < 2) throw ConfigError("certify: need at least 2 bootstrap rounds");
  CriterionResult res;
  res.matrix = criterion_matrix(acc);
  const MinEigen me = min_eigenvalue_symmetric(res.matrix);
  res.min_eigenvalue = me.value;
  res.eigenvector = me.vector;
  res.shot_count = acc.shot_count();

  // Patterns in a canonical order so the resample does not depend on hash layout.
  std::vector<std::pair<PhotonPattern, std::int64_t>> entries(acc.histogram().begin(), acc.histogram().end());
  std::sort(entries.begin(), entries.end());
  std::vector<std::int64_t> counts;
  for (const auto& e : entries) counts.push_back(e.second);

  std::vector<double> dev2(bootstrap_rounds);
  std::vector<double> mins(bootstrap_rounds);
  auto round = [&](int r) {
    Rng rng = make_rng(seed, detail::kStreamBootstrap, static_cast<std::uint64_t>(r));
    const std::vector<std::int64_t> w = detail::multinomial_resample(counts, acc.shot_count(), rng);
    MomentAccumulator boot(acc.modes());
    for (size_t i = 0; i < entries.size(); ++i) {
      if (w[i]) boot.accumulate(entries[i].first, w[i]);
    }
    const SymmetricMatrix bm = criterion_matrix(boot);
    mins[r] = min_eigenvalue_symmetric(bm).value;
    const double s = detail::spectral_norm(bm.matrix() - res.matrix.matrix());
    dev2[r] = s * s;
  };
  threads = std::max(1, std::min(threads, bootstrap_rounds));
  if (threads == 1) {
    for (int r = 0; r < bootstrap_rounds; ++r) round(r);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int r = t; r < bootstrap_rounds; r += threads) round(r);
      });
    }
    for (auto& th : pool) th.join();
  }
  double mean_dev2 = 0.0;
  double mean_min = 0.0;
  for (int r = 0; r < bootstrap_rounds; ++r) {
    mean_dev2 += dev2[r];
    mean_min += mins[r];
  }
  mean_dev2 /= bootstrap_rounds;
  mean_min /= bootstrap_rounds;
  double var_min = 0.0;
  for (int r = 0; r < bootstrap_rounds; ++r) var_min += (mins[r] - mean_min) * (mins[r] - mean_min);
  res.uncertainty = std::sqrt(mean_dev2);
  res.min_eigenvalue_spread = std::sqrt(var_min / (bootstrap_rounds - 1));
  res.n_sigma = res.uncertainty > 0 ? std::abs(res.min_eigenvalue) / res.uncertainty
                                    : std::numeric_limits<double>::infinity();
  return res;
}

// SBS criteria use heralds and signals together; GBS and TBS use the signal modes only.
inline PhotonPattern observed_pattern(const SampleRecord& r) {
  if (r.regime != Regime::SBS) return r.signal;
  PhotonPattern p = r.herald;
  p.counts.insert(p.counts.end(), r.signal.counts.begin(), r.signal.counts.end());
  return p;
}

struct PearsonResult {
  double value = 0.0;
  bool defined = false;
  double sigma = 0.0;
};

// Joint histogram of (herald total, signal total).
class PearsonAccumulator {
 public:
  void add(int m, int n, std::int64_t weight = 1) { hist_[{m, n}] += weight; }
  void add(const SampleRecord& r) { add(r.herald.total(), r.signal.total()); }
  const std::map<std::pair<int, int>, std::int64_t>& histogram() const { return hist_; }

  static PearsonResult evaluate(const std::map<std::pair<int, int>, std::int64_t>& hist) {
    double n = 0, sm = 0, sn = 0, smm = 0, snn = 0, smn = 0;
    for (const auto& [k, c] : hist) {
      const double w = static_cast<double>(c);
      n += w;
      sm += w * k.first;
      sn += w * k.second;
      smm += w * k.first * k.first;
      snn += w * k.second * k.second;
      smn += w * k.first * k.second;
    }
    PearsonResult r;
    if (n < 2) return r;
    const double vm = smm / n - (sm / n) * (sm / n);
    const double vn = snn / n - (sn / n) * (sn / n);
    if (!(vm > 0.0) || !(vn > 0.0)) return r;
    r.value = std::clamp((smn / n - (sm / n) * (sn / n)) / std::sqrt(vm * vn), -1.0, 1.0);
    r.defined = true;
    return r;
  }

  PearsonResult result(int bootstrap_rounds = 0, std::uint64_t seed = kDefaultSeed) const {
    PearsonResult r = evaluate(hist_);
    if (!r.defined || bootstrap_rounds < 2) return r;
    std::vector<std::pair<int, int>> keys;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& [k, c] : hist_) {
      keys.push_back(k);
      counts.push_back(c);
      total += c;
    }
    double s = 0, s2 = 0;
    int used = 0;
    for (int b = 0; b < bootstrap_rounds; ++b) {
      Rng rng = make_rng(seed, detail::kStreamBootstrap ^ 0x7065ULL, static_cast<std::uint64_t>(b));
      const auto w = detail::multinomial_resample(counts, total, rng);
      std::map<std::pair<int, int>, std::int64_t> h;
      for (size_t i = 0; i < keys.size(); ++i) {
        if (w[i]) h[keys[i]] = w[i];
      }
      const PearsonResult br = evaluate(h);
      if (!br.defined) continue;
      s += br.value;
      s2 += br.value * br.value;
      ++used;
    }
    if (used > 1) r.sigma = std::sqrt(std::max(0.0, (s2 - s * s / used) / (used - 1)));
    return r;
  }

 private:
  std::map<std::pair<int, int>, std::int64_t> hist_;
};

// Undefined (zero variance) results carry value 0 and defined == false.
inline PearsonResult pearson_measured(const std::vector<SampleRecord>& samples, int bootstrap_rounds = 0,
                                      std::uint64_t seed = kDefaultSeed) {
  PearsonAccumulator acc;
  for (const auto& r : samples) acc.add(r);
  return acc.result(bootstrap_rounds, seed);
}

// Vacuum (r = 0) has no photon-number fluctuations, so the coefficient is undefined and reported as 0.
inline double pearson_predicted(double r, double eta_h, double eta_s, Regime regime) {
  if (regime != Regime::SBS || r == 0.0) return 0.0;
  const double t2 = std::tanh(r) * std::tanh(r);
  const double den = (1.0 - (1.0 - eta_h) * t2) * (1.0 - (1.0 - eta_s) * t2);
  if (!(den > 0.0)) return 0.0;
  return std::sqrt(eta_h * eta_s / den);
}

struct Envelope {
  double lowest = 0.0;
  double highest = 0.0;
  int bins = 0;
  size_t lowest_bin = 0;   // index into TimeBinnedReport::bins
  size_t highest_bin = 0;
};

struct TimeBinnedReport {
  std::vector<CriterionResult> bins;
  std::map<Regime, Envelope> envelopes;
};

// Incremental binning: consecutive records of one regime fill bins of bin_size shots.
// A bin closes when full or when the regime changes; partial bins under 100 shots are dropped.
class TimeBinner {
 public:
  TimeBinner(std::int64_t bin_size, int bootstrap_rounds, std::uint64_t seed, int threads = 1)
      : bin_size_(bin_size), rounds_(bootstrap_rounds), seed_(seed), threads_(threads) {
    if (bin_size < kMinCertifyShots) throw ConfigError("timebinned_certify: bin_size must be >= 100");
  }

  void add(const SampleRecord& r) {
    const PhotonPattern obs = observed_pattern(r);
    if (open_ && (r.regime != regime_ || obs.size() != acc_.modes())) close();
    if (!open_) {
      open_ = true;
      regime_ = r.regime;
      acc_ = MomentAccumulator(obs.size());
      start_ = r.time_bin;
      signal_sum_ = 0.0;
      signal_modes_ = r.signal.size();
    }
    acc_.accumulate(obs);
    signal_sum_ += r.signal.total();
    end_ = r.time_bin;
    if (acc_.shot_count() >= bin_size_) close();
  }

  TimeBinnedReport finish() {
    close();
    TimeBinnedReport rep;
    rep.bins = bins_;
    for (size_t i = 0; i < bins_.size(); ++i) {
      const CriterionResult& b = bins_[i];
      auto it = rep.envelopes.find(b.regime);
      if (it == rep.envelopes.end()) {
        rep.envelopes[b.regime] = {b.min_eigenvalue, b.min_eigenvalue, 1, i, i};
        continue;
      }
      Envelope& e = it->second;
      ++e.bins;
      if (b.min_eigenvalue < e.lowest) {
        e.lowest = b.min_eigenvalue;
        e.lowest_bin = i;
      }
      if (b.min_eigenvalue > e.highest) {
        e.highest = b.min_eigenvalue;
        e.highest_bin = i;
      }
    }
    return rep;
  }

 private:
  void close() {
    if (!open_) return;
    open_ = false;
    if (acc_.shot_count() < kMinCertifyShots) return;
    CriterionResult res = certify(acc_, rounds_, derive_seed(seed_, static_cast<std::uint64_t>(bins_.size())), threads_);
    res.regime = regime_;
    res.bin_start = start_;
    res.bin_end = end_;
    res.mean_photons_signal = signal_sum_ / (static_cast<double>(acc_.shot_count()) * signal_modes_);
    bins_.push_back(std::move(res));
  }

  std::int64_t bin_size_;
  int rounds_;
  std::uint64_t seed_;
  int threads_;
  bool open_ = false;
  Regime regime_ = Regime::GBS;
  MomentAccumulator acc_;
  std::int64_t start_ = 0;
  std::int64_t end_ = 0;
  double signal_sum_ = 0.0;
  int signal_modes_ = 1;
  std::vector<CriterionResult> bins_;
};

inline TimeBinnedReport timebinned_certify(const std::vector<SampleRecord>& samples, std::int64_t bin_size,
                                           int bootstrap_rounds = kDefaultBootstrapRounds,
                                           std::uint64_t seed = kDefaultSeed, int threads = 1) {
  TimeBinner binner(bin_size, bootstrap_rounds, seed, threads);
  for (const auto& r : samples) binner.add(r);
  return binner.finish();
}

}  // namespace bsamp
