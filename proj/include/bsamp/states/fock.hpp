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

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/combinatorics.hpp"
#include "bsamp/numerics/hafnian.hpp"
#include "bsamp/states/gaussian_state.hpp"

namespace bsamp {

constexpr int kMaxPatternTotal = 30;
constexpr double kFockEnumerationBudget = 1e7;
constexpr double kHafnianTableBudget = 2e7;
constexpr double kProbabilityClamp = 1e-9;

struct PhotonPattern {
  std::vector<int> counts;

  PhotonPattern() = default;
  explicit PhotonPattern(std::vector<int> c) : counts(std::move(c)) {}
  PhotonPattern(std::initializer_list<int> c) : counts(c) {}
  static PhotonPattern zeros(int modes) { return PhotonPattern(std::vector<int>(modes, 0)); }

  int size() const { return static_cast<int>(counts.size()); }
  int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }
  int operator[](int i) const { return counts[i]; }
  int& operator[](int i) { return counts[i]; }
  auto operator<=>(const PhotonPattern&) const = default;

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < counts.size(); ++i) os << (i ? "," : "") << counts[i];
    os << ')';
    return os.str();
  }
};

// Husimi-function data: Q = sigma_complex + I/2 and A = X (I - Q^{-1}).
struct HusimiData {
  ComplexMatrix q;
  ComplexMatrix a;
  double sqrt_det_q = 1.0;
};

inline HusimiData husimi_data(const GaussianState& state) {
  const int k = state.modes();
  const ComplexMoments mom = state.moments();
  const ComplexMatrix id = ComplexMatrix::Identity(k, k);
  HusimiData out;
  out.q.resize(2 * k, 2 * k);
  out.q.topLeftCorner(k, k) = mom.n.transpose() + id;
  out.q.topRightCorner(k, k) = mom.m;
  out.q.bottomLeftCorner(k, k) = mom.m.conjugate();
  out.q.bottomRightCorner(k, k) = mom.n + id;
  const Eigen::PartialPivLU<ComplexMatrix> lu(out.q);
  const ComplexMatrix qinv = lu.inverse();
  const ComplexMatrix ia = ComplexMatrix::Identity(2 * k, 2 * k) - qinv;
  out.a.resize(2 * k, 2 * k);
  out.a.topRows(k) = ia.bottomRows(k);
  out.a.bottomRows(k) = ia.topRows(k);
  out.a = 0.5 * (out.a + out.a.transpose()).eval();
  const cplx det = lu.determinant();
  if (!(det.real() > 0.0)) throw NumericError("husimi_data: det Q is not positive");
  out.sqrt_det_q = std::sqrt(det.real());
  return out;
}

inline double clamp_probability(cplx value, const char* what) {
  const double scale = std::max(1.0, std::abs(value));
  if (std::abs(value.imag()) > 1e-9 * scale) {
    throw NumericError(std::string(what) + ": probability has imaginary residue");
  }
  double p = value.real();
  if (!std::isfinite(p)) throw NumericError(std::string(what) + ": non-finite probability");
  if (p < 0.0) {
    if (p < -kProbabilityClamp) throw NumericError(std::string(what) + ": negative probability");
    p = 0.0;
  }
  if (p > 1.0) {
    if (p > 1.0 + kProbabilityClamp) throw NumericError(std::string(what) + ": probability above 1");
    p = 1.0;
  }
  return p;
}

// P(n) = Haf(A_(n,n)) / (prod n_i! sqrt det Q).
inline double fock_probability(const HusimiData& h, const PhotonPattern& pattern) {
  const int k = static_cast<int>(h.a.rows() / 2);
  if (pattern.size() != k) throw DimensionError("fock_probability: pattern length != modes");
  int total = 0;
  for (int c : pattern.counts) {
    if (c < 0) throw DimensionError("fock_probability: negative photon count");
    total += c;
  }
  if (total > kMaxPatternTotal) {
    throw CapacityError("fock_probability: pattern total " + std::to_string(total) + " exceeds " +
                        std::to_string(kMaxPatternTotal));
  }
  std::vector<int> reps(2 * k);
  for (int i = 0; i < k; ++i) reps[i] = reps[k + i] = pattern[i];
  const cplx haf = 2 * total <= kHafnianMaxDim ? hafnian(repeat_rows_cols(h.a, reps))
                                                        : hafnian_repeated(h.a, reps);
  double log_norm = std::log(h.sqrt_det_q);
  for (int c : pattern.counts) log_norm += log_factorial(c);
  return clamp_probability(haf * std::exp(-log_norm), "fock_probability");
}

inline double fock_probability(const GaussianState& state, const PhotonPattern& pattern) {
  return fock_probability(husimi_data(state), pattern);
}

// Mixed-radix index over patterns with every count <= cutoff; mode 0 varies fastest.
class FockDistribution {
 public:
  FockDistribution(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    probs_.assign(static_cast<size_t>(pattern_count(modes, cutoff)), 0.0);
  }

  static double pattern_count(int modes, int cutoff) { return std::pow(cutoff + 1.0, modes); }

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  size_t size() const { return probs_.size(); }
  const std::vector<double>& probabilities() const { return probs_; }
  std::vector<double>& probabilities() { return probs_; }

  size_t index(const PhotonPattern& p) const {
    size_t idx = 0;
    for (int i = modes_ - 1; i >= 0; --i) {
      if (p[i] < 0 || p[i] > cutoff_) throw DimensionError("FockDistribution: pattern outside cutoff");
      idx = idx * (cutoff_ + 1) + p[i];
    }
    return idx;
  }

  PhotonPattern pattern(size_t idx) const {
    PhotonPattern p = PhotonPattern::zeros(modes_);
    for (int i = 0; i < modes_; ++i) {
      p[i] = static_cast<int>(idx % (cutoff_ + 1));
      idx /= (cutoff_ + 1);
    }
    return p;
  }

  double at(const PhotonPattern& p) const { return probs_[index(p)]; }
  double total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

  std::map<PhotonPattern, double> to_map() const {
    std::map<PhotonPattern, double> out;
    for (size_t i = 0; i < probs_.size(); ++i) out.emplace(pattern(i), probs_[i]);
    return out;
  }

 private:
  int modes_;
  int cutoff_;
  std::vector<double> probs_;
};

namespace detail {

// Pure states: psi(n) with psi(n + e_i) = (n_i+1)^{-1/2} sum_j B_ij sqrt(n_j) psi(n - e_j).
inline void fock_pure(const ComplexMatrix& b, double sqrt_det_q, FockDistribution& dist) {
  const int k = dist.modes();
  const int c = dist.cutoff();
  const size_t total = dist.size();
  std::vector<size_t> stride(k);
  size_t s = 1;
  for (int i = 0; i < k; ++i) {
    stride[i] = s;
    s *= static_cast<size_t>(c + 1);
  }
  std::vector<cplx> psi(total, cplx(0.0, 0.0));
  psi[0] = 1.0 / std::sqrt(sqrt_det_q);
  std::vector<int> n(k, 0);
  auto& probs = dist.probabilities();
  probs[0] = std::norm(psi[0]);
  for (size_t idx = 1; idx < total; ++idx) {
    // Increment the mixed-radix counter n.
    for (int i = 0; i < k; ++i) {
      if (++n[i] <= c) break;
      n[i] = 0;
    }
    int first = 0;
    while (n[first] == 0) ++first;
    const size_t base = idx - stride[first];
    cplx acc = 0;
    for (int j = 0; j < k; ++j) {
      const int nj = n[j] - (j == first ? 1 : 0);
      if (nj == 0) continue;
      acc += b(first, j) * std::sqrt(static_cast<double>(nj)) * psi[base - stride[j]];
    }
    psi[idx] = acc / std::sqrt(static_cast<double>(n[first]));
    probs[idx] = std::norm(psi[idx]);
  }
}

// Mixed states: table of Haf(A_v) over v in [0..c]^{2M} with
//   Haf(A_v) = sum_j (v_j - delta_ij) A_ij Haf(A_{v - e_i - e_j}), i the first nonzero index.
inline void fock_mixed(const ComplexMatrix& a, double sqrt_det_q, FockDistribution& dist) {
  const int k = dist.modes();
  const int c = dist.cutoff();
  const int d = 2 * k;
  const double entries = std::pow(c + 1.0, d);
  if (entries > kHafnianTableBudget) {
    throw BudgetError("fock_distribution: mixed-state table of " + std::to_string(entries) +
                      " entries exceeds budget; lower the cutoff or mode count");
  }
  const size_t total = static_cast<size_t>(entries);
  std::vector<size_t> stride(d);
  size_t s = 1;
  for (int i = 0; i < d; ++i) {
    stride[i] = s;
    s *= static_cast<size_t>(c + 1);
  }
  std::vector<cplx> haf(total, cplx(0.0, 0.0));
  haf[0] = 1.0;
  std::vector<int> v(d, 0);
  int parity = 0;
  for (size_t idx = 1; idx < total; ++idx) {
    for (int i = 0; i < d; ++i) {
      if (++v[i] <= c) {
        ++parity;
        break;
      }
      parity -= c;
      v[i] = 0;
    }
    if (parity % 2) continue;
    int first = 0;
    while (v[first] == 0) ++first;
    const size_t base = idx - stride[first];
    cplx acc = 0;
    for (int j = 0; j < d; ++j) {
      const int vj = v[j] - (j == first ? 1 : 0);
      if (vj == 0) continue;
      acc += static_cast<double>(vj) * a(first, j) * haf[base - stride[j]];
    }
    haf[idx] = acc;
  }
  auto& probs = dist.probabilities();
  for (size_t pidx = 0; pidx < dist.size(); ++pidx) {
    const PhotonPattern p = dist.pattern(pidx);
    size_t vidx = 0;
    double log_fact = 0.0;
    for (int i = 0; i < k; ++i) {
      vidx += static_cast<size_t>(p[i]) * (stride[i] + stride[k + i]);
      log_fact += log_factorial(p[i]);
    }
    const cplx value = haf[vidx] * std::exp(-log_fact) / sqrt_det_q;
    probs[pidx] = clamp_probability(value, "fock_distribution");
  }
}

}  // namespace detail

inline bool husimi_is_pure(const HusimiData& h, double tol = 1e-10) {
  const int k = static_cast<int>(h.a.rows() / 2);
  return h.a.topRightCorner(k, k).cwiseAbs().maxCoeff() <= tol;
}

// All patterns with each mode count <= cutoff.
inline FockDistribution fock_distribution(const GaussianState& state, int cutoff) {
  if (cutoff < 0) throw DimensionError("fock_distribution: cutoff must be >= 0");
  const int k = state.modes();
  const double count = FockDistribution::pattern_count(k, cutoff);
  if (count > kFockEnumerationBudget) {
    std::ostringstream os;
    os << "fock_distribution: (cutoff+1)^modes = " << count << " exceeds budget "
       << kFockEnumerationBudget << "; lower the cutoff or mode count";
    throw BudgetError(os.str());
  }
  const HusimiData h = husimi_data(state);
  FockDistribution dist(k, cutoff);
  if (husimi_is_pure(h)) {
    detail::fock_pure(h.a.topLeftCorner(k, k), h.sqrt_det_q, dist);
    for (double& p : dist.probabilities()) p = clamp_probability(cplx(p, 0.0), "fock_distribution");
  } else {
    detail::fock_mixed(h.a, h.sqrt_det_q, dist);
  }
  return dist;
}

}  // namespace bsamp
