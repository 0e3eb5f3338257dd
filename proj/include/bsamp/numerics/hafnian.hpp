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

#include <complex>
#include <cstdint>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/combinatorics.hpp"
#include "bsamp/numerics/matrix.hpp"

namespace bsamp {

constexpr int kHafnianMaxDim = 20;
constexpr int kHafnianMatchingMaxDim = 12;
constexpr double kSymmetryTolerance = 1e-10;

inline void require_symmetric(const ComplexMatrix& m, const char* what) {
  require_square(m, what);
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
      if (std::abs(m(i, j) - m(j, i)) > kSymmetryTolerance * scale) {
        throw SymmetryError(std::string(what) + ": matrix is not symmetric at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

namespace detail {

inline cplx matchings_rec(const ComplexMatrix& m, std::vector<int>& free_vertices) {
  if (free_vertices.empty()) return {1.0, 0.0};
  const int first = free_vertices.back();
  free_vertices.pop_back();
  cplx total = 0;
  const size_t count = free_vertices.size();
  for (size_t k = 0; k < count; ++k) {
    const int partner = free_vertices[k];
    const cplx w = m(first, partner);
    if (w == cplx(0.0, 0.0)) continue;
    free_vertices[k] = free_vertices.back();
    free_vertices.pop_back();
    total += w * matchings_rec(m, free_vertices);
    free_vertices.push_back(free_vertices[k]);
    free_vertices[k] = partner;
  }
  free_vertices.push_back(first);
  return total;
}

// Coefficient of x^n in exp(sum_k g[k] x^k), g[0] ignored.
inline std::complex<long double> exp_series_coeff(const std::vector<std::complex<long double>>& g, int n) {
  std::vector<std::complex<long double>> e(n + 1);
  e[0] = 1;
  for (int mth = 1; mth <= n; ++mth) {
    std::complex<long double> s = 0;
    for (int k = 1; k <= mth; ++k) s += static_cast<long double>(k) * g[k] * e[mth - k];
    e[mth] = s / static_cast<long double>(mth);
  }
  return e[n];
}

}  // namespace detail

// Sum over perfect matchings by direct enumeration.
inline cplx hafnian_matchings(const ComplexMatrix& m) {
  require_symmetric(m, "hafnian_matchings");
  const int n = static_cast<int>(m.rows());
  if (n % 2) return {0.0, 0.0};
  std::vector<int> free_vertices(n);
  for (int i = 0; i < n; ++i) free_vertices[i] = n - 1 - i;
  return detail::matchings_rec(m, free_vertices);
}

// Power-trace inclusion-exclusion over subsets of vertex pairs.
inline cplx hafnian_power_trace(const ComplexMatrix& m) {
  require_symmetric(m, "hafnian_power_trace");
  const int dim = static_cast<int>(m.rows());
  if (dim % 2) return {0.0, 0.0};
  if (dim == 0) return {1.0, 0.0};
  const int n = dim / 2;
  using lcplx = std::complex<long double>;
  using LMatrix = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;

  lcplx total = 0;
  std::vector<int> idx;
  std::vector<lcplx> g(n + 1);
  for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
    idx.clear();
    for (int p = 0; p < n; ++p) {
      if (subset & (1u << p)) {
        idx.push_back(2 * p);
        idx.push_back(2 * p + 1);
      }
    }
    const int k = static_cast<int>(idx.size());
    // B = A[idx, idx] X with X swapping the two members of each pair.
    LMatrix b(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) b(r, c) = lcplx(m(idx[r], idx[c ^ 1]));
    }
    // Powers up to h = ceil(n/2); higher traces use tr(B^h B^(j-h)) without another product.
    const int h = (n + 1) / 2;
    std::vector<LMatrix> powers(h + 1);
    powers[1] = b;
    for (int j = 2; j <= h; ++j) powers[j] = powers[j - 1] * b;
    for (int j = 1; j <= n; ++j) {
      const lcplx tr = j <= h ? powers[j].trace() : (powers[h].array() * powers[j - h].transpose().array()).sum();
      g[j] = tr / static_cast<long double>(2 * j);
    }
    const int missing = n - k / 2;
    const lcplx coeff = detail::exp_series_coeff(g, n);
    total += (missing % 2 ? -coeff : coeff);
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

inline cplx hafnian(const ComplexMatrix& m) {
  require_symmetric(m, "hafnian");
  const int n = static_cast<int>(m.rows());
  if (n % 2) return {0.0, 0.0};
  if (n > kHafnianMaxDim) {
    throw CapacityError("hafnian: dim " + std::to_string(n) + " exceeds " + std::to_string(kHafnianMaxDim));
  }
  if (n <= kHafnianMatchingMaxDim) return hafnian_matchings(m);
  return hafnian_power_trace(m);
}

// Matrix with row/column i repeated reps[i] times.
inline ComplexMatrix repeat_rows_cols(const ComplexMatrix& m, const std::vector<int>& reps) {
  if (static_cast<Eigen::Index>(reps.size()) != m.rows()) {
    throw DimensionError("repeat_rows_cols: reps length does not match matrix dimension");
  }
  std::vector<int> idx;
  for (size_t i = 0; i < reps.size(); ++i) {
    for (int r = 0; r < reps[i]; ++r) idx.push_back(static_cast<int>(i));
  }
  const int k = static_cast<int>(idx.size());
  ComplexMatrix out(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) out(r, c) = m(idx[r], idx[c]);
  }
  return out;
}

// Hafnian of the matrix with row/column i repeated reps[i] times (Kan's formula):
//   Haf = (1/N!) sum_v (-1)^{|v|} prod_i C(reps_i, v_i) (h^T A h / 2)^N,  h = reps/2 - v.
inline cplx hafnian_repeated(const ComplexMatrix& m, const std::vector<int>& reps) {
  require_symmetric(m, "hafnian_repeated");
  const int dim = static_cast<int>(m.rows());
  if (static_cast<int>(reps.size()) != dim) {
    throw DimensionError("hafnian_repeated: reps length does not match matrix dimension");
  }
  int total = 0;
  for (int r : reps) {
    if (r < 0) throw DimensionError("hafnian_repeated: negative repetition count");
    total += r;
  }
  if (total % 2) return {0.0, 0.0};
  if (total == 0) return {1.0, 0.0};
  const int half = total / 2;

  std::vector<int> active;
  for (int i = 0; i < dim; ++i) {
    if (reps[i] > 0) active.push_back(i);
  }
  const int a = static_cast<int>(active.size());
  using lcplx = std::complex<long double>;
  Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic> sub(a, a);
  for (int r = 0; r < a; ++r) {
    for (int c = 0; c < a; ++c) sub(r, c) = lcplx(m(active[r], active[c]));
  }

  std::vector<int> v(a, 0);
  std::vector<long double> h(a);
  lcplx sum = 0;
  while (true) {
    long double weight = 1.0L;
    int parity = 0;
    for (int r = 0; r < a; ++r) {
      const int n_r = reps[active[r]];
      weight *= static_cast<long double>(binomial(n_r, v[r]));
      parity += v[r];
      h[r] = 0.5L * n_r - v[r];
    }
    lcplx quad = 0;
    for (int r = 0; r < a; ++r) {
      lcplx row = 0;
      for (int c = 0; c < a; ++c) row += sub(r, c) * h[c];
      quad += h[r] * row;
    }
    quad *= 0.5L;
    lcplx p = 1;
    for (int k = 0; k < half; ++k) p *= quad;
    sum += (parity % 2 ? -weight : weight) * p;

    int pos = 0;
    while (pos < a) {
      if (++v[pos] <= reps[active[pos]]) break;
      v[pos] = 0;
      ++pos;
    }
    if (pos == a) break;
  }
  sum /= static_cast<long double>(factorial(half));
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

}  // namespace bsamp
