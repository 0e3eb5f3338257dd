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
#include <bit>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/matrix.hpp"

namespace bsamp {

constexpr int kPermanentMaxDim = 24;
constexpr int kPermanentNaiveMaxDim = 8;

// Glynn's formula with Gray-code ordering of the sign vectors:
//   Per(A) = 2^{1-n} sum_d (prod_k d_k) prod_j sum_i d_i a_ij,  d_0 = +1.
inline cplx permanent(const ComplexMatrix& m) {
  require_square(m, "permanent");
  const int n = static_cast<int>(m.rows());
  if (n > kPermanentMaxDim) {
    throw CapacityError("permanent: dim " + std::to_string(n) + " exceeds " +
                        std::to_string(kPermanentMaxDim));
  }
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m(0, 0);

  using lcplx = std::complex<long double>;
  std::vector<lcplx> colsum(n);
  for (int j = 0; j < n; ++j) {
    lcplx s = 0;
    for (int i = 0; i < n; ++i) s += lcplx(m(i, j));
    colsum[j] = s;
  }
  std::vector<int> delta(n, 1);
  auto product = [&]() {
    lcplx p = 1;
    for (int j = 0; j < n; ++j) p *= colsum[j];
    return p;
  };

  lcplx total = product();
  int sign = 1;
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 1; g < steps; ++g) {
    // Row to flip is 1 + index of the lowest set bit of g.
    const int k = 1 + std::countr_zero(g);
    const long double twice = 2.0L * delta[k];
    for (int j = 0; j < n; ++j) colsum[j] -= twice * lcplx(m(k, j));
    delta[k] = -delta[k];
    sign = -sign;
    total += static_cast<long double>(sign) * product();
  }
  total /= static_cast<long double>(steps);
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

// Sum over all n! permutations. Kept as an oracle for the fast path.
inline cplx permanent_naive(const ComplexMatrix& m) {
  require_square(m, "permanent_naive");
  const int n = static_cast<int>(m.rows());
  if (n > kPermanentNaiveMaxDim) {
    throw CapacityError("permanent_naive: dim " + std::to_string(n) + " exceeds " +
                        std::to_string(kPermanentNaiveMaxDim));
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  cplx total = 0;
  do {
    cplx p = 1;
    for (int i = 0; i < n; ++i) p *= m(i, perm[i]);
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace bsamp
