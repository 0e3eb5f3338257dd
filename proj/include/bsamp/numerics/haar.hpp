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

#include "bsamp/error.hpp"
#include "bsamp/numerics/matrix.hpp"
#include "bsamp/numerics/rng.hpp"

namespace bsamp {

// QR of a complex Ginibre matrix, with column phases fixed so diag(R) > 0.
inline UnitaryMatrix haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("haar_unitary: dim must be >= 1");
  Rng rng(derive_seed(seed, 0x4861617275ULL));
  ComplexMatrix z(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    const cplx phase = mag > 0 ? r(j, j) / mag : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  // One Gram-Schmidt pass removes residual round-off.
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return UnitaryMatrix(q);
}

// S = (1/N) sum_ij |target_ij| measured_ij.
inline double similarity(const ComplexMatrix& target, const RealMatrix& measured) {
  if (target.rows() != measured.rows() || target.cols() != measured.cols()) {
    throw DimensionError("similarity: dimension mismatch");
  }
  if ((measured.array() < 0.0).any()) throw NumericError("similarity: measured amplitudes must be >= 0");
  const double n = static_cast<double>(target.rows());
  if (n == 0) throw DimensionError("similarity: empty matrix");
  return (target.cwiseAbs().array() * measured.array()).sum() / n;
}

}  // namespace bsamp
