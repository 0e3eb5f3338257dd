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
#include <sstream>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/eigen.hpp"
#include "bsamp/numerics/matrix.hpp"

namespace bsamp {

struct SqueezerSpec {
  double r = 0.0;
  double phi = 0.0;

  double lambda() const { return std::tanh(r); }
  double mean_photons() const {
    const double s = std::sinh(r);
    return s * s;
  }
};

// Normally ordered second moments: n(i,j) = <a_i^dag a_j>, m(i,j) = <a_i a_j>.
struct ComplexMoments {
  ComplexMatrix n;
  ComplexMatrix m;
};

// Symplectic form for (x_1..x_M, p_1..p_M) ordering.
inline RealMatrix symplectic_form(int modes) {
  RealMatrix omega = RealMatrix::Zero(2 * modes, 2 * modes);
  omega.topRightCorner(modes, modes) = RealMatrix::Identity(modes, modes);
  omega.bottomLeftCorner(modes, modes) = -RealMatrix::Identity(modes, modes);
  return omega;
}

// Orthogonal symplectic matrix acting on quadratures for a' = U a.
inline RealMatrix symplectic_from_unitary(const ComplexMatrix& u) {
  const Eigen::Index k = u.rows();
  RealMatrix s(2 * k, 2 * k);
  s.topLeftCorner(k, k) = u.real();
  s.topRightCorner(k, k) = -u.imag();
  s.bottomLeftCorner(k, k) = u.imag();
  s.bottomRightCorner(k, k) = u.real();
  return s;
}

class GaussianState {
 public:
  static constexpr double kUncertaintyTolerance = 1e-9;
  static constexpr double kSymmetryTolerance = 1e-12;

  // Validates symmetry and the uncertainty relation cov + i Omega / 2 >= 0.
  explicit GaussianState(const RealMatrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0) {
      throw DimensionError("GaussianState: covariance must be 2M x 2M with M >= 1");
    }
    if (!cov.allFinite()) throw NumericError("GaussianState: non-finite covariance");
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
      throw SymmetryError("GaussianState: covariance is not symmetric");
    }
    cov_ = SymmetricMatrix(cov).matrix();
    const double lowest = uncertainty_min_eigenvalue();
    if (lowest < -kUncertaintyTolerance) {
      std::ostringstream os;
      os << "GaussianState: uncertainty relation violated (min eigenvalue " << lowest << ")";
      throw NumericError(os.str());
    }
  }

  static GaussianState vacuum(int modes) {
    return GaussianState(0.5 * RealMatrix::Identity(2 * modes, 2 * modes));
  }

  static GaussianState from_moments(const ComplexMoments& mom) {
    const Eigen::Index k = mom.n.rows();
    if (mom.n.cols() != k || mom.m.rows() != k || mom.m.cols() != k) {
      throw DimensionError("from_moments: moment matrices must be M x M");
    }
    RealMatrix cov(2 * k, 2 * k);
    const RealMatrix id = RealMatrix::Identity(k, k);
    cov.topLeftCorner(k, k) = mom.m.real() + mom.n.real() + 0.5 * id;
    cov.bottomRightCorner(k, k) = -mom.m.real() + mom.n.real() + 0.5 * id;
    const RealMatrix xp = mom.m.imag() + mom.n.imag();
    cov.topRightCorner(k, k) = xp;
    cov.bottomLeftCorner(k, k) = xp.transpose();
    return GaussianState(cov);
  }

  int modes() const { return static_cast<int>(cov_.rows() / 2); }
  const RealMatrix& cov() const { return cov_; }

  ComplexMoments moments() const {
    const int k = modes();
    const RealMatrix xx = cov_.topLeftCorner(k, k);
    const RealMatrix pp = cov_.bottomRightCorner(k, k);
    const RealMatrix xp = cov_.topRightCorner(k, k);
    const RealMatrix id = RealMatrix::Identity(k, k);
    ComplexMoments out{ComplexMatrix(k, k), ComplexMatrix(k, k)};
    const RealMatrix re_n = 0.5 * (xx + pp) - 0.5 * id;
    const RealMatrix re_m = 0.5 * (xx - pp);
    const RealMatrix im_m = 0.5 * (xp + xp.transpose());
    const RealMatrix im_n = 0.5 * (xp - xp.transpose());
    out.n.real() = re_n;
    out.n.imag() = im_n;
    out.m.real() = re_m;
    out.m.imag() = im_m;
    return out;
  }

  std::vector<double> mean_photons() const {
    const int k = modes();
    std::vector<double> out(k);
    for (int i = 0; i < k; ++i) out[i] = 0.5 * (cov_(i, i) + cov_(k + i, k + i) - 1.0);
    return out;
  }

  // det(2 cov) == 1 for pure states.
  double purity() const { return 1.0 / std::sqrt((2.0 * cov_).determinant()); }

  double uncertainty_min_eigenvalue() const {
    // Hermitian H = cov + i Omega / 2, realified as [[Re, -Im], [Im, Re]].
    const int n = static_cast<int>(cov_.rows());
    const RealMatrix im = 0.5 * symplectic_form(modes());
    RealMatrix big(2 * n, 2 * n);
    big.topLeftCorner(n, n) = cov_;
    big.bottomRightCorner(n, n) = cov_;
    big.topRightCorner(n, n) = -im;
    big.bottomLeftCorner(n, n) = im;
    return min_eigenvalue_symmetric(SymmetricMatrix(big)).value;
  }

  GaussianState reduced(const std::vector<int>& keep) const {
    const int k = modes();
    const int r = static_cast<int>(keep.size());
    if (r == 0) throw DimensionError("reduced: empty mode list");
    std::vector<int> idx;
    for (int q = 0; q < 2; ++q) {
      for (int mode : keep) {
        if (mode < 0 || mode >= k) throw DimensionError("reduced: mode index out of range");
        idx.push_back(mode + q * k);
      }
    }
    RealMatrix out(2 * r, 2 * r);
    for (int a = 0; a < 2 * r; ++a) {
      for (int b = 0; b < 2 * r; ++b) out(a, b) = cov_(idx[a], idx[b]);
    }
    return GaussianState(out);
  }

 private:
  RealMatrix cov_;
};

inline void check_squeezers(const std::vector<SqueezerSpec>& specs, const char* what) {
  if (specs.empty()) throw DimensionError(std::string(what) + ": need at least one mode");
  for (const auto& s : specs) {
    if (!(s.r >= 0.0) || !std::isfinite(s.r)) {
      throw ConfigError(std::string(what) + ": squeezing r must be finite and >= 0");
    }
    if (!std::isfinite(s.phi)) throw ConfigError(std::string(what) + ": phase must be finite");
  }
}

// Product of single-mode squeezed vacua, <a a> = -e^{i phi} sinh r cosh r.
inline GaussianState smsv_state(const std::vector<SqueezerSpec>& specs) {
  check_squeezers(specs, "smsv_state");
  const int k = static_cast<int>(specs.size());
  ComplexMoments mom{ComplexMatrix::Zero(k, k), ComplexMatrix::Zero(k, k)};
  for (int i = 0; i < k; ++i) {
    const double r = specs[i].r;
    mom.n(i, i) = std::sinh(r) * std::sinh(r);
    mom.m(i, i) = -std::polar(std::sinh(r) * std::cosh(r), specs[i].phi);
  }
  return GaussianState::from_moments(mom);
}

// Pair k occupies modes k and P + k, so the first P modes form one arm.
inline GaussianState tmsv_state(const std::vector<SqueezerSpec>& specs) {
  check_squeezers(specs, "tmsv_state");
  const int p = static_cast<int>(specs.size());
  ComplexMoments mom{ComplexMatrix::Zero(2 * p, 2 * p), ComplexMatrix::Zero(2 * p, 2 * p)};
  for (int i = 0; i < p; ++i) {
    const double r = specs[i].r;
    const double s2 = std::sinh(r) * std::sinh(r);
    mom.n(i, i) = s2;
    mom.n(p + i, p + i) = s2;
    const cplx c = std::polar(std::sinh(r) * std::cosh(r), specs[i].phi);
    mom.m(i, p + i) = c;
    mom.m(p + i, i) = c;
  }
  return GaussianState::from_moments(mom);
}

inline GaussianState thermal_state(const std::vector<double>& means) {
  if (means.empty()) throw DimensionError("thermal_state: need at least one mode");
  const int k = static_cast<int>(means.size());
  RealMatrix cov = RealMatrix::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    if (!(means[i] >= 0.0) || !std::isfinite(means[i])) {
      throw ConfigError("thermal_state: mean photon number must be finite and >= 0");
    }
    cov(i, i) = means[i] + 0.5;
    cov(k + i, k + i) = means[i] + 0.5;
  }
  return GaussianState(cov);
}

inline GaussianState apply_unitary(const GaussianState& state, const UnitaryMatrix& u,
                                   const std::vector<int>& subset) {
  const int k = state.modes();
  if (u.dim() != static_cast<int>(subset.size())) {
    throw DimensionError("apply_unitary: unitary dim does not match subset size");
  }
  ComplexMatrix full = ComplexMatrix::Identity(k, k);
  std::vector<bool> seen(k, false);
  for (int a = 0; a < u.dim(); ++a) {
    if (subset[a] < 0 || subset[a] >= k || seen[subset[a]]) {
      throw DimensionError("apply_unitary: subset must list distinct modes of the state");
    }
    seen[subset[a]] = true;
  }
  for (int a = 0; a < u.dim(); ++a) {
    full(subset[a], subset[a]) = 0.0;
  }
  for (int a = 0; a < u.dim(); ++a) {
    for (int b = 0; b < u.dim(); ++b) full(subset[a], subset[b]) = u(a, b);
  }
  const RealMatrix s = symplectic_from_unitary(full);
  return GaussianState(s * state.cov() * s.transpose());
}

inline GaussianState apply_unitary(const GaussianState& state, const UnitaryMatrix& u) {
  std::vector<int> all(state.modes());
  for (int i = 0; i < state.modes(); ++i) all[i] = i;
  return apply_unitary(state, u, all);
}

// Pure-loss channel: cov_ij -> sqrt(eta_i eta_j) cov_ij + delta_ij (1 - eta_i) / 2.
inline GaussianState apply_loss(const GaussianState& state, const std::vector<double>& eta) {
  const int k = state.modes();
  if (static_cast<int>(eta.size()) != k) throw DimensionError("apply_loss: eta length != modes");
  RealVector g(2 * k);
  for (int i = 0; i < k; ++i) {
    if (!(eta[i] >= 0.0 && eta[i] <= 1.0)) throw ConfigError("apply_loss: transmission outside [0,1]");
    g[i] = g[k + i] = std::sqrt(eta[i]);
  }
  RealMatrix cov = g.asDiagonal() * state.cov() * g.asDiagonal();
  for (int i = 0; i < k; ++i) {
    cov(i, i) += 0.5 * (1.0 - eta[i]);
    cov(k + i, k + i) += 0.5 * (1.0 - eta[i]);
  }
  return GaussianState(cov);
}

inline GaussianState direct_sum(const GaussianState& a, const GaussianState& b) {
  const int ka = a.modes();
  const int kb = b.modes();
  const int k = ka + kb;
  RealMatrix cov = RealMatrix::Zero(2 * k, 2 * k);
  for (int q = 0; q < 2; ++q) {
    for (int r = 0; r < 2; ++r) {
      cov.block(q * k, r * k, ka, ka) = a.cov().block(q * ka, r * ka, ka, ka);
      cov.block(q * k + ka, r * k + ka, kb, kb) = b.cov().block(q * kb, r * kb, kb, kb);
    }
  }
  return GaussianState(cov);
}

}  // namespace bsamp
