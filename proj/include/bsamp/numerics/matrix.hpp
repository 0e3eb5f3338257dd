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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bsamp/error.hpp"

namespace bsamp {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline bool all_finite(const RealMatrix& m) { return m.allFinite(); }

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
}

// Largest absolute entry of U^dagger U - I.
inline double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d.data()[i]));
  return worst;
}

class UnitaryMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit UnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {
    require_square(m_, "UnitaryMatrix");
    if (!all_finite(m_)) throw NumericError("UnitaryMatrix: non-finite entry");
    const double defect = unitarity_defect(m_);
    if (defect > kTolerance) {
      std::ostringstream os;
      os << "UnitaryMatrix: max |U^dag U - I| = " << defect << " exceeds " << kTolerance;
      throw NumericError(os.str());
    }
  }

  static UnitaryMatrix identity(int dim) { return UnitaryMatrix(ComplexMatrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  ComplexMatrix m_;
};

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  // Stores (m + m^T) / 2 so the stored entries are exactly symmetric.
  explicit SymmetricMatrix(const RealMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("SymmetricMatrix: matrix is not square");
    m_ = 0.5 * (m + m.transpose());
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < m_.cols(); ++j) m_(j, i) = m_(i, j);
    }
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const RealMatrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  RealMatrix m_;
};

// CSV with one "re,im" pair per cell, so a row of n cells has 2n fields.
inline ComplexMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<cplx>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        fields.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError("matrix csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (fields.size() % 2 != 0) {
      throw ConfigError("matrix csv line " + std::to_string(line_no) + ": odd field count");
    }
    std::vector<cplx> row;
    for (size_t k = 0; k < fields.size(); k += 2) row.emplace_back(fields[k], fields[k + 1]);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError("matrix csv line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r == 0 ? 0 : static_cast<Eigen::Index>(rows.front().size());
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline ComplexMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path);
  return read_matrix_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const ComplexMatrix& m) {
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j).real() << ',' << m(i, j).imag();
    }
    out << '\n';
  }
}

inline void write_matrix_csv(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write matrix file " + path);
  write_matrix_csv(out, m);
}

}  // namespace bsamp
