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

#include <array>
#include <cmath>
#include <string>

#include "bsamp/error.hpp"

namespace bsamp {

using uint128 = unsigned __int128;

constexpr int kStirlingMaxN = 30;
constexpr int kFactorialMax = 60;

namespace detail {

struct FactorialTable {
  std::array<double, kFactorialMax + 1> value{};
  std::array<double, kFactorialMax + 1> log_value{};
  FactorialTable() {
    value[0] = 1.0;
    log_value[0] = 0.0;
    for (int i = 1; i <= kFactorialMax; ++i) {
      value[i] = value[i - 1] * i;
      log_value[i] = log_value[i - 1] + std::log(static_cast<double>(i));
    }
  }
};

inline const FactorialTable& factorial_table() {
  static const FactorialTable table;
  return table;
}

struct StirlingTable {
  std::array<std::array<uint128, kStirlingMaxN + 1>, kStirlingMaxN + 1> s{};
  StirlingTable() {
    s[0][0] = 1;
    for (int n = 1; n <= kStirlingMaxN; ++n) {
      for (int k = 1; k <= n; ++k) s[n][k] = static_cast<uint128>(k) * s[n - 1][k] + s[n - 1][k - 1];
    }
  }
};

inline const StirlingTable& stirling_table() {
  static const StirlingTable table;
  return table;
}

}  // namespace detail

inline double factorial(int n) {
  if (n < 0 || n > kFactorialMax) throw CapacityError("factorial: argument out of table range");
  return detail::factorial_table().value[n];
}

inline double log_factorial(int n) {
  if (n < 0) throw CapacityError("log_factorial: negative argument");
  if (n <= kFactorialMax) return detail::factorial_table().log_value[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (n <= kFactorialMax) {
    return std::round(detail::factorial_table().value[n] /
                      (detail::factorial_table().value[k] * detail::factorial_table().value[n - k]));
  }
  return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

// Stirling numbers of the second kind via S(n,k) = k S(n-1,k) + S(n-1,k-1).
inline uint128 stirling2(int n, int k) {
  if (n < 0 || k < 0) throw CapacityError("stirling2: negative argument");
  if (n > kStirlingMaxN) throw CapacityError("stirling2: n exceeds " + std::to_string(kStirlingMaxN));
  if (k > n) return 0;
  return detail::stirling_table().s[n][k];
}

inline double to_double(uint128 x) { return static_cast<double>(x); }

inline std::string to_string(uint128 x) {
  if (x == 0) return "0";
  std::string s;
  while (x > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  return s;
}

}  // namespace bsamp
