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

#include <fstream>
#include <ostream>
#include <string>

#include "bsamp/certifier/certifier.hpp"
#include "bsamp/error.hpp"

namespace bsamp {

inline void write_report_row(std::ostream& out, const std::string& regime, const CriterionResult& r) {
  out << regime << ',' << r.bin_start << ',' << r.bin_end << ',' << r.shot_count << ',' << r.min_eigenvalue << ','
      << r.uncertainty << ',' << r.n_sigma << ',' << r.mean_photons_signal << '\n';
}

// One row per (regime, bin), then "<regime>:lowest" and "<regime>:highest" envelope rows.
inline void write_report_csv(std::ostream& out, const TimeBinnedReport& rep) {
  out.precision(10);
  out << "regime,bin_start,bin_end,shots,min_eigenvalue,sigma,n_sigma_violation,mean_photons_signal\n";
  for (const auto& b : rep.bins) write_report_row(out, regime_name(b.regime), b);
  for (const auto& [regime, env] : rep.envelopes) {
    write_report_row(out, std::string(regime_name(regime)) + ":lowest", rep.bins[env.lowest_bin]);
    write_report_row(out, std::string(regime_name(regime)) + ":highest", rep.bins[env.highest_bin]);
  }
}

inline void write_report_csv(const std::string& path, const TimeBinnedReport& rep) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_report_csv(out, rep);
}

}  // namespace bsamp
