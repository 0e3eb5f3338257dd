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

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bsamp/error.hpp"
#include "bsamp/numerics/haar.hpp"
#include "bsamp/numerics/matrix.hpp"
#include "bsamp/numerics/rng.hpp"
#include "bsamp/sampler/detector.hpp"
#include "bsamp/states/fock.hpp"
#include "bsamp/states/gaussian_state.hpp"

namespace bsamp {

enum class Regime { GBS, SBS, TBS };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::GBS: return "GBS";
    case Regime::SBS: return "SBS";
    case Regime::TBS: return "TBS";
  }
  return "?";
}

inline Regime parse_regime(const std::string& s) {
  if (s == "GBS") return Regime::GBS;
  if (s == "SBS") return Regime::SBS;
  if (s == "TBS") return Regime::TBS;
  throw ConfigError("unknown regime '" + s + "' (expected GBS, SBS or TBS)");
}

// Blocks cycle through pattern; block b has regime pattern[b % P] and length block_shots[b % L].
struct Schedule {
  std::vector<std::int64_t> block_shots{1000000};
  std::vector<Regime> pattern{Regime::GBS};

  struct Block {
    std::int64_t index;
    std::int64_t start;
    std::int64_t end;  // exclusive
    Regime regime;
  };

  std::vector<Block> blocks(std::int64_t n_shots) const {
    std::vector<Block> out;
    std::int64_t start = 0;
    for (std::int64_t b = 0; start < n_shots; ++b) {
      const std::int64_t len = block_shots[static_cast<size_t>(b) % block_shots.size()];
      const std::int64_t end = std::min(n_shots, start + len);
      out.push_back({b, start, end, pattern[static_cast<size_t>(b) % pattern.size()]});
      start = end;
    }
    return out;
  }
};

constexpr int kSbsDefaultFockCutoff = 30;
constexpr int kGbsPreferredFockCutoff = 15;

struct ExperimentConfig {
  int modes = 1;
  std::vector<SqueezerSpec> squeezers{{0.0, 0.0}};
  UnitaryMatrix unitary = UnitaryMatrix::identity(1);
  std::vector<double> eta_signal{1.0};
  std::vector<double> eta_herald{1.0};
  int pnr_cutoff = 3;
  std::optional<int> fock_cutoff;
  Schedule schedule;
  double phase_drift_rms = 0.11;
  bool phase_drift_shared = false;
  std::int64_t guard_shots = 0;
  HeraldDetectorModel herald_detector;
  std::optional<std::uint64_t> seed;

  void validate() const {
    if (modes < 1) throw ConfigError("modes: must be >= 1");
    if (static_cast<int>(squeezers.size()) != modes) {
      throw ConfigError("squeezers: expected " + std::to_string(modes) + " entries, got " +
                        std::to_string(squeezers.size()));
    }
    check_squeezers(squeezers, "squeezers");
    if (unitary.dim() != modes) throw ConfigError("unitary: dimension does not match modes");
    auto check_eta = [&](const std::vector<double>& eta, const char* name) {
      if (static_cast<int>(eta.size()) != modes) {
        throw ConfigError(std::string(name) + ": expected " + std::to_string(modes) + " entries");
      }
      for (double e : eta) {
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError(std::string(name) + ": transmission outside [0,1]");
      }
    };
    check_eta(eta_signal, "eta_signal");
    check_eta(eta_herald, "eta_herald");
    if (pnr_cutoff < 1) throw ConfigError("pnr_cutoff: must be >= 1");
    if (fock_cutoff && *fock_cutoff < 0) throw ConfigError("fock_cutoff: must be >= 0");
    if (schedule.block_shots.empty() || schedule.pattern.empty()) {
      throw ConfigError("schedule: block_shots and pattern must be non-empty");
    }
    for (auto b : schedule.block_shots) {
      if (b < 1) throw ConfigError("schedule.block_shots: entries must be >= 1");
    }
    if (!(phase_drift_rms >= 0.0) || !std::isfinite(phase_drift_rms)) {
      throw ConfigError("phase_drift_rms: must be finite and >= 0");
    }
    if (guard_shots < 0) throw ConfigError("guard_shots: must be >= 0");
    herald_detector.validate();
  }

  // GBS enumerates (c+1)^M patterns, so its default stays inside the budget.
  int effective_fock_cutoff(Regime r) const {
    if (fock_cutoff) return *fock_cutoff;
    if (r != Regime::GBS) return kSbsDefaultFockCutoff;
    int c = kGbsPreferredFockCutoff;
    while (c > 0 && FockDistribution::pattern_count(modes, c) > kFockEnumerationBudget) --c;
    return c;
  }

  bool uniform_signal_loss() const {
    for (double e : eta_signal) {
      if (e != eta_signal.front()) return false;
    }
    return true;
  }
};

namespace detail {

inline std::vector<double> parse_eta(const nlohmann::json& j, int modes, const char* name) {
  if (j.is_number()) return std::vector<double>(modes, j.get<double>());
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError(std::string(name) + ": entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  throw ConfigError(std::string(name) + ": expected a number or a list of numbers");
}

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_field(const nlohmann::json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": missing or wrong type");
  }
}

}  // namespace detail

// Fields not present keep their defaults; unknown keys are errors.
inline ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".") {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown(j,
                         {"modes", "squeezers", "unitary", "eta_signal", "eta_herald", "pnr_cutoff", "fock_cutoff",
                          "schedule", "phase_drift_rms", "phase_drift_shared", "guard_shots", "herald_detector",
                          "seed"},
                         "config");
  ExperimentConfig cfg;
  cfg.modes = get_field<int>(j, "modes", "config");
  if (cfg.modes < 1) throw ConfigError("config.modes: must be >= 1");

  if (!j.contains("squeezers")) throw ConfigError("config.squeezers: missing");
  const auto& sq = j.at("squeezers");
  cfg.squeezers.clear();
  auto parse_sq = [](const nlohmann::json& s, const std::string& where) {
    if (!s.is_object()) throw ConfigError(where + ": expected an object {r, phi}");
    detail::reject_unknown(s, {"r", "phi"}, where);
    SqueezerSpec spec;
    spec.r = get_field<double>(s, "r", where);
    spec.phi = s.contains("phi") ? get_field<double>(s, "phi", where) : 0.0;
    return spec;
  };
  if (sq.is_array()) {
    for (size_t i = 0; i < sq.size(); ++i) cfg.squeezers.push_back(parse_sq(sq[i], "config.squeezers[" + std::to_string(i) + "]"));
  } else {
    cfg.squeezers.assign(cfg.modes, parse_sq(sq, "config.squeezers"));
  }

  if (j.contains("unitary")) {
    const auto& u = j.at("unitary");
    if (!u.is_object()) throw ConfigError("config.unitary: expected an object");
    detail::reject_unknown(u, {"haar_seed", "file", "identity"}, "config.unitary");
    if (u.size() != 1) throw ConfigError("config.unitary: give exactly one of haar_seed, file, identity");
    if (u.contains("haar_seed")) {
      cfg.unitary = haar_unitary(cfg.modes, get_field<std::uint64_t>(u, "haar_seed", "config.unitary"));
    } else if (u.contains("file")) {
      std::string path = get_field<std::string>(u, "file", "config.unitary");
      if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
      cfg.unitary = UnitaryMatrix(read_matrix_csv(path));
    } else {
      if (!get_field<bool>(u, "identity", "config.unitary")) throw ConfigError("config.unitary.identity must be true");
      cfg.unitary = UnitaryMatrix::identity(cfg.modes);
    }
  } else {
    cfg.unitary = UnitaryMatrix::identity(cfg.modes);
  }

  cfg.eta_signal = j.contains("eta_signal") ? detail::parse_eta(j.at("eta_signal"), cfg.modes, "config.eta_signal")
                                            : std::vector<double>(cfg.modes, 1.0);
  cfg.eta_herald = j.contains("eta_herald") ? detail::parse_eta(j.at("eta_herald"), cfg.modes, "config.eta_herald")
                                            : std::vector<double>(cfg.modes, 1.0);
  if (j.contains("pnr_cutoff")) cfg.pnr_cutoff = get_field<int>(j, "pnr_cutoff", "config");
  if (j.contains("fock_cutoff")) cfg.fock_cutoff = get_field<int>(j, "fock_cutoff", "config");
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    if (!s.is_object()) throw ConfigError("config.schedule: expected an object");
    detail::reject_unknown(s, {"block_shots", "pattern"}, "config.schedule");
    if (s.contains("block_shots")) {
      const auto& b = s.at("block_shots");
      cfg.schedule.block_shots.clear();
      if (b.is_number_integer()) {
        cfg.schedule.block_shots.push_back(b.get<std::int64_t>());
      } else if (b.is_array()) {
        for (const auto& v : b) {
          if (!v.is_number_integer()) throw ConfigError("config.schedule.block_shots: integers expected");
          cfg.schedule.block_shots.push_back(v.get<std::int64_t>());
        }
      } else {
        throw ConfigError("config.schedule.block_shots: integer or list expected");
      }
    }
    if (s.contains("pattern")) {
      const auto& p = s.at("pattern");
      cfg.schedule.pattern.clear();
      if (p.is_string()) {
        cfg.schedule.pattern.push_back(parse_regime(p.get<std::string>()));
      } else if (p.is_array()) {
        for (const auto& v : p) {
          if (!v.is_string()) throw ConfigError("config.schedule.pattern: strings expected");
          cfg.schedule.pattern.push_back(parse_regime(v.get<std::string>()));
        }
      } else {
        throw ConfigError("config.schedule.pattern: string or list expected");
      }
    }
  }
  if (j.contains("phase_drift_rms")) cfg.phase_drift_rms = get_field<double>(j, "phase_drift_rms", "config");
  if (j.contains("phase_drift_shared")) cfg.phase_drift_shared = get_field<bool>(j, "phase_drift_shared", "config");
  if (j.contains("guard_shots")) cfg.guard_shots = get_field<std::int64_t>(j, "guard_shots", "config");
  cfg.herald_detector.efficiency = cfg.eta_herald.front();
  if (j.contains("herald_detector")) {
    const auto& h = j.at("herald_detector");
    if (!h.is_object()) throw ConfigError("config.herald_detector: expected an object");
    detail::reject_unknown(h, {"detectors", "pulses_per_train", "blinding"}, "config.herald_detector");
    if (h.contains("detectors")) cfg.herald_detector.detectors = get_field<int>(h, "detectors", "config.herald_detector");
    if (h.contains("pulses_per_train")) {
      cfg.herald_detector.pulses_per_train = get_field<int>(h, "pulses_per_train", "config.herald_detector");
    }
    if (h.contains("blinding")) cfg.herald_detector.blinding_enabled = get_field<bool>(h, "blinding", "config.herald_detector");
  }
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed", "config");
  cfg.validate();
  return cfg;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline std::string parent_dir(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? "." : path.substr(0, pos);
}

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config(load_json_file(path), parent_dir(path));
}

// FNV-1a over the key-sorted compact dump, so key order does not matter.
inline std::string config_hash(const nlohmann::json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace bsamp
