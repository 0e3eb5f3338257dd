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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bsamp/analysis/analysis.hpp"
#include "bsamp/certifier/certifier.hpp"
#include "bsamp/certifier/report.hpp"
#include "bsamp/error.hpp"
#include "bsamp/numerics/hafnian.hpp"
#include "bsamp/numerics/permanent.hpp"
#include "bsamp/sampler/config.hpp"
#include "bsamp/sampler/records.hpp"
#include "bsamp/sampler/sampler.hpp"
#include "bsamp/states/fock.hpp"
#include "bsamp/states/gaussian_state.hpp"
#include "json.hpp"

namespace bsamp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kBudget = 3, kNumeric = 4 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
  bool verbose = false;
};

// Maps a library exception onto the exit-code contract.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CapacityError*>(&e) || dynamic_cast<const BudgetError*>(&e)) return kBudget;
  if (dynamic_cast<const NumericError*>(&e)) return kNumeric;
  if (dynamic_cast<const Error*>(&e)) return kUsage;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kUsage;
  return kFailure;
}

inline void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config_path;
  std::int64_t shots = 0;
};

inline nlohmann::json make_manifest(const nlohmann::json& config_json, std::uint64_t seed, const SamplingStats& st,
                                    const std::string& samples_path) {
  nlohmann::json m;
  m["tool"] = "bsamp";
  m["version"] = kToolVersion;
  m["config_hash"] = config_hash(config_json);
  m["seed"] = seed;
  m["shots"] = st.shots;
  m["records"] = st.records;
  m["guard_discarded"] = st.guard_discarded;
  m["overflow_shots"] = st.overflow_shots;
  m["max_overflow_mass"] = st.max_overflow_mass;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [r, n] : st.records_per_regime) per[regime_name(r)] = n;
  m["records_per_regime"] = per;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : st.blocks) {
    blocks.push_back({{"index", b.index}, {"regime", regime_name(b.regime)}, {"start", b.start}, {"end", b.end}});
  }
  m["blocks"] = blocks;
  m["artifacts"] = {{"samples", samples_path}};
  return m;
}

inline std::string manifest_path(const std::string& samples_path) { return samples_path + ".manifest.json"; }

inline int cmd_simulate(const SimulateOptions& opt, const GlobalOptions& g, std::ostream& log) {
  if (opt.shots < 1) throw ConfigError("simulate: --shots must be >= 1");
  if (g.out.empty()) throw ConfigError("simulate: --out is required");
  const nlohmann::json cj = load_json_file(opt.config_path);
  const ExperimentConfig cfg = parse_config(cj, parent_dir(opt.config_path));
  cfg.validate();
  const std::uint64_t seed = g.seed.value_or(cfg.seed.value_or(kDefaultSeed));
  SamplingStats st;
  {
    LineWriter w(g.out);
    st = draw_samples(cfg, opt.shots, seed, [&](const SampleRecord& r) { w.write_line(to_json_line(r)); }, g.threads);
    w.close();
  }
  emit_json(make_manifest(cj, seed, st, g.out), manifest_path(g.out), log);
  if (g.verbose) {
    log << "simulate: " << st.records << " records, " << st.guard_discarded << " guard-discarded, "
        << st.overflow_shots << " overflow shots, seed " << seed << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
  std::string samples_path;
  std::int64_t bin_size = 1000000;
  int bootstrap_rounds = kDefaultBootstrapRounds;
};

inline int cmd_certify(const CertifyOptions& opt, const GlobalOptions& g, std::ostream& out,
                       std::ostream& log = std::cerr) {
  const std::uint64_t seed = g.seed.value_or(kDefaultSeed);
  TimeBinner binner(opt.bin_size, opt.bootstrap_rounds, seed, g.threads);
  std::map<Regime, PearsonAccumulator> pearson_by_regime;
  const std::int64_t n = for_each_record(opt.samples_path, [&](const SampleRecord& r) {
    binner.add(r);
    if (r.herald.total() || r.regime != Regime::GBS) pearson_by_regime[r.regime].add(r);
  });
  if (n == 0) throw ConfigError("certify: " + opt.samples_path + " contains no records");
  const TimeBinnedReport rep = binner.finish();
  if (rep.bins.empty()) throw ConfigError("certify: no bin reached 100 shots");
  if (g.out.empty()) {
    write_report_csv(out, rep);
  } else {
    write_report_csv(g.out, rep);
  }
  if (g.verbose) {
    for (auto& [regime, acc] : pearson_by_regime) {
      const PearsonResult p = acc.result(0, seed);
      log << "pearson " << regime_name(regime) << ": " << (p.defined ? std::to_string(p.value) : "undefined") << '\n';
    }
    for (const auto& [regime, env] : rep.envelopes) {
      log << regime_name(regime) << ": " << env.bins << " bins, min eigenvalue in [" << env.lowest << ", "
          << env.highest << "]\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- predict

inline nlohmann::json predict_summary(const ExperimentConfig& cfg) {
  cfg.validate();
  nlohmann::json j;
  nlohmann::json modes = nlohmann::json::array();
  double gamma = 0.0, r_mean = 0.0;
  for (int i = 0; i < cfg.modes; ++i) {
    const double r = cfg.squeezers[i].r;
    const double n = cfg.squeezers[i].mean_photons();
    const double g = pearson_predicted(r, cfg.eta_herald[i], cfg.eta_signal[i], Regime::SBS);
    gamma += g / cfg.modes;
    r_mean += r / cfg.modes;
    modes.push_back({{"mode", i},
                     {"r", r},
                     {"mean_photons_generated", n},
                     {"mean_photons_herald", n * cfg.eta_herald[i]},
                     {"mean_photons_signal", n * cfg.eta_signal[i]},
                     {"squeezing_db", kDbPerNeper * r},
                     {"pearson_sbs", g}});
  }
  j["modes"] = modes;
  j["pearson_sbs"] = gamma;
  j["pearson_gbs"] = pearson_predicted(r_mean, 0.0, 0.0, Regime::GBS);
  j["pearson_tbs"] = pearson_predicted(r_mean, 0.0, 0.0, Regime::TBS);
  j["squeezing_db"] = kDbPerNeper * r_mean;
  return j;
}

inline int cmd_predict(const std::string& config_path, const GlobalOptions& g, std::ostream& out) {
  emit_json(predict_summary(load_config(config_path)), g.out, out);
  return kOk;
}

// ---------------------------------------------------------------- analyze

inline std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      size_t used = 0;
      v.push_back(std::stod(item.substr(b), &used));
      if (item.find_first_not_of(" \t", b + used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse number '" + item + "'");
    }
  }
  return v;
}

enum class Arm { Herald, Signal };

inline Arm parse_arm(const std::string& s) {
  if (s == "herald") return Arm::Herald;
  if (s == "signal") return Arm::Signal;
  throw ConfigError("arm must be 'herald' or 'signal', got '" + s + "'");
}

// Per-mode photon-number histograms of one arm of a sample file.
inline std::vector<std::vector<double>> arm_histograms(const std::string& path, Arm arm) {
  std::vector<std::vector<double>> h;
  const std::int64_t n = for_each_record(path, [&](const SampleRecord& r) {
    const PhotonPattern& p = arm == Arm::Herald ? r.herald : r.signal;
    if (h.empty()) h.resize(p.size());
    if (static_cast<int>(h.size()) != p.size()) throw DimensionError("analyze: inconsistent mode count");
    for (int i = 0; i < p.size(); ++i) {
      if (p[i] >= static_cast<int>(h[i].size())) h[i].resize(p[i] + 1, 0.0);
      h[i][p[i]] += 1.0;
    }
  });
  if (n == 0) throw ConfigError("analyze: " + path + " contains no records");
  return h;
}

struct G2Options {
  std::string counts;
  std::string samples_path;
  std::string arm = "herald";
};

inline nlohmann::json g2_json(const CountHistogram& h) {
  const G2Result r = g2_checked(h);
  nlohmann::json j{{"g2", r.value}, {"tail_mass", r.tail_mass}, {"tail_warning", r.tail_warning},
                   {"mean_photons", h.mean()}};
  j["schmidt_modes"] = r.value > 1.0 ? nlohmann::json(schmidt_modes(r.value)) : nlohmann::json(nullptr);
  return j;
}

inline int cmd_analyze_g2(const G2Options& opt, const GlobalOptions& g, std::ostream& out) {
  nlohmann::json j;
  if (!opt.counts.empty()) {
    j = g2_json(CountHistogram(parse_number_list(opt.counts, "--counts")));
  } else if (!opt.samples_path.empty()) {
    const auto hs = arm_histograms(opt.samples_path, parse_arm(opt.arm));
    nlohmann::json modes = nlohmann::json::array();
    double avg = 0.0;
    int used = 0;
    for (const auto& h : hs) {
      const CountHistogram ch(h);
      if (ch.mean() <= 0.0) {
        modes.push_back(nullptr);
        continue;
      }
      nlohmann::json m = g2_json(ch);
      avg += m["g2"].get<double>();
      ++used;
      modes.push_back(m);
    }
    if (used == 0) throw NumericError("g2: every mode has zero mean photon number");
    avg /= used;
    j["modes"] = modes;
    j["g2"] = avg;
    j["schmidt_modes"] = avg > 1.0 ? nlohmann::json(schmidt_modes(avg)) : nlohmann::json(nullptr);
  } else {
    throw ConfigError("analyze g2: give --counts or --samples");
  }
  emit_json(j, g.out, out);
  return kOk;
}

inline std::vector<HomPoint> read_hom_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<HomPoint> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> v;
    try {
      v = parse_number_list(line, "hom csv");
    } catch (const ConfigError&) {
      if (pts.empty()) continue;  // header row
      throw ConfigError(path + " line " + std::to_string(line_no) + ": malformed row");
    }
    if (v.size() != 2) throw ConfigError(path + " line " + std::to_string(line_no) + ": expected two columns");
    pts.push_back({v[0], v[1]});
  }
  return pts;
}

struct HomOptions {
  std::string input;
  std::optional<double> width;
  std::optional<double> mean_n;
  double eta_h = 0.0;
  double eta_s = 0.0;
  double triggers = 0.0;
};

inline int cmd_analyze_hom(const HomOptions& opt, const GlobalOptions& g, std::ostream& out) {
  HomFitOptions fo;
  fo.fixed_width = opt.width;
  if (opt.mean_n) fo.correction = HomCorrection{*opt.mean_n, opt.eta_h, opt.eta_s, opt.triggers};
  const HomFit f = hom_scan(read_hom_csv(opt.input), fo);
  emit_json({{"visibility", f.visibility},
             {"operating_point", f.center},
             {"width", f.width},
             {"baseline", f.baseline},
             {"rms_residual", f.rms_residual},
             {"flat", f.flat},
             {"corrected", opt.mean_n.has_value()}},
            g.out, out);
  return kOk;
}

struct KlyshkoOptions {
  std::string samples_path;
  std::string coincidences, herald, signal;
};

inline int cmd_analyze_klyshko(const KlyshkoOptions& opt, const GlobalOptions& g, std::ostream& out) {
  KlyshkoCounts k;
  if (!opt.samples_path.empty()) {
    k = klyshko_counts(read_records(opt.samples_path));
  } else {
    k.coincidences = parse_number_list(opt.coincidences, "--coincidences");
    k.herald_singles = parse_number_list(opt.herald, "--herald");
    k.signal_singles = parse_number_list(opt.signal, "--signal");
  }
  if (k.coincidences.empty()) throw ConfigError("analyze klyshko: no counts");
  const auto res = klyshko(k);
  nlohmann::json modes = nlohmann::json::array();
  double ms = 0.0, mh = 0.0;
  bool unphysical = false;
  for (const auto& m : res) {
    modes.push_back({{"eta_signal", m.eta_signal},
                     {"eta_signal_sigma", m.eta_signal_sigma},
                     {"eta_herald", m.eta_herald},
                     {"eta_herald_sigma", m.eta_herald_sigma},
                     {"unphysical", m.unphysical}});
    ms += m.eta_signal / res.size();
    mh += m.eta_herald / res.size();
    unphysical = unphysical || m.unphysical;
  }
  emit_json({{"modes", modes}, {"mean_eta_signal", ms}, {"mean_eta_herald", mh}, {"unphysical", unphysical}}, g.out,
            out);
  return kOk;
}

struct DispersionOptions {
  double tau_ps = 1.0;
  double gvd_fs2_per_mm = 0.0;
  double delta_l_m = 0.0;
};

inline int cmd_analyze_dispersion(const DispersionOptions& opt, const GlobalOptions& g, std::ostream& out) {
  const double tau = opt.tau_ps * 1e-12;
  const double gvd = opt.gvd_fs2_per_mm * 1e-30 / 1e-3;
  emit_json({{"visibility", dispersion_visibility(tau, gvd, opt.delta_l_m)},
             {"tau0_s", tau},
             {"gvd_s2_per_m", gvd},
             {"delta_l_m", opt.delta_l_m}},
            g.out, out);
  return kOk;
}

struct SqueezingOptions {
  std::string means, eta, means_sigma, eta_sigma;
  std::string samples_path;
  std::string arm = "herald";
};

inline int cmd_analyze_squeezing(const SqueezingOptions& opt, const GlobalOptions& g, std::ostream& out) {
  std::vector<double> means, sig;
  if (!opt.samples_path.empty()) {
    for (const auto& h : arm_histograms(opt.samples_path, parse_arm(opt.arm))) {
      const CountHistogram ch(h);
      const auto p = ch.normalized();
      double m1 = 0.0, m2 = 0.0;
      for (size_t n = 0; n < p.size(); ++n) {
        m1 += n * p[n];
        m2 += n * n * p[n];
      }
      means.push_back(m1);
      sig.push_back(std::sqrt(std::max(0.0, m2 - m1 * m1) / ch.total()));
    }
  } else {
    means = parse_number_list(opt.means, "--means");
    if (!opt.means_sigma.empty()) sig = parse_number_list(opt.means_sigma, "--means-sigma");
  }
  std::vector<double> eta = parse_number_list(opt.eta, "--eta");
  if (eta.size() == 1 && means.size() > 1) eta.assign(means.size(), eta[0]);
  std::vector<double> eta_sig;
  if (!opt.eta_sigma.empty()) {
    eta_sig = parse_number_list(opt.eta_sigma, "--eta-sigma");
    if (eta_sig.size() == 1 && means.size() > 1) eta_sig.assign(means.size(), eta_sig[0]);
  }
  const SqueezingEstimate e = reconstruct_squeezing(means, eta, sig, eta_sig);
  emit_json({{"r", e.r},
             {"r_sigma", e.r_sigma},
             {"squeezing_db", e.db},
             {"squeezing_db_sigma", e.db_sigma},
             {"mean_photons_generated", e.n_gen},
             {"mean_photons_generated_sigma", e.n_gen_sigma},
             {"mean_photons_generated_per_mode", e.n_gen_per_mode}},
            g.out, out);
  return kOk;
}

// ---------------------------------------------------------------- oracle

struct OracleCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return std::isfinite(error) && error <= tolerance; }
};

namespace oracle_detail {

inline ComplexMatrix random_complex(int n, Rng& rng) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = cplx(standard_normal(rng), standard_normal(rng));
  }
  return m;
}

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline std::vector<OracleCheck> permanent_suite(std::uint64_t seed) {
  Rng rng = make_rng(seed, 1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ComplexMatrix m = random_complex(1 + t % 6, rng);
    worst = std::max(worst, rel_err(permanent(m), permanent_naive(m)));
  }
  double unit = 0.0;
  for (int n = 1; n <= 8; ++n) unit = std::max(unit, std::abs(permanent(ComplexMatrix::Identity(n, n)) - 1.0));
  return {{"glynn vs naive (100 matrices, dim<=6)", worst, 1e-10}, {"per(I) = 1", unit, 1e-14}};
}

inline std::vector<OracleCheck> hafnian_suite(std::uint64_t seed) {
  Rng rng = make_rng(seed, 2);
  double block = 0.0, pt = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 5;
    const ComplexMatrix b = random_complex(n, rng);
    ComplexMatrix a = ComplexMatrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = b;
    a.bottomLeftCorner(n, n) = b.transpose();
    block = std::max(block, rel_err(hafnian(a), permanent(b)));
    ComplexMatrix s = random_complex(2 * n, rng);
    s = (0.5 * (s + s.transpose())).eval();
    pt = std::max(pt, rel_err(hafnian_power_trace(s), hafnian_matchings(s)));
  }
  double ones = 0.0;
  double df = 1.0;
  for (int n = 2; n <= 12; n += 2) {
    if (n > 2) df *= n - 1;
    ones = std::max(ones, std::abs(hafnian(ComplexMatrix::Ones(n, n)) - df) / df);
  }
  return {{"haf([[0,B],[B^T,0]]) = per(B) (100 matrices, n<=5)", block, 1e-9},
          {"power-trace vs matchings (100 matrices)", pt, 1e-9},
          {"haf(J_2n) = (2n-1)!!", ones, 1e-12}};
}

inline double smsv_probability(double r, int n) {
  if (n % 2) return 0.0;
  const int k = n / 2;
  const double t = std::tanh(r);
  return std::exp(std::lgamma(n + 1.0) - 2.0 * std::lgamma(k + 1.0) - n * std::log(2.0) + n * std::log(t)) /
         std::cosh(r);
}

inline double tmsv_probability(double r, int n, int m) {
  if (n != m) return 0.0;
  const double t = std::tanh(r);
  return std::pow(t, 2 * n) / (std::cosh(r) * std::cosh(r));
}

inline std::vector<OracleCheck> fock_suite() {
  double smsv = 0.0, tmsv = 0.0;
  for (double r : {0.3, 0.5, 0.9}) {
    const GaussianState s = smsv_state({{r, 0.4}});
    for (int n = 0; n <= 10; ++n) {
      smsv = std::max(smsv, std::abs(fock_probability(s, PhotonPattern{n}) - smsv_probability(r, n)));
    }
  }
  for (double r : {0.3, 0.5}) {
    const GaussianState s = tmsv_state({{r, 0.2}});
    for (int n = 0; n <= 10; ++n) {
      for (int m = 0; n + m <= 10; ++m) {
        tmsv = std::max(tmsv, std::abs(fock_probability(s, PhotonPattern{n, m}) - tmsv_probability(r, n, m)));
      }
    }
  }
  const GaussianState th = thermal_state({0.7});
  double thermal = 0.0;
  for (int n = 0; n <= 10; ++n) {
    thermal = std::max(thermal, std::abs(fock_probability(th, PhotonPattern{n}) - std::pow(0.7, n) / std::pow(1.7, n + 1)));
  }
  return {{"SMSV hafnian vs closed form (r in {0.3,0.5,0.9}, n<=10)", smsv, 1e-9},
          {"TMSV hafnian vs closed form (r in {0.3,0.5}, total<=10)", tmsv, 1e-9},
          {"thermal hafnian vs geometric law", thermal, 1e-9}};
}

// Counts distinct detectors hit over all d^n photon-to-detector assignments.
inline std::vector<double> enumerate_blinding(int n, int d) {
  std::vector<double> p(std::min(n, d) + 1, 0.0);
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= d;
  std::vector<int> digits(n, 0);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t x = idx;
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i) {
      mask |= 1ULL << (x % d);
      x /= d;
    }
    p[std::popcount(mask)] += 1.0 / static_cast<double>(total);
  }
  return p;
}

inline std::vector<OracleCheck> blinding_suite() {
  double worst = 0.0;
  for (int n = 0; n <= 7; ++n) {
    for (int d = 1; d <= 6; ++d) {
      const auto a = blinding_distribution(n, d);
      const auto b = enumerate_blinding(n, d);
      for (size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
  }
  double cols = 0.0;
  const HeraldDetectorModel m{16, 8, 0.4, true};
  for (int pulse : {0, 7}) {
    const auto mat = herald_assignment_matrix(m, 2.3, pulse);
    for (size_t n = 0; n < mat.size(); ++n) {
      double s = 0.0;
      for (size_t l = 0; l < mat.size(); ++l) s += mat[l][n];
      cols = std::max(cols, std::abs(s - 1.0));
    }
  }
  return {{"occupancy law vs d^n enumeration (n<=7, d<=6)", worst, 1e-11},
          {"assignment matrix columns sum to 1", cols, 1e-10}};
}

inline std::vector<OracleCheck> criterion_suite(std::uint64_t seed) {
  // Exact criterion matrix of a lossless pair from its Fock distribution.
  double anchor = 0.0;
  for (double mean : {0.1, 0.5, 1.0}) {
    const GaussianState s = tmsv_state({{std::asinh(std::sqrt(mean)), 0.0}});
    const FockDistribution dist = fock_distribution(s, 40);
    double n0 = 0, n1 = 0, n00 = 0, n11 = 0, n01 = 0;
    for (size_t i = 0; i < dist.size(); ++i) {
      const PhotonPattern p = dist.pattern(i);
      const double w = dist.probabilities()[i];
      n0 += w * p[0];
      n1 += w * p[1];
      n00 += w * p[0] * p[0];
      n11 += w * p[1] * p[1];
      n01 += w * p[0] * p[1];
    }
    RealMatrix c(2, 2);
    c << n00 - n0 * n0 - n0, n01 - n0 * n1, n01 - n0 * n1, n11 - n1 * n1 - n1;
    anchor = std::max(anchor, std::abs(min_eigenvalue_symmetric(SymmetricMatrix(c)).value + mean));
  }
  // Negative-eigenvalue counts of C - B and the moment matrix agree.
  Rng rng = make_rng(seed, 3);
  double mismatches = 0.0;
  auto negatives = [](const SymmetricMatrix& s) {
    const Eigensystem e = jacobi_eigensystem(s);
    int c = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) c += e.values[i] < -1e-12;
    return c;
  };
  for (int t = 0; t < 50; ++t) {
    const int m = 2 + t % 3;
    MomentAccumulator acc(m);
    for (int s = 0; s < 100; ++s) {
      PhotonPattern p = PhotonPattern::zeros(m);
      p[uniform_index(rng, m)] = uniform_index(rng, 3);
      acc.accumulate(p, 1 + uniform_index(rng, 5));
    }
    mismatches += negatives(criterion_matrix(acc)) != negatives(moment_matrix(acc));
  }
  return {{"lossless pair min eigenvalue = -<n> (exact moments)", anchor, 1e-9},
          {"moment matrix and C-B negative counts agree (50 cases)", mismatches, 0.0}};
}

inline std::vector<OracleCheck> eigen_suite(std::uint64_t seed) {
  Rng rng = make_rng(seed, 4);
  double worst = 0.0, vec = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 9;
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = standard_normal(rng);
    }
    const SymmetricMatrix s(a);
    const Eigensystem mine = jacobi_eigensystem(s);
    Eigen::SelfAdjointEigenSolver<RealMatrix> ref(s.matrix());
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(mine.values[i] - ref.eigenvalues()[i]));
    const MinEigen me = min_eigenvalue_symmetric(s);
    vec = std::max(vec, (s.matrix() * me.vector - me.value * me.vector).norm());
  }
  return {{"Jacobi vs Eigen self-adjoint solver (100 matrices, dim<=9)", worst, 1e-10},
          {"min eigenpair residual", vec, 1e-10}};
}

}  // namespace oracle_detail

inline const std::vector<std::string>& oracle_suites() {
  static const std::vector<std::string> names{"permanent", "hafnian", "fock", "blinding", "criterion", "eigen"};
  return names;
}

inline std::vector<OracleCheck> run_oracle_suite(const std::string& name, std::uint64_t seed) {
  using namespace oracle_detail;
  if (name == "permanent") return permanent_suite(seed);
  if (name == "hafnian") return hafnian_suite(seed);
  if (name == "fock") return fock_suite();
  if (name == "blinding") return blinding_suite();
  if (name == "criterion") return criterion_suite(seed);
  if (name == "eigen") return eigen_suite(seed);
  throw ConfigError("oracle: unknown suite '" + name + "'");
}

inline int cmd_oracle(const std::string& suite, const GlobalOptions& g, std::ostream& out) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = oracle_suites();
  } else {
    if (std::find(oracle_suites().begin(), oracle_suites().end(), suite) == oracle_suites().end()) {
      throw ConfigError("oracle: unknown suite '" + suite + "'");
    }
    names = {suite};
  }
  const std::uint64_t seed = g.seed.value_or(kDefaultSeed);
  bool ok = true;
  for (const auto& n : names) {
    for (const auto& c : run_oracle_suite(n, seed)) {
      out << (c.pass() ? "PASS " : "FAIL ") << n << ": " << c.name << "  error=" << std::setprecision(3)
          << std::scientific << c.error << " tol=" << c.tolerance << std::defaultfloat << '\n';
      ok = ok && c.pass();
    }
  }
  return ok ? kOk : kFailure;
}

}  // namespace bsamp::cli
