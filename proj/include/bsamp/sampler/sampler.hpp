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
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <thread>
#include <vector>

#include "bsamp/error.hpp"
#include "bsamp/numerics/permanent.hpp"
#include "bsamp/numerics/rng.hpp"
#include "bsamp/sampler/alias.hpp"
#include "bsamp/sampler/config.hpp"
#include "bsamp/sampler/detector.hpp"
#include "bsamp/sampler/records.hpp"
#include "bsamp/states/fock.hpp"
#include "bsamp/states/gaussian_state.hpp"

namespace bsamp {

inline std::vector<SqueezerSpec> with_phases(const std::vector<SqueezerSpec>& specs, const std::vector<double>& phases) {
  if (phases.size() != specs.size()) throw DimensionError("phase vector length != modes");
  std::vector<SqueezerSpec> out = specs;
  for (size_t i = 0; i < out.size(); ++i) out[i].phi = phases[i];
  return out;
}

inline std::vector<double> configured_phases(const ExperimentConfig& cfg) {
  std::vector<double> p(cfg.modes);
  for (int i = 0; i < cfg.modes; ++i) p[i] = cfg.squeezers[i].phi;
  return p;
}

// GBS: M signal modes. SBS: 2M modes, heralds first. TBS: the M signal modes of SBS.
inline GaussianState build_output_state(const ExperimentConfig& cfg, Regime regime, const std::vector<double>& phases) {
  cfg.validate();
  const int m = cfg.modes;
  const auto specs = with_phases(cfg.squeezers, phases);
  if (regime == Regime::GBS) {
    return apply_loss(apply_unitary(smsv_state(specs), cfg.unitary), cfg.eta_signal);
  }
  std::vector<int> signal(m);
  for (int i = 0; i < m; ++i) signal[i] = m + i;
  std::vector<double> eta(cfg.eta_herald);
  eta.insert(eta.end(), cfg.eta_signal.begin(), cfg.eta_signal.end());
  const GaussianState sbs = apply_loss(apply_unitary(tmsv_state(specs), cfg.unitary, signal), eta);
  if (regime == Regime::SBS) return sbs;
  return sbs.reduced(signal);
}

// Clifford-Clifford sampler for Fock inputs through u; input_modes lists one entry per photon.
inline std::vector<int> clifford_clifford(const ComplexMatrix& u, std::vector<int> input_modes, Rng& rng) {
  const int m = static_cast<int>(u.rows());
  const int n = static_cast<int>(input_modes.size());
  std::vector<int> counts(m, 0);
  if (n == 0) return counts;
  if (n > kPermanentMaxDim) throw CapacityError("clifford_clifford: too many photons");
  for (int i = n - 1; i > 0; --i) std::swap(input_modes[i], input_modes[uniform_index(rng, i + 1)]);
  ComplexMatrix a(m, n);
  for (int c = 0; c < n; ++c) a.col(c) = u.col(input_modes[c]);

  std::vector<int> rows;
  std::vector<double> w(m);
  std::vector<cplx> minors;
  for (int k = 1; k <= n; ++k) {
    // minors[l] = Per(A[rows, {0..k-1} \ {l}]).
    minors.assign(k, cplx(0.0, 0.0));
    ComplexMatrix sub(k - 1, k - 1);
    for (int l = 0; l < k; ++l) {
      for (int r = 0; r < k - 1; ++r) {
        int cc = 0;
        for (int c = 0; c < k; ++c) {
          if (c == l) continue;
          sub(r, cc++) = a(rows[r], c);
        }
      }
      minors[l] = permanent(sub);
    }
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      cplx amp = 0;
      for (int l = 0; l < k; ++l) amp += a(i, l) * minors[l];
      w[i] = std::norm(amp);
      total += w[i];
    }
    double u01 = uniform01(rng) * total;
    int pick = m - 1;
    for (int i = 0; i < m; ++i) {
      if (u01 < w[i]) {
        pick = i;
        break;
      }
      u01 -= w[i];
    }
    rows.push_back(pick);
  }
  for (int r : rows) ++counts[r];
  return counts;
}

// P(n) = (1 - lambda^2) lambda^{2n} by inversion.
inline int sample_geometric(double lambda2, Rng& rng) {
  if (lambda2 <= 0.0) return 0;
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  const double n = std::floor(std::log(u) / std::log(lambda2));
  return n > 1e6 ? 1000000 : static_cast<int>(n);
}

struct SamplingStats {
  std::int64_t shots = 0;
  std::int64_t records = 0;
  std::int64_t guard_discarded = 0;
  std::int64_t overflow_shots = 0;
  double max_overflow_mass = 0.0;
  std::map<Regime, std::int64_t> records_per_regime;
  std::vector<Schedule::Block> blocks;
};

using RecordSink = std::function<void(const SampleRecord&)>;

namespace detail {

constexpr std::uint64_t kStreamDrift = 0x6472696674ULL;
constexpr std::uint64_t kStreamShots = 0x73686f7473ULL;
constexpr int kChunkTrains = 8192;

struct GbsTable {
  FockDistribution dist;
  AliasTable alias;
  double overflow = 0.0;
};

inline std::shared_ptr<GbsTable> make_gbs_table(const ExperimentConfig& cfg, const std::vector<double>& phases) {
  const int c = cfg.effective_fock_cutoff(Regime::GBS);
  const double count = FockDistribution::pattern_count(cfg.modes, c);
  if (count > kFockEnumerationBudget) {
    throw BudgetError("GBS enumeration of (fock_cutoff+1)^modes = " + std::to_string(count) +
                      " patterns exceeds budget; lower fock_cutoff or modes");
  }
  // Loss after the interferometer is binomial thinning, so enumerate the lossless pure state.
  ExperimentConfig lossless = cfg;
  lossless.eta_signal.assign(cfg.modes, 1.0);
  const GaussianState state = build_output_state(lossless, Regime::GBS, phases);
  auto table = std::make_shared<GbsTable>(GbsTable{fock_distribution(state, c), AliasTable(), 0.0});
  std::vector<double> w = table->dist.probabilities();
  double mass = 0.0;
  for (double p : w) mass += p;
  table->overflow = std::max(0.0, 1.0 - mass);
  w.push_back(table->overflow);
  table->alias = AliasTable(w);
  return table;
}

struct ShotContext {
  const ExperimentConfig& cfg;
  Regime regime;
  const GbsTable* gbs = nullptr;
  std::vector<double> lambda2;
  int fock_cutoff = 0;
  bool uniform_loss = true;
};

inline PhotonPattern full_pattern(int modes, int value) { return PhotonPattern(std::vector<int>(modes, value)); }

// Returns false for an overflow shot.
inline bool sample_shot(const ShotContext& ctx, Rng& rng, std::vector<HeraldDetectorState>& heralds, SampleRecord& rec) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int m = cfg.modes;
  rec.herald = PhotonPattern::zeros(m);
  if (ctx.regime == Regime::GBS) {
    const size_t idx = ctx.gbs->alias.draw(rng);
    if (idx == ctx.gbs->dist.size()) {
      rec.signal = full_pattern(m, cfg.pnr_cutoff);
      return false;
    }
    PhotonPattern p = ctx.gbs->dist.pattern(idx);
    for (int i = 0; i < m; ++i) p[i] = binomial_small(rng, p[i], cfg.eta_signal[i]);
    rec.signal = apply_pnr_truncation(p, cfg.pnr_cutoff);
    return true;
  }

  std::vector<int> n(m);
  bool overflow = false;
  for (int i = 0; i < m; ++i) {
    n[i] = sample_geometric(ctx.lambda2[i], rng);
    overflow = overflow || n[i] > ctx.fock_cutoff;
  }
  if (!overflow && ctx.regime == Regime::SBS) {
    for (int i = 0; i < m; ++i) {
      rec.herald[i] = cfg.herald_detector.blinding_enabled ? heralds[i].detect(n[i], rng)
                                                           : binomial_small(rng, n[i], cfg.eta_herald[i]);
    }
    rec.herald = apply_pnr_truncation(rec.herald, cfg.pnr_cutoff);
  }
  std::vector<int> inputs;
  if (!overflow) {
    for (int i = 0; i < m; ++i) {
      // Uniform loss commutes with the interferometer, so thin before it.
      const int k = ctx.uniform_loss ? binomial_small(rng, n[i], cfg.eta_signal[i]) : n[i];
      inputs.insert(inputs.end(), k, i);
    }
    overflow = static_cast<int>(inputs.size()) > kPermanentMaxDim;
  }
  if (overflow) {
    if (ctx.regime == Regime::SBS) rec.herald = full_pattern(m, cfg.pnr_cutoff);
    rec.signal = full_pattern(m, cfg.pnr_cutoff);
    return false;
  }
  PhotonPattern out(clifford_clifford(cfg.unitary.matrix(), std::move(inputs), rng));
  if (!ctx.uniform_loss) {
    for (int i = 0; i < m; ++i) out[i] = binomial_small(rng, out[i], cfg.eta_signal[i]);
  }
  rec.signal = apply_pnr_truncation(out, cfg.pnr_cutoff);
  return true;
}

}  // namespace detail

// Per-block phases: a Gaussian random walk from the configured phases, constant within a block.
inline std::vector<std::vector<double>> block_phases(const ExperimentConfig& cfg, std::uint64_t seed, std::int64_t blocks) {
  std::vector<std::vector<double>> out;
  std::vector<double> cur = configured_phases(cfg);
  for (std::int64_t b = 0; b < blocks; ++b) {
    if (b > 0 && cfg.phase_drift_rms > 0.0) {
      Rng rng = make_rng(seed, detail::kStreamDrift, static_cast<std::uint64_t>(b));
      const double shared = standard_normal(rng) * cfg.phase_drift_rms;
      for (int i = 0; i < cfg.modes; ++i) {
        cur[i] += cfg.phase_drift_shared ? shared : standard_normal(rng) * cfg.phase_drift_rms;
      }
    }
    out.push_back(cur);
  }
  return out;
}

// Records are emitted in time-bin order; output does not depend on the thread count.
inline SamplingStats draw_samples(const ExperimentConfig& cfg, std::int64_t n_shots, std::uint64_t seed,
                                  const RecordSink& sink, int threads = 1) {
  cfg.validate();
  if (n_shots < 1) throw ConfigError("draw_samples: n_shots must be >= 1");
  threads = std::max(1, threads);
  SamplingStats stats;
  stats.shots = n_shots;
  stats.blocks = cfg.schedule.blocks(n_shots);
  const auto phases = block_phases(cfg, seed, static_cast<std::int64_t>(stats.blocks.size()));
  const std::int64_t chunk = static_cast<std::int64_t>(cfg.herald_detector.pulses_per_train) * detail::kChunkTrains;

  std::shared_ptr<detail::GbsTable> gbs;
  std::vector<double> gbs_phases;
  for (const auto& block : stats.blocks) {
    detail::ShotContext ctx{cfg, block.regime, nullptr, {}, 0, true};
    if (block.regime == Regime::GBS) {
      if (!gbs || gbs_phases != phases[block.index]) {
        gbs = detail::make_gbs_table(cfg, phases[block.index]);
        gbs_phases = phases[block.index];
        stats.max_overflow_mass = std::max(stats.max_overflow_mass, gbs->overflow);
      }
      ctx.gbs = gbs.get();
    } else {
      ctx.fock_cutoff = cfg.effective_fock_cutoff(block.regime);
      ctx.uniform_loss = cfg.uniform_signal_loss();
      for (const auto& s : cfg.squeezers) ctx.lambda2.push_back(s.lambda() * s.lambda());
    }

    const std::int64_t keep_lo = block.start + cfg.guard_shots;
    const std::int64_t keep_hi = block.end - cfg.guard_shots;
    const std::int64_t n_chunks = (block.end - block.start + chunk - 1) / chunk;
    struct ChunkOut {
      std::vector<SampleRecord> records;
      std::int64_t overflow = 0;
    };
    const std::int64_t wave = 2 * threads;
    for (std::int64_t first = 0; first < n_chunks; first += wave) {
      const std::int64_t count = std::min(wave, n_chunks - first);
      std::vector<ChunkOut> outs(count);
      auto work = [&](std::int64_t slot) {
        const std::int64_t c = first + slot;
        const std::int64_t lo = block.start + c * chunk;
        const std::int64_t hi = std::min(block.end, lo + chunk);
        Rng rng = make_rng(seed, detail::kStreamShots ^ static_cast<std::uint64_t>(block.index),
                           static_cast<std::uint64_t>(c));
        std::vector<HeraldDetectorState> heralds;
        for (int i = 0; i < cfg.modes; ++i) {
          HeraldDetectorModel hm = cfg.herald_detector;
          hm.efficiency = cfg.eta_herald[i];
          heralds.emplace_back(hm);
        }
        ChunkOut& out = outs[slot];
        for (std::int64_t t = lo; t < hi; ++t) {
          if ((t - block.start) % cfg.herald_detector.pulses_per_train == 0) {
            for (auto& h : heralds) h.reset();
          }
          SampleRecord rec;
          rec.regime = block.regime;
          rec.time_bin = t;
          if (!detail::sample_shot(ctx, rng, heralds, rec)) ++out.overflow;
          if (t < keep_lo || t >= keep_hi) continue;
          out.records.push_back(std::move(rec));
        }
      };
      if (threads == 1 || count == 1) {
        for (std::int64_t s = 0; s < count; ++s) work(s);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            for (std::int64_t s = t; s < count; s += threads) work(s);
          });
        }
        for (auto& th : pool) th.join();
      }
      for (auto& o : outs) {
        stats.overflow_shots += o.overflow;
        for (const auto& r : o.records) {
          sink(r);
          ++stats.records;
          ++stats.records_per_regime[r.regime];
        }
      }
    }
    stats.guard_discarded += (block.end - block.start) - std::max<std::int64_t>(0, keep_hi - keep_lo);
  }
  return stats;
}

inline std::vector<SampleRecord> draw_samples(const ExperimentConfig& cfg, std::int64_t n_shots, std::uint64_t seed,
                                              int threads = 1, SamplingStats* stats_out = nullptr) {
  std::vector<SampleRecord> out;
  SamplingStats s = draw_samples(cfg, n_shots, seed, [&](const SampleRecord& r) { out.push_back(r); }, threads);
  if (stats_out) *stats_out = s;
  return out;
}

}  // namespace bsamp
