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


#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bsamp/cli/commands.hpp"

namespace {

using namespace bsamp;
using namespace bsamp::cli;

std::string oracle_help() {
  std::string s = "suite: all";
  for (const auto& n : oracle_suites()) s += "|" + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bsamp: boson-sampling simulator and nonclassicality certifier"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = kDefaultSeed;
  auto* seed_opt = app.add_option("--seed", seed, "master seed (default " + std::to_string(kDefaultSeed) + ")");
  app.add_option("--out", g.out, "output path");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g.verbose, "print progress and summaries to stderr");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "draw samples from a configured experiment");
  simulate->add_option("--config,-c", sim.config_path, "experiment config (JSON)")->required();
  simulate->add_option("--shots,-n", sim.shots, "number of shots")->required();

  CertifyOptions cert;
  auto* certify = app.add_subcommand("certify", "time-binned minimum-eigenvalue report");
  certify->add_option("--samples,-s", cert.samples_path, "sample file (.jsonl or .jsonl.gz)")->required();
  certify->add_option("--bin-size", cert.bin_size, "shots per bin");
  certify->add_option("--bootstrap", cert.bootstrap_rounds, "bootstrap rounds")->check(CLI::NonNegativeNumber);

  std::string predict_config;
  auto* predict = app.add_subcommand("predict", "analytic means, squeezing and Pearson predictions");
  predict->add_option("--config,-c", predict_config, "experiment config (JSON)")->required();

  auto* analyze = app.add_subcommand("analyze", "characterization quantities");
  analyze->require_subcommand(1);

  G2Options g2o;
  auto* g2 = analyze->add_subcommand("g2", "second-order autocorrelation and Schmidt number");
  g2->add_option("--counts", g2o.counts, "comma-separated histogram counts for n = 0, 1, ...");
  g2->add_option("--samples", g2o.samples_path, "sample file");
  g2->add_option("--arm", g2o.arm, "herald or signal");

  HomOptions homo;
  double triggers = 0.0;
  auto* hom = analyze->add_subcommand("hom", "fit a HOM dip from delay,coincidences CSV");
  hom->add_option("--input,-i", homo.input, "two-column CSV")->required();
  hom->add_option("--width", homo.width, "fix the dip width (same unit as delay)");
  auto* mean_opt = hom->add_option("--mean-n", homo.mean_n, "apply multi-photon correction with this <n>");
  hom->add_option("--eta-h", homo.eta_h, "herald efficiency for the correction")->needs(mean_opt);
  hom->add_option("--eta-s", homo.eta_s, "signal efficiency for the correction")->needs(mean_opt);
  hom->add_option("--triggers", triggers, "triggers per delay point for the correction")->needs(mean_opt);

  KlyshkoOptions kly;
  auto* klyshko = analyze->add_subcommand("klyshko", "per-mode Klyshko efficiencies");
  klyshko->add_option("--samples", kly.samples_path, "sample file from an SBS identity run");
  klyshko->add_option("--coincidences", kly.coincidences, "comma-separated C_i");
  klyshko->add_option("--herald", kly.herald, "comma-separated H_i");
  klyshko->add_option("--signal", kly.signal, "comma-separated S_i");

  DispersionOptions disp;
  auto* dispersion = analyze->add_subcommand("dispersion", "dispersion-limited intensity visibility");
  dispersion->add_option("--tau-ps", disp.tau_ps, "pulse duration [ps]")->required();
  dispersion->add_option("--gvd-fs2-per-mm", disp.gvd_fs2_per_mm, "group-velocity dispersion [fs^2/mm]")->required();
  dispersion->add_option("--delta-l-m", disp.delta_l_m, "fiber length difference [m]")->required();

  SqueezingOptions sq;
  auto* squeezing = analyze->add_subcommand("squeezing", "reconstruct r and generated <n> from measured means");
  squeezing->add_option("--means", sq.means, "comma-separated measured <n> per mode");
  squeezing->add_option("--means-sigma", sq.means_sigma, "comma-separated uncertainties of the means");
  squeezing->add_option("--samples", sq.samples_path, "sample file to take the means from");
  squeezing->add_option("--arm", sq.arm, "herald or signal");
  squeezing->add_option("--eta", sq.eta, "comma-separated efficiencies (one value applies to all)")->required();
  squeezing->add_option("--eta-sigma", sq.eta_sigma, "comma-separated efficiency uncertainties");

  std::string suite = "all";
  auto* oracle = app.add_subcommand("oracle", "brute-force cross-validation suites");
  oracle->add_option("suite", suite, oracle_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;
  homo.triggers = triggers;

  try {
    if (*simulate) return cmd_simulate(sim, g, std::cerr);
    if (*certify) return cmd_certify(cert, g, std::cout);
    if (*predict) return cmd_predict(predict_config, g, std::cout);
    if (*g2) return cmd_analyze_g2(g2o, g, std::cout);
    if (*hom) return cmd_analyze_hom(homo, g, std::cout);
    if (*klyshko) return cmd_analyze_klyshko(kly, g, std::cout);
    if (*dispersion) return cmd_analyze_dispersion(disp, g, std::cout);
    if (*squeezing) return cmd_analyze_squeezing(sq, g, std::cout);
    if (*oracle) return cmd_oracle(suite, g, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "bsamp: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kUsage;
}
