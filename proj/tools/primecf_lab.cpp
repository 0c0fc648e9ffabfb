#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "primecf/experiments.hpp"

// Config-driven experiment runner. Every config-file key can be
// overridden by the CLI flag of the same name; exit code is 0 iff no
// statistic carries a fail verdict.
int main(int argc, char** argv) {
  namespace ex = primecf::experiments;

  CLI::App app{"primecf-lab: continued-fraction prime-digit experiments"};
  app.set_version_flag("--version", ex::kVersion);

  std::string configPath;
  bool list = false;
  ex::ExperimentConfig fromFlags;  // collected separately, then layered over the file
  bool haveN = false, haveTraj = false, haveSeed = false, haveGamma = false, haveLevel = false,
       haveTheta = false, haveModulus = false, haveThreads = false, haveSieve = false;

  app.add_flag("--list", list, "list experiments and what they check");
  app.add_option("--config", configPath, "config file with key=value lines");
  app.add_option("--experiment", fromFlags.experiment, "experiment name");
  auto* optN = app.add_option("--n", fromFlags.n, "digits per trajectory (poisson: total hits)");
  auto* optT = app.add_option("--trajectories", fromFlags.trajectories, "number of trajectories");
  auto* optS = app.add_option("--seed", fromFlags.seed, "master seed");
  app.add_option("--backend", fromFlags.backend, "natural-extension | lazy-real");
  app.add_option("--initial-law", fromFlags.initialLaw, "gauss | lebesgue");
  auto* optG = app.add_option("--gamma", fromFlags.gamma, "power exponent (moments)");
  auto* optL = app.add_option("--level", fromFlags.level, "threshold level l");
  auto* optTh = app.add_option("--theta", fromFlags.theta, "size-mark parameter in (0,1)");
  auto* optM = app.add_option("--modulus", fromFlags.modulus, "residue modulus m");
  app.add_option("--family", fromFlags.family, "clt event family: threshold|equality|interval");
  app.add_option("--out", fromFlags.out, "output path (default stdout)");
  app.add_option("--format", fromFlags.format, "csv | json");
  auto* optThr = app.add_option("--threads", fromFlags.threads, "worker threads (0 = hardware)");
  auto* optSb = app.add_option("--sieve-bound", fromFlags.sieveBound, "prime sieve bound");

  CLI11_PARSE(app, argc, argv);
  haveN = optN->count() > 0;
  haveTraj = optT->count() > 0;
  haveSeed = optS->count() > 0;
  haveGamma = optG->count() > 0;
  haveLevel = optL->count() > 0;
  haveTheta = optTh->count() > 0;
  haveModulus = optM->count() > 0;
  haveThreads = optThr->count() > 0;
  haveSieve = optSb->count() > 0;

  if (list) {
    for (const auto& info : ex::list_experiments())
      std::printf("%-16s %s\n", info.name.c_str(), info.description.c_str());
    return 0;
  }

  try {
    ex::ExperimentConfig config;
    if (!configPath.empty()) config = ex::parse_config_file(configPath);
    if (!fromFlags.experiment.empty()) config.experiment = fromFlags.experiment;
    if (haveN) config.n = fromFlags.n;
    if (haveTraj) config.trajectories = fromFlags.trajectories;
    if (haveSeed) config.seed = fromFlags.seed;
    if (app.count("--backend")) config.backend = fromFlags.backend;
    if (app.count("--initial-law")) config.initialLaw = fromFlags.initialLaw;
    if (haveGamma) config.gamma = fromFlags.gamma;
    if (haveLevel) config.level = fromFlags.level;
    if (haveTheta) config.theta = fromFlags.theta;
    if (haveModulus) config.modulus = fromFlags.modulus;
    if (app.count("--family")) config.family = fromFlags.family;
    if (app.count("--out")) config.out = fromFlags.out;
    if (app.count("--format")) config.format = fromFlags.format;
    if (haveThreads) config.threads = fromFlags.threads;
    if (haveSieve) config.sieveBound = fromFlags.sieveBound;

    if (config.experiment.empty()) {
      std::cerr << "no experiment selected; use --experiment or --list\n";
      return 2;
    }

    const ex::ExperimentReport report = ex::run_experiment(config);
    ex::write_report(report, config.out, config.format);
    std::fprintf(stderr, "%s: %zu statistics in %.2fs\n", report.config.experiment.c_str(),
                 report.rows.size(), report.wallSeconds);
    return report.any_fail() ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
