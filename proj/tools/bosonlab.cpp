#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "bosons/io.hpp"
#include "bosons/runner.hpp"

using namespace bosons;

namespace {

int execute(Experiment experiment, const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config(read_text_file(config_path));
    cfg.experiment = experiment;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunReport report = run(cfg);
    for (const auto& c : report.checks) {
      if (c.asserted) {
        std::printf("[%s] %-34s value=%.6e tol=%.1e (%s)\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.value, c.tolerance, c.anchor.c_str());
      } else {
        std::printf("[info] %-34s value=%.6e (%s)\n", c.name.c_str(), c.value, c.anchor.c_str());
      }
    }
    std::printf("report: %s  (%.1f ms)\n", report.artifacts.back().c_str(), report.timing_ms);
    return report.all_passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torus Bose gas laboratory: spectra, depletion statistics and kernel checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  for (Experiment e : {Experiment::Scatter, Experiment::Spectrum, Experiment::Decay,
                       Experiment::Ldp, Experiment::Gibbs, Experiment::Verify}) {
    auto* sub = app.add_subcommand(experiment_name(e), "run the " + experiment_name(e) +
                                                           " experiment family");
    sub->add_option("--config", config_path, "run configuration file");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seed", seed, "RNG seed override for iterative solvers");
    sub->callback([e, &config_path, &out_dir, &seed]() {
      std::exit(execute(e, config_path, out_dir, seed));
    });
  }

  CLI11_PARSE(app, argc, argv);
  return 0;
}
