// acdc-fdi: experiments on the two-area AC/DC grid model.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "acdc/error.hpp"
#include "commands.hpp"

namespace {

using namespace acdc;
using namespace acdc::cli;

int dispatch(const std::string& name, const ExperimentConfig& c, const RunOptions& o) {
  if (name == "model") return cmd_model(c, std::cout);
  if (name == "simulate") return cmd_simulate(c, o, std::cout);
  if (name == "impact-sweep") return cmd_impact_sweep(c, std::cout);
  if (name == "attack-find") return cmd_attack_find(c, std::cout);
  if (name == "detector-synth") return cmd_detector_synth(c, std::cout);
  return cmd_detector_run(c, o, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False data injection analysis for a two-area AC/DC grid"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string variant;
  std::uint64_t seed = 0;
  RunOptions opts;

  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every stochastic element");
  app.add_option("--variant", variant, "Model variant")->check(CLI::IsMember({"ac", "acdc", "acdc-vi"}));

  app.add_subcommand("model", "Build the model and report matrices, eigenvalues and stability");
  auto* sim = app.add_subcommand("simulate", "Simulate the configured scenario and write the trajectory");
  sim->add_flag("--all-variants", opts.all_variants, "Run ac, acdc and acdc-vi side by side");
  app.add_subcommand("impact-sweep", "MFD against attack magnitude per variant");
  app.add_subcommand("attack-find", "Minimum-cardinality disruptive stealthy attack");
  app.add_subcommand("detector-synth", "Synthesize the residual bank");
  auto* run = app.add_subcommand("detector-run", "Run a stored bank on a trajectory");
  run->add_option("--bank", opts.bank, "Bank file (default <out>/bank.json)");
  run->add_option("--trajectory", opts.trajectory, "Trajectory CSV (default: simulate the scenario)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!variant.empty()) cfg.model.variant = parse_variant(variant);
    if (*seed_opt) cfg.reseed(seed);
    cfg.validate();
    return dispatch(app.get_subcommands().front()->get_name(), cfg, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const DegreeTooLowError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
