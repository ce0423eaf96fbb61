#pragma once

#include <iosfwd>
#include <string>

#include "acdc/io/config.hpp"

namespace acdc::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,      // bad config, flags or input files
  kInfeasible = 3,  // no disruptive stealthy attack / bank incomplete
  kNumerical = 4,   // unstable model, singular system, solver breakdown
};

struct RunOptions {
  bool all_variants = false;  // simulate: run every variant
  std::string bank;           // detector-run: overrides detect.bank_file
  std::string trajectory;     // detector-run: overrides detect.trajectory
};

int cmd_model(const ExperimentConfig& c, std::ostream& log);
int cmd_simulate(const ExperimentConfig& c, const RunOptions& o, std::ostream& log);
int cmd_impact_sweep(const ExperimentConfig& c, std::ostream& log);
int cmd_attack_find(const ExperimentConfig& c, std::ostream& log);
int cmd_detector_synth(const ExperimentConfig& c, std::ostream& log);
int cmd_detector_run(const ExperimentConfig& c, const RunOptions& o, std::ostream& log);

}  // namespace acdc::cli
