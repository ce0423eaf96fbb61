#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acdc/detect/residual.hpp"
#include "acdc/grid/params.hpp"
#include "acdc/sim/signals.hpp"
#include "acdc/vuln/stealth.hpp"

namespace acdc {

struct ModelSection {
  Variant variant = Variant::kAcDcVi;
  double ts = 0.04;
  /// Parameter overrides applied on top of the variant defaults; kept raw so
  /// a variant switch on the command line re-resolves them.
  nlohmann::json overrides = nlohmann::json::object();
};

/// Attack with its onset in seconds, converted to samples once T_s is known.
struct TimedAttack {
  AttackScenario scenario;
  double onset_s = 0.0;
  double pulse_s = 0.0;  // > 0 only for pulse attacks
};

struct ScenarioSection {
  double horizon_s = 30.0;
  std::vector<LoadProfile> loads;
  std::vector<TimedAttack> attacks;
  NoiseSpec noise;
};

struct VulnSection {
  StealthSpec stealth;
  double horizon_s = 30.0;
};

struct DetectSection {
  SynthOptions synth;
  std::vector<Channel> channels{Channel::kAcFlow12, Channel::kDcFlow12};
  std::string bank_file;   // input for detector-run; empty = <out>/bank.json
  std::string trajectory;  // CSV to run on; empty = simulate the scenario
  double threshold_sigma = 3.0;
};

struct SweepSection {
  Channel channel = Channel::kAcFlow12;
  double max_magnitude = 1.0;
  int points = 21;
  std::vector<Variant> variants{Variant::kAcOnly, Variant::kAcDc, Variant::kAcDcVi};
};

struct ExperimentConfig {
  ModelSection model;
  ScenarioSection scenario;
  VulnSection vuln;
  DetectSection detect;
  SweepSection sweep;
  std::string out_dir = "out";

  Eigen::Index horizon_samples() const;
  /// Variant defaults plus the overrides of the model section.
  GridParams params() const;
  /// Attack scenarios with onsets in samples.
  std::vector<AttackScenario> attacks() const;
  Matrix loads() const;
  /// Re-seed every stochastic element from one seed.
  void reseed(std::uint64_t seed);
  void validate() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies a params override document to `p` (same schema as model.params).
void apply_param_overrides(GridParams& p, const nlohmann::json& overrides);

}  // namespace acdc
