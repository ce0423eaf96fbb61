#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "acdc/grid/model.hpp"
#include "acdc/numerics/linalg.hpp"

namespace acdc {

// ---- load profiles --------------------------------------------------------

struct LoadStep {
  int area = 1;             // 1 or 2
  double magnitude = 0.03;  // p.u., positive = load increase
  double onset_s = 5.0;
};

/// Per-area Ornstein-Uhlenbeck load, integrated with an Euler step.
struct StochasticLoad {
  std::array<double, 2> reversion_rate{0.5, 0.5};  // 1/s
  std::array<double, 2> volatility{0.01, 0.01};    // p.u./sqrt(s)
  std::uint64_t seed = 1;
};

using LoadProfile = std::variant<LoadStep, StochasticLoad>;

/// horizon x 2 matrix of (ΔP_L1, ΔP_L2).
Matrix gen_load_profile(const LoadProfile& spec, Eigen::Index horizon, double ts);

// ---- attacks ---------------------------------------------------------------

struct StepShape {};
struct PulseShape {
  Eigen::Index duration = 1;  // samples
};
/// f[k] = magnitude * slope * (k - onset + 1)
struct RampShape {
  double slope = 0.01;  // per sample
};
/// Multiplicative: the corrupted channel reads magnitude * Y.
struct ScalingShape {};
/// f[k] = magnitude + std * N(0,1)
struct RandomShape {
  double std_dev = 0.01;
  std::uint64_t seed = 1;
};

using AttackShape = std::variant<StepShape, PulseShape, RampShape, ScalingShape, RandomShape>;

struct AttackEntry {
  Channel channel = Channel::kAcFlow12;
  double magnitude = 0.0;  // p.u. for flows, Hz for frequencies (multiplier for scaling)
};

struct AttackScenario {
  std::vector<AttackEntry> entries;
  Eigen::Index onset = 0;  // k_min
  AttackShape shape = StepShape{};

  void validate() const;
};

/// Additive part in internal units (horizon x n_Y) and multiplicative mask.
struct AttackSignal {
  Matrix additive;
  Matrix scaling;
};

AttackSignal gen_attack_signal(std::span<const AttackScenario> scenarios, Eigen::Index horizon,
                               std::span<const Channel> channels);
AttackSignal gen_attack_signal(const AttackScenario& s, Eigen::Index horizon, std::span<const Channel> channels);

/// No attack on any channel.
AttackSignal no_attack(Eigen::Index horizon, Eigen::Index n_channels);

/// Per-channel constant vector (physical units) converted to internal units.
Vector to_internal(std::span<const Channel> channels, const Vector& physical);
Vector to_physical(std::span<const Channel> channels, const Vector& internal);

// ---- noise -----------------------------------------------------------------

/// Zero-mean Gaussian noise. Variances are quoted in Hz² for frequency states
/// and channels (scaled by (2π)² internally) and p.u.² elsewhere.
struct NoiseSpec {
  bool enabled = false;
  double freq_variance = 0.0009;
  double other_variance = 0.03;
  bool process = true;
  bool measurement = false;
  std::uint64_t seed = 7;
};

}  // namespace acdc
