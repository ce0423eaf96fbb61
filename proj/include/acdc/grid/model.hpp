#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acdc/grid/params.hpp"
#include "acdc/numerics/linalg.hpp"

namespace acdc {

/// Full state list of the AC/DC + virtual inertia system, in model order.
/// kPess1/kPess2 are the ESS low-pass filter states; the emulated power is
/// (J/T_ESS)(Δω - z).
enum class StateLabel {
  kFreq1,
  kFreq2,
  kPm11,
  kPm12,
  kPm21,
  kPm22,
  kPagc1,
  kPagc2,
  kPac12,
  kPdc12,
  kPess1,
  kPess2,
};

/// Measurement channels uploaded to the control center.
enum class Channel { kFreq1, kFreq2, kAcFlow12, kDcFlow12 };

std::string_view to_string(StateLabel s);
std::string_view to_string(Channel c);
/// Accepts "freq1", "freq2", "ac", "dc" (and the long forms "acflow12", "dcflow12").
Channel parse_channel(std::string_view s);

/// Frequency channels are exchanged in Hz and carried internally in rad/s.
inline bool is_frequency(Channel c) { return c == Channel::kFreq1 || c == Channel::kFreq2; }
inline double internal_per_physical(Channel c) { return is_frequency(c) ? kTwoPi : 1.0; }

std::vector<StateLabel> states_of(Variant v);
std::vector<Channel> channels_of(Variant v);

struct DiscretePart {
  double ts = 0.0;
  Matrix a;
  Matrix bd;
  Matrix bf;
};

struct LtiModel {
  Variant variant = Variant::kAcDcVi;
  GridParams params;
  std::vector<StateLabel> states;
  std::vector<Channel> channels;

  Matrix ac;   // n_X x n_X
  Matrix bcd;  // n_X x 2 (ΔP_L1, ΔP_L2)
  Matrix bcf;  // n_X x n_Y, columns in `channels` order, internal units
  Matrix c;    // n_Y x n_X

  std::optional<DiscretePart> discrete;

  /// True when the droop row was built with the standard (negative) sign.
  bool droop_standard = false;
  std::vector<std::string> warnings;

  Eigen::Index n_states() const { return static_cast<Eigen::Index>(states.size()); }
  Eigen::Index n_channels() const { return static_cast<Eigen::Index>(channels.size()); }
  std::optional<Eigen::Index> state_index(StateLabel s) const;
  std::optional<Eigen::Index> channel_index(Channel ch) const;
  /// Throws InvalidArgument if the channel is not measured in this variant.
  Eigen::Index require_channel(Channel ch) const;
  const DiscretePart& disc() const;
};

LtiModel build_continuous(Variant variant, const GridParams& p);

/// Attack input matrix B_cf; columns follow channels_of(variant).
Matrix build_attack_matrix(Variant variant, const GridParams& p);

/// Joint ZOH of [B_cd B_cf]; C is unchanged.
LtiModel discretize_model(const LtiModel& m, double ts);

struct StabilityReport {
  std::vector<double> moduli;  // sorted descending
  double spectral_radius = 0.0;
  bool stable = false;
};

StabilityReport validate_stability(const LtiModel& m);
StabilityReport validate_stability(const Matrix& a);

/// Convenience: build, discretize at ts.
LtiModel make_model(Variant variant, const GridParams& p, double ts = 0.04);

}  // namespace acdc
