#pragma once

#include <array>
#include <numbers>
#include <string>
#include <string_view>

namespace acdc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Variant { kAcOnly, kAcDc, kAcDcVi };

std::string_view to_string(Variant v);
/// Accepts "ac", "acdc", "acdc-vi". Throws InvalidArgument otherwise.
Variant parse_variant(std::string_view s);

/// Sign of the droop term in the turbine-governor row.
///
/// kAsPrinted uses +Δω/(2πR); kStandard uses -Δω/(2πR). kAuto builds the
/// printed form and falls back to kStandard when A_c is not Hurwitz.
enum class DroopConvention { kAuto, kAsPrinted, kStandard };

struct GeneratorParams {
  double r = 2.4;     // droop, Hz/p.u.
  double t_ch = 0.3;  // turbine-governor time constant, s
  double phi = 0.5;   // AGC participation factor
};

struct AreaParams {
  double kp = 120.0;  // system gain, Hz/p.u. (applied as 2π·kp to the rad/s state)
  double tp = 20.0;   // system time constant, s
  double beta = 0.425;  // frequency bias, p.u./Hz
  double ki = 0.05;     // AGC integral gain, 1/s
  std::array<GeneratorParams, 2> gens{};
  double j_em = 0.0;   // emulated inertia, p.u. per rad/s²
  double t_ess = 0.1;  // ESS filter time constant, s
};

struct GridParams {
  std::array<AreaParams, 2> area{};
  double t12 = 0.545;  // AC synchronizing coefficient, p.u./rad
  double k1 = 0.0;     // SPMC gain on Δω1, p.u. per rad/s
  double k2 = 0.0;     // SPMC gain on Δω2, p.u. per rad/s
  double k_ac = 0.0;   // SPMC gain on ΔP_AC
  double t_dc = 0.1;   // DC link time constant, s
  double omega0 = kTwoPi * 60.0;
  DroopConvention droop = DroopConvention::kAuto;

  /// Shipped parameter set for one variant. Controller gains differ per
  /// variant; the plant (areas, governors, tie line) is shared.
  static GridParams defaults(Variant v);

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

}  // namespace acdc
