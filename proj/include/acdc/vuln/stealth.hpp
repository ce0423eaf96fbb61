#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "acdc/grid/model.hpp"
#include "acdc/numerics/lp.hpp"

namespace acdc {

/// How the data-quality limits are read.
///  kBias:       limits apply to the injected bias terms in the controller
///               inputs (time-invariant rows).
///  kTrajectory: limits apply to the corrupted signals along the whole
///               closed-loop response, sampled on the disruptiveness grid.
enum class StealthMode { kBias, kTrajectory };

struct StealthSpec {
  double dw_min_hz = -0.1;
  double dw_max_hz = 0.1;
  double ace_max = 0.05;
  double pdc_ref_max = 0.1;
  double mfd_lim_hz = 0.8;
  Channel anchor = Channel::kAcFlow12;
  /// Anchor value in physical units; empty means the disruptive threshold of
  /// the anchor channel.
  std::optional<double> mu;
  std::vector<Channel> protected_set;
  Eigen::Index horizon = 750;  // K_h samples
  Eigen::Index stride = 1;
  double big_m = 10.0;
  int area = 1;
  StealthMode mode = StealthMode::kBias;

  void validate() const;
};

/// Linear bias constraints b_min <= F f <= b_max on the physical attack
/// vector, plus the disruptiveness rows g_k (Hz per physical unit).
struct StealthSet {
  std::vector<Channel> channels;
  Matrix f;  // n_b x n_Y
  Vector b_min;
  Vector b_max;
  std::vector<std::string> row_names;
  Matrix g;  // one row per grid sample k
  std::vector<Eigen::Index> grid;

  Eigen::Index rows() const { return f.rows(); }
  /// Largest violation of the bias rows (0 when f is stealthy).
  double violation(const Vector& f_phys) const;
};

/// Row k = Δω_area[k] / 2π under a unit step attack on each channel at k = 0.
Matrix step_response_coeffs(const LtiModel& m, int area, Eigen::Index horizon);

StealthSet build_stealth_set(const LtiModel& m, const StealthSpec& spec);

inline constexpr int kNoAttack = std::numeric_limits<int>::max();

struct VulnStats {
  std::size_t subproblems = 0;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double big_m = 0.0;
  bool big_m_increased = false;
  bool big_m_binding = false;
};

struct VulnResult {
  int alpha_star = kNoAttack;
  Vector f_star;  // physical units, channel order of the model
  double mu = 0.0;
  Eigen::Index k_star = -1;
  int sign = 0;
  double mfd_hz = 0.0;  // g_{k*}^T f_star
  std::vector<std::string> active_rows;
  VulnStats stats;

  bool feasible() const { return alpha_star != kNoAttack; }
};

/// Minimum-cardinality disruptive stealthy attack, one small MILP per
/// (grid sample, sign); ties broken by the smallest l1 norm, then by k.
VulnResult find_disruptive_stealthy(const LtiModel& m, const StealthSpec& spec, const MilpOptions& opts = {});

/// Exhaustive support enumeration with one LP per (support, k, sign).
VulnResult enumerate_oracle(const LtiModel& m, const StealthSpec& spec, const LpOptions& opts = {});

}  // namespace acdc
