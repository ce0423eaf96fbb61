#pragma once

#include <array>
#include <optional>

#include "acdc/grid/model.hpp"
#include "acdc/sim/signals.hpp"

namespace acdc {

/// One row per sample. Frequencies and corrupted frequency channels are in
/// rad/s; use the *_hz helpers for reporting.
struct Trajectory {
  double ts = 0.0;
  Variant variant = Variant::kAcDcVi;
  std::vector<StateLabel> states;
  std::vector<Channel> channels;

  Matrix x;        // T x n_X
  Matrix y;        // T x n_Y  true measurements
  Matrix y_tilde;  // T x n_Y  corrupted measurements seen by the controllers
  Matrix f;        // T x n_Y  effective corruption  y_tilde - y
  Matrix d;        // T x 2    load disturbance
  Matrix ace;      // T x 2
  Vector pdc_ref;  // T

  /// Inertia weights (T_p / K_p per area) for the centre-of-inertia frequency.
  std::array<double, 2> inertia{1.0, 1.0};

  Eigen::Index length() const { return x.rows(); }
  /// Δω_i in Hz over the whole horizon, area in {1, 2}.
  Vector freq_hz(int area) const;
  Vector coi_freq_hz() const;
};

/// Simulate from rest. Loads are horizon x 2; the attack signal is in
/// internal units. The horizon is taken from the load matrix.
Trajectory simulate(const LtiModel& m, const Matrix& loads, const AttackSignal& attack,
                    const NoiseSpec& noise = {});

/// Convenience overload with no attack.
Trajectory simulate(const LtiModel& m, const Matrix& loads, const NoiseSpec& noise = {});

}  // namespace acdc
