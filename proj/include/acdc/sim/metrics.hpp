#pragma once

#include "acdc/grid/model.hpp"
#include "acdc/sim/simulate.hpp"

namespace acdc {

struct AreaImpact {
  double mfd_hz = 0.0;     // signed extremum over the window
  double mfd_time_s = 0.0;
  double ssfd_hz = 0.0;    // mean over the last 5% of the window
};

struct ImpactMetrics {
  AreaImpact area[2];
  AreaImpact coi;
  double peak_ace[2] = {0.0, 0.0};
  double peak_pdc_ref = 0.0;
};

/// Metrics over samples [start, end); end < 0 means the end of the trajectory.
ImpactMetrics compute_metrics(const Trajectory& tr, Eigen::Index start = 0, Eigen::Index end = -1);

/// Signed extremum (largest |.|) of a series over [start, end).
AreaImpact series_impact(const Vector& hz, double ts, Eigen::Index start, Eigen::Index end);

struct DisruptiveThreshold {
  bool reachable = false;
  double magnitude = 0.0;       // from linearity: mfd_lim / |MFD per unit|
  double mfd_per_unit = 0.0;    // Hz per physical unit, signed
  double bisection_magnitude = 0.0;
};

/// Smallest step magnitude on `channel` whose |MFD| in `area` reaches
/// mfd_lim over `horizon` samples (attack applied at sample 0, no load).
/// The bisection result is an independent cross-check to `bisection_tol`.
DisruptiveThreshold min_disruptive_magnitude(const LtiModel& m, Channel channel, double mfd_lim = 0.8,
                                             Eigen::Index horizon = 750, int area = 1,
                                             double bisection_tol = 1e-4);

}  // namespace acdc
