#include "acdc/sim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "acdc/error.hpp"

namespace acdc {

AreaImpact series_impact(const Vector& hz, double ts, Eigen::Index start, Eigen::Index end) {
  if (end < 0) end = hz.size();
  if (start < 0 || start >= end || end > hz.size()) throw InvalidArgument("metrics window is empty or out of range");
  AreaImpact out;
  Eigen::Index arg = start;
  for (Eigen::Index k = start; k < end; ++k) {
    if (std::abs(hz(k)) > std::abs(hz(arg))) arg = k;
  }
  out.mfd_hz = hz(arg);
  out.mfd_time_s = static_cast<double>(arg) * ts;
  const Eigen::Index len = end - start;
  const auto tail = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(0.05 * static_cast<double>(len))));
  out.ssfd_hz = hz.segment(end - tail, tail).mean();
  return out;
}

ImpactMetrics compute_metrics(const Trajectory& tr, Eigen::Index start, Eigen::Index end) {
  if (end < 0) end = tr.length();
  ImpactMetrics m;
  for (int i = 0; i < 2; ++i) {
    m.area[i] = series_impact(tr.freq_hz(i + 1), tr.ts, start, end);
    m.peak_ace[i] = tr.ace.col(i).segment(start, end - start).cwiseAbs().maxCoeff();
  }
  m.coi = series_impact(tr.coi_freq_hz(), tr.ts, start, end);
  m.peak_pdc_ref = tr.pdc_ref.segment(start, end - start).cwiseAbs().maxCoeff();
  return m;
}

namespace {

double step_mfd(const LtiModel& m, Channel channel, double magnitude, Eigen::Index horizon, int area) {
  AttackScenario s;
  s.entries.push_back({channel, magnitude});
  const auto sig = gen_attack_signal(s, horizon, m.channels);
  const auto tr = simulate(m, Matrix::Zero(horizon, 2), sig);
  return series_impact(tr.freq_hz(area), tr.ts, 0, horizon).mfd_hz;
}

}  // namespace

DisruptiveThreshold min_disruptive_magnitude(const LtiModel& m, Channel channel, double mfd_lim,
                                             Eigen::Index horizon, int area, double bisection_tol) {
  if (!(mfd_lim > 0.0)) throw InvalidArgument("MFD limit must be positive");
  if (horizon < 2) throw InvalidArgument("horizon must be >= 2 samples");
  if (area != 1 && area != 2) throw InvalidArgument("area must be 1 or 2");
  m.require_channel(channel);

  DisruptiveThreshold out;
  out.mfd_per_unit = step_mfd(m, channel, 1.0, horizon, area);
  if (!(std::abs(out.mfd_per_unit) > 1e-14)) return out;
  out.reachable = true;
  out.magnitude = mfd_lim / std::abs(out.mfd_per_unit);

  // Bracket and bisect on the simulated response itself.
  double lo = 0.0;
  double hi = 1.0;
  while (std::abs(step_mfd(m, channel, hi, horizon, area)) < mfd_lim) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("min_disruptive_magnitude: failed to bracket the threshold");
  }
  while (hi - lo > bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(step_mfd(m, channel, mid, horizon, area)) >= mfd_lim ? hi : lo) = mid;
  }
  out.bisection_magnitude = hi;
  return out;
}

}  // namespace acdc
