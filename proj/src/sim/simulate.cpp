#include "acdc/sim/simulate.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "acdc/error.hpp"

namespace acdc {

Vector Trajectory::freq_hz(int area) const {
  if (area != 1 && area != 2) throw InvalidArgument("area must be 1 or 2");
  return x.col(area - 1) / kTwoPi;
}

Vector Trajectory::coi_freq_hz() const {
  const double w = inertia[0] + inertia[1];
  return (inertia[0] * x.col(0) + inertia[1] * x.col(1)) / (w * kTwoPi);
}

namespace {

Vector noise_scale(double freq_var, double other_var, const std::vector<bool>& is_freq) {
  Vector s(static_cast<Eigen::Index>(is_freq.size()));
  for (std::size_t i = 0; i < is_freq.size(); ++i) {
    const double var = is_freq[i] ? freq_var * kTwoPi * kTwoPi : other_var;
    s(static_cast<Eigen::Index>(i)) = std::sqrt(var);
  }
  return s;
}

}  // namespace

Trajectory simulate(const LtiModel& m, const Matrix& loads, const AttackSignal& attack, const NoiseSpec& noise) {
  const auto& dp = m.disc();
  const Eigen::Index horizon = loads.rows();
  const Eigen::Index nx = m.n_states();
  const Eigen::Index ny = m.n_channels();
  if (horizon < 1) throw InvalidArgument("simulate: horizon must be >= 1");
  if (loads.cols() != 2) throw InvalidArgument("simulate: load matrix must have 2 columns");
  if (attack.additive.rows() != horizon || attack.additive.cols() != ny || attack.scaling.rows() != horizon ||
      attack.scaling.cols() != ny) {
    throw InvalidArgument("simulate: attack signal shape does not match horizon x channels");
  }
  require_finite(loads, "load profile");
  require_finite(attack.additive, "attack signal");
  require_finite(attack.scaling, "attack scaling");
  if (noise.enabled && (!(noise.freq_variance >= 0.0) || !(noise.other_variance >= 0.0))) {
    throw InvalidArgument("simulate: noise variances must be >= 0");
  }

  Trajectory tr;
  tr.ts = dp.ts;
  tr.variant = m.variant;
  tr.states = m.states;
  tr.channels = m.channels;
  tr.x.resize(horizon, nx);
  tr.y.resize(horizon, ny);
  tr.y_tilde.resize(horizon, ny);
  tr.f.resize(horizon, ny);
  tr.d = loads;
  for (int i = 0; i < 2; ++i) tr.inertia[i] = m.params.area[i].tp / m.params.area[i].kp;

  std::vector<bool> state_freq;
  for (auto s : m.states) state_freq.push_back(s == StateLabel::kFreq1 || s == StateLabel::kFreq2);
  std::vector<bool> chan_freq;
  for (auto c : m.channels) chan_freq.push_back(is_frequency(c));
  const Vector w_scale = noise_scale(noise.freq_variance, noise.other_variance, state_freq);
  const Vector v_scale = noise_scale(noise.freq_variance, noise.other_variance, chan_freq);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool proc = noise.enabled && noise.process;
  const bool meas = noise.enabled && noise.measurement;

  Vector x = Vector::Zero(nx);
  Vector w(nx);
  Vector v(ny);
  for (Eigen::Index k = 0; k < horizon; ++k) {
    tr.x.row(k) = x.transpose();
    const Vector y = m.c * x;
    v.setZero();
    if (meas) {
      for (Eigen::Index i = 0; i < ny; ++i) v(i) = v_scale(i) * normal(rng);
    }
    const Vector yt = attack.scaling.row(k).transpose().cwiseProduct(y) + attack.additive.row(k).transpose() + v;
    tr.y.row(k) = y.transpose();
    tr.y_tilde.row(k) = yt.transpose();
    tr.f.row(k) = (yt - y).transpose();

    x = dp.a * x + dp.bd * loads.row(k).transpose() + dp.bf * (yt - y);
    if (proc) {
      for (Eigen::Index i = 0; i < nx; ++i) w(i) = w_scale(i) * normal(rng);
      x += w;
    }
    if (!x.allFinite()) throw NumericalError("simulate: state diverged to a non-finite value at sample " + std::to_string(k));
  }

  // Controller-side signals, computed from the corrupted measurements.
  tr.ace.resize(horizon, 2);
  tr.pdc_ref = Vector::Zero(horizon);
  const auto& p = m.params;
  const Eigen::Index i1 = m.require_channel(Channel::kFreq1);
  const Eigen::Index i2 = m.require_channel(Channel::kFreq2);
  const Eigen::Index iac = m.require_channel(Channel::kAcFlow12);
  const auto idc = m.channel_index(Channel::kDcFlow12);
  for (Eigen::Index k = 0; k < horizon; ++k) {
    const double flow = tr.y_tilde(k, iac) + (idc ? tr.y_tilde(k, *idc) : 0.0);
    tr.ace(k, 0) = p.area[0].beta / kTwoPi * tr.y_tilde(k, i1) + flow;
    tr.ace(k, 1) = p.area[1].beta / kTwoPi * tr.y_tilde(k, i2) - flow;
    if (idc) tr.pdc_ref(k) = p.k1 * tr.y_tilde(k, i1) + p.k2 * tr.y_tilde(k, i2) + p.k_ac * tr.y_tilde(k, iac);
  }
  return tr;
}

Trajectory simulate(const LtiModel& m, const Matrix& loads, const NoiseSpec& noise) {
  return simulate(m, loads, no_attack(loads.rows(), m.n_channels()), noise);
}

}  // namespace acdc
