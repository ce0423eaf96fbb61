#include "acdc/sim/signals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Matrix gen_load_profile(const LoadProfile& spec, Eigen::Index horizon, double ts) {
  if (horizon < 1) throw InvalidArgument("gen_load_profile: horizon must be >= 1");
  if (!(ts > 0.0)) throw InvalidArgument("gen_load_profile: sampling period must be positive");
  Matrix d = Matrix::Zero(horizon, 2);
  std::visit(Overloaded{
                 [&](const LoadStep& s) {
                   if (s.area != 1 && s.area != 2) throw InvalidArgument("load step area must be 1 or 2");
                   if (!std::isfinite(s.magnitude)) throw InvalidArgument("load step magnitude must be finite");
                   const auto onset = static_cast<Eigen::Index>(std::llround(s.onset_s / ts));
                   for (Eigen::Index k = std::max<Eigen::Index>(onset, 0); k < horizon; ++k) {
                     d(k, s.area - 1) = s.magnitude;
                   }
                 },
                 [&](const StochasticLoad& s) {
                   for (int i = 0; i < 2; ++i) {
                     if (!(s.reversion_rate[i] >= 0.0) || !(s.volatility[i] >= 0.0)) {
                       throw InvalidArgument("stochastic load rates must be >= 0");
                     }
                   }
                   std::mt19937_64 rng(s.seed);
                   std::normal_distribution<double> normal(0.0, 1.0);
                   const double sq = std::sqrt(ts);
                   for (Eigen::Index k = 1; k < horizon; ++k) {
                     for (int i = 0; i < 2; ++i) {
                       const double xi = normal(rng);
                       d(k, i) = d(k - 1, i) * (1.0 - s.reversion_rate[i] * ts) + s.volatility[i] * sq * xi;
                     }
                   }
                 },
             },
             spec);
  return d;
}

void AttackScenario::validate() const {
  if (onset < 0) throw InvalidArgument("attack onset must be >= 0");
  std::set<Channel> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.channel).second) {
      throw InvalidArgument("attack scenario lists channel '" + std::string(to_string(e.channel)) + "' twice");
    }
    if (!std::isfinite(e.magnitude)) throw InvalidArgument("attack magnitude must be finite");
  }
  if (const auto* p = std::get_if<PulseShape>(&shape); p && p->duration < 1) {
    throw InvalidArgument("pulse duration must be >= 1 sample");
  }
  if (const auto* r = std::get_if<RandomShape>(&shape); r && !(r->std_dev >= 0.0)) {
    throw InvalidArgument("random attack std must be >= 0");
  }
}

AttackSignal no_attack(Eigen::Index horizon, Eigen::Index n_channels) {
  return {Matrix::Zero(horizon, n_channels), Matrix::Ones(horizon, n_channels)};
}

AttackSignal gen_attack_signal(std::span<const AttackScenario> scenarios, Eigen::Index horizon,
                               std::span<const Channel> channels) {
  if (horizon < 1) throw InvalidArgument("gen_attack_signal: horizon must be >= 1");
  const auto ny = static_cast<Eigen::Index>(channels.size());
  AttackSignal out = no_attack(horizon, ny);
  std::set<Channel> additive_channels;
  std::set<Channel> scaled_channels;

  for (const auto& sc : scenarios) {
    sc.validate();
    const bool scaling = std::holds_alternative<ScalingShape>(sc.shape);
    for (const auto& e : sc.entries) {
      const auto it = std::find(channels.begin(), channels.end(), e.channel);
      if (it == channels.end()) {
        throw InvalidArgument("attack on channel '" + std::string(to_string(e.channel)) +
                              "' which the model does not measure");
      }
      auto& mine = scaling ? scaled_channels : additive_channels;
      const auto& other = scaling ? additive_channels : scaled_channels;
      if (other.contains(e.channel)) {
        throw InvalidArgument("channel '" + std::string(to_string(e.channel)) +
                              "' has both scaling and additive attacks");
      }
      mine.insert(e.channel);
      const auto col = static_cast<Eigen::Index>(it - channels.begin());
      const double unit = internal_per_physical(e.channel);

      std::visit(Overloaded{
                     [&](const StepShape&) {
                       for (Eigen::Index k = sc.onset; k < horizon; ++k) out.additive(k, col) += unit * e.magnitude;
                     },
                     [&](const PulseShape& p) {
                       const auto end = std::min(horizon, sc.onset + p.duration);
                       for (Eigen::Index k = sc.onset; k < end; ++k) out.additive(k, col) += unit * e.magnitude;
                     },
                     [&](const RampShape& r) {
                       for (Eigen::Index k = sc.onset; k < horizon; ++k) {
                         out.additive(k, col) += unit * e.magnitude * r.slope * static_cast<double>(k - sc.onset + 1);
                       }
                     },
                     [&](const ScalingShape&) {
                       for (Eigen::Index k = sc.onset; k < horizon; ++k) out.scaling(k, col) *= e.magnitude;
                     },
                     [&](const RandomShape& r) {
                       // Seed mixes in the column so multi-channel random attacks are independent.
                       std::mt19937_64 rng(r.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(col));
                       std::normal_distribution<double> normal(0.0, r.std_dev);
                       for (Eigen::Index k = sc.onset; k < horizon; ++k) {
                         out.additive(k, col) += unit * (e.magnitude + normal(rng));
                       }
                     },
                 },
                 sc.shape);
    }
  }
  return out;
}

AttackSignal gen_attack_signal(const AttackScenario& s, Eigen::Index horizon, std::span<const Channel> channels) {
  return gen_attack_signal(std::span<const AttackScenario>(&s, 1), horizon, channels);
}

Vector to_internal(std::span<const Channel> channels, const Vector& physical) {
  if (physical.size() != static_cast<Eigen::Index>(channels.size())) {
    throw InvalidArgument("to_internal: vector length differs from channel count");
  }
  Vector v = physical;
  for (std::size_t i = 0; i < channels.size(); ++i) v(static_cast<Eigen::Index>(i)) *= internal_per_physical(channels[i]);
  return v;
}

Vector to_physical(std::span<const Channel> channels, const Vector& internal) {
  if (internal.size() != static_cast<Eigen::Index>(channels.size())) {
    throw InvalidArgument("to_physical: vector length differs from channel count");
  }
  Vector v = internal;
  for (std::size_t i = 0; i < channels.size(); ++i) v(static_cast<Eigen::Index>(i)) /= internal_per_physical(channels[i]);
  return v;
}

}  // namespace acdc
