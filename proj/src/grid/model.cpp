#include "acdc/grid/model.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

std::string_view to_string(StateLabel s) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "dw1", "dw2", "pm11", "pm12", "pm21", "pm22", "pagc1", "pagc2", "pac12", "pdc12", "pess1", "pess2"};
  return kNames[static_cast<std::size_t>(s)];
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::kFreq1:
      return "freq1";
    case Channel::kFreq2:
      return "freq2";
    case Channel::kAcFlow12:
      return "ac";
    case Channel::kDcFlow12:
      return "dc";
  }
  return "?";
}

Channel parse_channel(std::string_view s) {
  if (s == "freq1" || s == "w1") return Channel::kFreq1;
  if (s == "freq2" || s == "w2") return Channel::kFreq2;
  if (s == "ac" || s == "acflow12") return Channel::kAcFlow12;
  if (s == "dc" || s == "dcflow12") return Channel::kDcFlow12;
  throw InvalidArgument("unknown channel '" + std::string(s) + "' (expected freq1, freq2, ac, dc)");
}

std::vector<StateLabel> states_of(Variant v) {
  std::vector<StateLabel> s;
  for (int i = 0; i <= static_cast<int>(StateLabel::kPac12); ++i) s.push_back(static_cast<StateLabel>(i));
  if (v != Variant::kAcOnly) s.push_back(StateLabel::kPdc12);
  if (v == Variant::kAcDcVi) {
    s.push_back(StateLabel::kPess1);
    s.push_back(StateLabel::kPess2);
  }
  return s;
}

std::vector<Channel> channels_of(Variant v) {
  std::vector<Channel> c{Channel::kFreq1, Channel::kFreq2, Channel::kAcFlow12};
  if (v != Variant::kAcOnly) c.push_back(Channel::kDcFlow12);
  return c;
}

std::optional<Eigen::Index> LtiModel::state_index(StateLabel s) const {
  const auto it = std::find(states.begin(), states.end(), s);
  if (it == states.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - states.begin());
}

std::optional<Eigen::Index> LtiModel::channel_index(Channel ch) const {
  const auto it = std::find(channels.begin(), channels.end(), ch);
  if (it == channels.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - channels.begin());
}

Eigen::Index LtiModel::require_channel(Channel ch) const {
  const auto idx = channel_index(ch);
  if (!idx) {
    throw InvalidArgument("channel '" + std::string(to_string(ch)) + "' is not measured in the " +
                          std::string(to_string(variant)) + " model");
  }
  return *idx;
}

const DiscretePart& LtiModel::disc() const {
  if (!discrete) throw InvalidArgument("model has no discrete-time part; call discretize_model first");
  return *discrete;
}

namespace {

constexpr Eigen::Index kFull = 12;

Eigen::Index at(StateLabel s) { return static_cast<Eigen::Index>(s); }

// Full 12-state matrices; variants select sub-blocks afterwards.
struct FullSystem {
  Matrix ac = Matrix::Zero(kFull, kFull);
  Matrix bcd = Matrix::Zero(kFull, 2);
  Matrix bcf = Matrix::Zero(kFull, 4);  // freq1, freq2, ac, dc
};

FullSystem assemble(Variant variant, const GridParams& p, double droop_sign) {
  FullSystem s;
  const bool has_dc = variant != Variant::kAcOnly;
  const bool has_ess = variant == Variant::kAcDcVi;

  const std::array<StateLabel, 2> freq = {StateLabel::kFreq1, StateLabel::kFreq2};
  const std::array<StateLabel, 2> agc = {StateLabel::kPagc1, StateLabel::kPagc2};
  const std::array<StateLabel, 2> ess = {StateLabel::kPess1, StateLabel::kPess2};
  const std::array<std::array<StateLabel, 2>, 2> pm = {{{StateLabel::kPm11, StateLabel::kPm12},
                                                        {StateLabel::kPm21, StateLabel::kPm22}}};

  for (int i = 0; i < 2; ++i) {
    const auto& ar = p.area[i];
    // Tie flows leave area 1 and enter area 2.
    const double tie = i == 0 ? 1.0 : -1.0;
    const auto w = at(freq[i]);
    const double gain = kTwoPi * ar.kp / ar.tp;

    // Area swing lag: T_p Δω' = -Δω + 2π K_p (ΣP_m - P_L - tie(P_AC + P_DC) - P_ESS)
    s.ac(w, w) += -1.0 / ar.tp;
    for (int g = 0; g < 2; ++g) s.ac(w, at(pm[i][g])) += gain;
    s.bcd(w, i) = -gain;
    s.ac(w, at(StateLabel::kPac12)) += -tie * gain;
    if (has_dc) s.ac(w, at(StateLabel::kPdc12)) += -tie * gain;
    if (has_ess) {
      // P_ESS = (J/T_ESS)(Δω - z),  z' = (Δω - z)/T_ESS
      const double hp = ar.j_em / ar.t_ess;
      const auto z = at(ess[i]);
      s.ac(w, w) += -gain * hp;
      s.ac(w, z) += gain * hp;
      s.ac(z, w) += 1.0 / ar.t_ess;
      s.ac(z, z) += -1.0 / ar.t_ess;
    }

    // Turbine-governors: T_ch P_m' = -P_m ± Δω/(2πR) - φ P_agc
    for (int g = 0; g < 2; ++g) {
      const auto& gen = ar.gens[g];
      const auto row = at(pm[i][g]);
      s.ac(row, row) = -1.0 / gen.t_ch;
      s.ac(row, w) = droop_sign / (gen.r * kTwoPi * gen.t_ch);
      s.ac(row, at(agc[i])) = -gen.phi / gen.t_ch;
    }

    // AGC: P_agc' = K_I ACE,  ACE_i = (β/2π)Δω_i + tie(P_AC + P_DC)
    const auto a = at(agc[i]);
    s.ac(a, w) = ar.ki * ar.beta / kTwoPi;
    s.ac(a, at(StateLabel::kPac12)) = tie * ar.ki;
    if (has_dc) s.ac(a, at(StateLabel::kPdc12)) = tie * ar.ki;
  }

  // AC tie line integrator.
  s.ac(at(StateLabel::kPac12), at(StateLabel::kFreq1)) = p.t12;
  s.ac(at(StateLabel::kPac12), at(StateLabel::kFreq2)) = -p.t12;

  if (has_dc) {
    // SPMC and DC lag: T_DC P_DC' = -P_DC + K1 Δω1 + K2 Δω2 + K_AC P_AC
    const auto dc = at(StateLabel::kPdc12);
    s.ac(dc, dc) = -1.0 / p.t_dc;
    s.ac(dc, at(StateLabel::kFreq1)) = p.k1 / p.t_dc;
    s.ac(dc, at(StateLabel::kFreq2)) = p.k2 / p.t_dc;
    s.ac(dc, at(StateLabel::kPac12)) = p.k_ac / p.t_dc;
  }

  // Attack injections enter only the controllers fed by uploaded measurements.
  const auto agc1 = at(StateLabel::kPagc1);
  const auto agc2 = at(StateLabel::kPagc2);
  const auto dc = at(StateLabel::kPdc12);
  const auto& a1 = p.area[0];
  const auto& a2 = p.area[1];
  s.bcf(agc1, 0) = a1.ki * a1.beta / kTwoPi;
  s.bcf(agc2, 1) = a2.ki * a2.beta / kTwoPi;
  s.bcf(agc1, 2) = a1.ki;
  s.bcf(agc2, 2) = -a2.ki;
  if (has_dc) {
    s.bcf(dc, 0) = p.k1 / p.t_dc;
    s.bcf(dc, 1) = p.k2 / p.t_dc;
    s.bcf(dc, 2) = p.k_ac / p.t_dc;
    s.bcf(agc1, 3) = a1.ki;
    s.bcf(agc2, 3) = -a2.ki;
  }
  return s;
}

std::vector<Eigen::Index> state_rows(Variant v) {
  std::vector<Eigen::Index> idx;
  for (const auto s : states_of(v)) idx.push_back(at(s));
  return idx;
}

std::vector<Eigen::Index> channel_cols(Variant v) {
  std::vector<Eigen::Index> idx;
  for (const auto c : channels_of(v)) idx.push_back(static_cast<Eigen::Index>(c));
  return idx;
}

bool hurwitz(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.info() == Eigen::Success && es.eigenvalues().real().maxCoeff() < 0.0;
}

}  // namespace

Matrix build_attack_matrix(Variant variant, const GridParams& p) {
  p.validate();
  const FullSystem full = assemble(variant, p, -1.0);
  const auto rows = state_rows(variant);
  const auto cols = channel_cols(variant);
  return full.bcf(rows, cols);
}

LtiModel build_continuous(Variant variant, const GridParams& p_in) {
  p_in.validate();
  LtiModel m;
  m.variant = variant;
  m.params = p_in;
  if (variant == Variant::kAcOnly && (p_in.k1 != 0.0 || p_in.k2 != 0.0 || p_in.k_ac != 0.0)) {
    m.warnings.emplace_back("ac variant has no DC link: SPMC gains K1, K2, K_AC ignored");
    m.params.k1 = m.params.k2 = m.params.k_ac = 0.0;
  }
  if (variant != Variant::kAcDcVi && (p_in.area[0].j_em != 0.0 || p_in.area[1].j_em != 0.0)) {
    m.warnings.emplace_back("variant has no ESS: emulated inertia gains ignored");
    m.params.area[0].j_em = m.params.area[1].j_em = 0.0;
  }

  const auto rows = state_rows(variant);
  const auto cols = channel_cols(variant);
  m.states = states_of(variant);
  m.channels = channels_of(variant);

  FullSystem full = assemble(variant, m.params, 1.0);
  m.droop_standard = false;
  if (m.params.droop == DroopConvention::kStandard ||
      (m.params.droop == DroopConvention::kAuto && !hurwitz(full.ac(rows, rows)))) {
    full = assemble(variant, m.params, -1.0);
    m.droop_standard = true;
    if (m.params.droop == DroopConvention::kAuto) {
      m.warnings.emplace_back("printed droop sign yields an unstable A_c; standard negative droop used");
    }
  }

  m.ac = full.ac(rows, rows);
  m.bcd = full.bcd(rows, Eigen::placeholders::all);
  m.bcf = full.bcf(rows, cols);
  m.c = Matrix::Zero(m.n_channels(), m.n_states());
  for (Eigen::Index k = 0; k < m.n_channels(); ++k) {
    StateLabel s = StateLabel::kFreq1;
    switch (m.channels[k]) {
      case Channel::kFreq1:
        s = StateLabel::kFreq1;
        break;
      case Channel::kFreq2:
        s = StateLabel::kFreq2;
        break;
      case Channel::kAcFlow12:
        s = StateLabel::kPac12;
        break;
      case Channel::kDcFlow12:
        s = StateLabel::kPdc12;
        break;
    }
    m.c(k, *m.state_index(s)) = 1.0;
  }
  return m;
}

LtiModel discretize_model(const LtiModel& m, double ts) {
  const auto n = m.n_states();
  const auto nd = m.bcd.cols();
  Matrix b(n, nd + m.bcf.cols());
  b << m.bcd, m.bcf;
  const auto d = zoh_discretize(m.ac, b, ts);
  LtiModel out = m;
  out.discrete = DiscretePart{ts, d.a, d.b.leftCols(nd), d.b.rightCols(m.bcf.cols())};
  return out;
}

StabilityReport validate_stability(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("validate_stability: eigen decomposition failed");
  StabilityReport r;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.moduli.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(r.moduli.begin(), r.moduli.end(), std::greater<>());
  r.spectral_radius = r.moduli.empty() ? 0.0 : r.moduli.front();
  r.stable = r.spectral_radius < 1.0 - 1e-9;
  return r;
}

StabilityReport validate_stability(const LtiModel& m) { return validate_stability(m.disc().a); }

LtiModel make_model(Variant variant, const GridParams& p, double ts) {
  return discretize_model(build_continuous(variant, p), ts);
}

}  // namespace acdc
