#include <doctest.h>

#include <algorithm>

#include "acdc/error.hpp"
#include "acdc/sim/metrics.hpp"
#include "acdc/sim/simulate.hpp"
#include "acdc/vuln/stealth.hpp"

using namespace acdc;

namespace {

const LtiModel& model(Variant v) {
  static const LtiModel ac = make_model(Variant::kAcOnly, GridParams::defaults(Variant::kAcOnly));
  static const LtiModel acdc = make_model(Variant::kAcDc, GridParams::defaults(Variant::kAcDc));
  static const LtiModel vi = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  return v == Variant::kAcOnly ? ac : v == Variant::kAcDc ? acdc : vi;
}

Eigen::Index row_of(const StealthSet& s, const std::string& name) {
  const auto it = std::find(s.row_names.begin(), s.row_names.end(), name);
  REQUIRE(it != s.row_names.end());
  return it - s.row_names.begin();
}

/// Δω_area in Hz after a constant physical attack vector applied from k = 0.
Vector simulate_constant(const LtiModel& m, const Vector& f_phys, Eigen::Index h, int area) {
  AttackSignal sig = no_attack(h, m.n_channels());
  sig.additive.rowwise() = to_internal(m.channels, f_phys).transpose();
  return simulate(m, Matrix::Zero(h, 2), sig).freq_hz(area);
}

StealthSpec fast_spec() {
  StealthSpec s;
  s.stride = 10;
  return s;
}

}  // namespace

TEST_SUITE("vuln") {

TEST_CASE("step response coefficients match simulation") {
  const auto& m = model(Variant::kAcDcVi);
  const Matrix g = step_response_coeffs(m, 1, 300);
  CHECK(g.row(0).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index c = 0; c < m.n_channels(); ++c) {
    Vector unit = Vector::Zero(m.n_channels());
    unit(c) = 1.0;
    const Vector hz = simulate_constant(m, unit, 300, 1);
    CHECK(max_abs(hz - g.col(c)) < 1e-12);
  }
}

TEST_CASE("step response coefficients converge to the DC gain") {
  const auto& m = model(Variant::kAcDcVi);
  // The AGC mode has modulus ~0.9988, so this needs a long horizon.
  const Matrix g = step_response_coeffs(m, 2, 20000);
  Matrix bf = m.disc().bf;
  for (Eigen::Index c = 0; c < m.n_channels(); ++c) bf.col(c) *= internal_per_physical(m.channels[c]);
  const Matrix dc = steady_state_gain(m.disc().a, bf, Matrix::Identity(m.n_states(), m.n_states()));
  CHECK(max_abs(g.row(19999) - dc.row(1) / kTwoPi) < 1e-9);
}

TEST_CASE("stealth bias rows") {
  const auto& m = model(Variant::kAcDcVi);
  const auto s = build_stealth_set(m, StealthSpec{});
  Vector f = Vector::Zero(4);
  f << 0.0, 0.0, 0.44, -0.39;
  const Vector v = s.f * f;
  CHECK(v(row_of(s, "ace1")) == doctest::Approx(0.05));
  CHECK(v(row_of(s, "ace2")) == doctest::Approx(-0.05));
  CHECK(v(row_of(s, "pdc_ref")) == doctest::Approx(m.params.k_ac * 0.44));

  Vector freq = Vector::Zero(4);
  freq(0) = 0.11;
  CHECK(s.violation(freq) > 0.0);
  freq(0) = 0.05;
  CHECK(s.violation(freq) == 0.0);
}

TEST_CASE("ac-only variant has no DC reference row content") {
  const auto& m = model(Variant::kAcOnly);
  const auto s = build_stealth_set(m, StealthSpec{});
  CHECK(s.f.row(row_of(s, "pdc_ref")).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("milp agrees with exhaustive enumeration") {
  for (auto v : {Variant::kAcOnly, Variant::kAcDc, Variant::kAcDcVi}) {
    for (double lim : {0.2, 0.8}) {
      for (double ace : {0.02, 0.05, 0.2}) {
        CAPTURE(static_cast<int>(v));
        CAPTURE(lim);
        CAPTURE(ace);
        auto spec = fast_spec();
        spec.mfd_lim_hz = lim;
        spec.ace_max = ace;
        const auto& m = model(v);
        const auto milp = find_disruptive_stealthy(m, spec);
        const auto ref = enumerate_oracle(m, spec);
        CHECK(milp.alpha_star == ref.alpha_star);
        if (milp.feasible() && ref.feasible()) {
          CHECK(milp.f_star.lpNorm<1>() == doctest::Approx(ref.f_star.lpNorm<1>()).epsilon(1e-6));
          const auto s = build_stealth_set(m, spec);
          CHECK(s.violation(milp.f_star) < 1e-7);
          CHECK(std::abs(milp.mfd_hz) >= lim - 1e-7);
        }
      }
    }
  }
}

TEST_CASE("the found attack really disrupts the simulated grid") {
  const auto& m = model(Variant::kAcDcVi);
  const StealthSpec spec;
  const auto r = find_disruptive_stealthy(m, spec);
  REQUIRE(r.feasible());
  CHECK(r.alpha_star == 2);
  const Vector hz = simulate_constant(m, r.f_star, spec.horizon, spec.area);
  CHECK(hz(r.k_star) == doctest::Approx(r.mfd_hz).epsilon(1e-9));
  CHECK(std::abs(series_impact(hz, m.disc().ts, 0, spec.horizon).mfd_hz) >= spec.mfd_lim_hz - 1e-7);
}

TEST_CASE("zero disruptiveness limit leaves only the anchor") {
  auto spec = fast_spec();
  spec.mfd_lim_hz = 0.0;
  spec.mu = 0.01;
  const auto r = find_disruptive_stealthy(model(Variant::kAcDcVi), spec);
  REQUIRE(r.feasible());
  CHECK(r.alpha_star == 1);
}

TEST_CASE("protecting a channel never helps the attacker") {
  const auto& m = model(Variant::kAcDcVi);
  auto spec = fast_spec();
  const auto open = find_disruptive_stealthy(m, spec);
  spec.protected_set = {Channel::kDcFlow12};
  const auto closed = find_disruptive_stealthy(m, spec);
  CHECK(closed.alpha_star >= open.alpha_star);
  if (closed.feasible()) CHECK(closed.f_star(3) == 0.0);
}

TEST_CASE("tighter stealth limits never lower the attack cardinality") {
  const auto& m = model(Variant::kAcDc);
  int prev = 0;
  for (double ace : {0.5, 0.1, 0.05, 0.01}) {
    auto spec = fast_spec();
    spec.ace_max = ace;
    const auto r = find_disruptive_stealthy(m, spec);
    CHECK(r.alpha_star >= prev);
    prev = r.alpha_star;
  }
}

TEST_CASE("invalid specs are rejected") {
  const auto& m = model(Variant::kAcDcVi);
  StealthSpec spec;
  spec.protected_set = {Channel::kAcFlow12};
  CHECK_THROWS_AS(find_disruptive_stealthy(m, spec), InvalidArgument);
  spec = StealthSpec{};
  spec.mfd_lim_hz = -0.1;
  CHECK_THROWS_AS(build_stealth_set(m, spec), InvalidArgument);
  spec = StealthSpec{};
  spec.anchor = Channel::kDcFlow12;
  CHECK_THROWS_AS(build_stealth_set(model(Variant::kAcOnly), spec), InvalidArgument);
}

}  // TEST_SUITE
