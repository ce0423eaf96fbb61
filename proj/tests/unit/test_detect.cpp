#include <doctest.h>

#include <random>

#include "acdc/detect/dae.hpp"
#include "acdc/detect/rank_tests.hpp"
#include "acdc/detect/residual.hpp"
#include "acdc/error.hpp"
#include "acdc/sim/simulate.hpp"
#include "oracles.hpp"

using namespace acdc;

namespace {

const LtiModel& vi() {
  static const LtiModel m = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  return m;
}

const DaeSystem& vi_dae() {
  static const DaeSystem d = build_dae(vi());
  return d;
}

// Smallest setting at which the DC member of the {ac, dc} bank exists.
SynthOptions working() {
  SynthOptions o;
  o.degree = 8;
  o.eta = 1e5;
  return o;
}

const DetectorBank& bank() {
  static const DetectorBank b = synth_bank(vi_dae(), {Channel::kAcFlow12, Channel::kDcFlow12}, working());
  return b;
}

const ResidualGenerator& dc_member() {
  REQUIRE(bank().channels.size() == 1);
  REQUIRE(bank().channels[0] == Channel::kDcFlow12);
  return bank().members[0];
}

Trajectory attacked(const std::vector<AttackEntry>& entries, Eigen::Index onset, Eigen::Index h,
                    std::uint64_t load_seed) {
  AttackScenario s;
  s.entries = entries;
  s.onset = onset;
  const Matrix loads = gen_load_profile(StochasticLoad{{0.5, 0.5}, {0.01, 0.01}, load_seed}, h, 0.04);
  return simulate(vi(), loads, gen_attack_signal(s, h, vi().channels));
}

/// x' = 0.5 x, y = x + f: the only degree-1 residual is 2(y[k+1] - 0.5 y[k]).
DaeSystem toy() {
  DaeSystem d;
  d.n_states = 1;
  d.h0 = Matrix(2, 1);
  d.h0 << 0.5, 1.0;
  d.h1 = Matrix(2, 1);
  d.h1 << -1.0, 0.0;
  d.l = Matrix(2, 1);
  d.l << 0.0, -1.0;
  d.f = Matrix(2, 1);
  d.f << 0.0, 1.0;
  d.channels = {Channel::kDcFlow12};
  d.measured = {Channel::kDcFlow12};
  return d;
}

}  // namespace

TEST_SUITE("detect") {

TEST_CASE("dae dimensions and blocks") {
  const auto& d = vi_dae();
  CHECK(d.rows() == 16);
  CHECK(d.unknowns() == 14);
  CHECK(d.f.cols() == 4);
  CHECK(max_abs(d.f.bottomRows(4) - Matrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(d.l.topRows(12)) == 0.0);
}

TEST_CASE("a simulated trajectory satisfies the dae") {
  const auto& d = vi_dae();
  const auto tr = attacked({{Channel::kAcFlow12, 0.2}, {Channel::kFreq2, 0.03}}, 40, 200, 3);
  double worst = 0.0;
  for (Eigen::Index k = 0; k + 1 < tr.length(); ++k) {
    Vector x0(14);
    Vector x1(14);
    x0 << tr.x.row(k).transpose(), tr.d.row(k).transpose();
    x1 << tr.x.row(k + 1).transpose(), tr.d.row(k + 1).transpose();
    const Vector r = d.h0 * x0 + d.h1 * x1 + d.l * tr.y_tilde.row(k).transpose() + d.f * tr.f.row(k).transpose();
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("absorbing attacks moves their columns into the unknowns") {
  const auto a = absorb_attacks(vi_dae(), {Channel::kAcFlow12});
  CHECK(a.unknowns() == 15);
  CHECK(a.f.cols() == 3);
  CHECK(max_abs(a.h0.col(14) - vi_dae().f.col(2)) == 0.0);
  CHECK(a.h1.col(14).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(a.attack_column(Channel::kAcFlow12), InvalidArgument);
}

TEST_CASE("toeplitz stacking lists the coefficients of N(q) H(q)") {
  const auto& d = vi_dae();
  const auto t1 = stack_toeplitz(d, 1);
  CHECK(t1.h.rows() == 32);
  CHECK(t1.h.cols() == 42);
  CHECK(max_abs(t1.h.block(16, 14, 16, 14) - d.h0) == 0.0);
  CHECK(max_abs(t1.h.block(0, 28, 16, 14)) == 0.0);

  const auto t3 = stack_toeplitz(d, 3);
  CHECK(t3.h.rows() == 64);
  CHECK(t3.h.cols() == 70);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix n(1, 64);
  for (Eigen::Index i = 0; i < n.size(); ++i) n.data()[i] = g(rng);
  Matrix hp(16, 28);
  hp << d.h0, d.h1;
  CHECK(max_abs(n * t3.h - oracle::poly_multiply(n, 16, hp, 14)) < 1e-12);
  CHECK_THROWS_AS(stack_toeplitz(d, 0), InvalidArgument);
}

TEST_CASE("rank conditions on the shipped model") {
  const auto& d = vi_dae();
  for (auto c : d.channels) CHECK(check_detectable(d, c));
  CHECK(check_isolable(d, Channel::kAcFlow12, {Channel::kAcFlow12, Channel::kDcFlow12}));
  CHECK(check_isolable(d, Channel::kDcFlow12, {Channel::kAcFlow12, Channel::kDcFlow12}));
}

TEST_CASE("an attack that looks like a load is neither detectable nor isolable") {
  DaeSystem d = vi_dae();
  d.f.col(2) = d.h0.col(12);  // the area-1 load column
  CHECK_FALSE(check_detectable(d, Channel::kAcFlow12));
  CHECK_FALSE(check_isolable(d, Channel::kAcFlow12));
}

TEST_CASE("toy system: the unique degree-1 residual") {
  SynthOptions o;
  o.degree = 1;
  o.pole = 0.2;
  const auto g = synth_residual(toy(), Channel::kDcFlow12, o);
  Matrix want(2, 1);
  want << -1.0, 2.0;
  CHECK(max_abs(g.numerator - 0.8 * want) < 1e-12);
  CHECK(g.eta_min == doctest::Approx(2.0));
  CHECK(g.decoupling_error < 1e-14);

  // y = x + f with x[0] = 1 decaying and f = 0.3 from k = 10.
  Matrix y(60, 1);
  double x = 1.0;
  for (Eigen::Index k = 0; k < 60; ++k) {
    y(k, 0) = x + (k >= 10 ? 0.3 : 0.0);
    x *= 0.5;
  }
  const Vector r = run_residual(g, y);
  CHECK(std::abs(r(59) - 0.3) < 1e-12);
}

TEST_CASE("toy system: the box must admit the normalization") {
  SynthOptions o;
  o.degree = 1;
  o.eta = 1.5;
  CHECK_THROWS_AS(synth_residual(toy(), Channel::kDcFlow12, o), DegreeTooLowError);
}

TEST_CASE("the shipped model has no exactly decoupled residual at degree 3") {
  const auto others = absorb_attacks(vi_dae(), {Channel::kAcFlow12});
  CHECK_THROWS_AS(synth_residual(others, Channel::kDcFlow12), DegreeTooLowError);
  CHECK_FALSE(min_feasible_eta(others, Channel::kDcFlow12, 3).has_value());
}

TEST_CASE("a constant AC-flow attack cannot be recovered at any degree") {
  const auto& d = vi_dae();
  for (int deg = 1; deg <= 8; ++deg) {
    CAPTURE(deg);
    CHECK_THROWS_AS(synth_residual(d, Channel::kAcFlow12, SynthOptions{deg, 0.1, 1e12, {}}), DegreeTooLowError);
  }
}

TEST_CASE("min feasible eta is what synthesis needs") {
  const auto others = absorb_attacks(vi_dae(), {Channel::kAcFlow12});
  const auto e = min_feasible_eta(others, Channel::kDcFlow12, 8);
  REQUIRE(e.has_value());
  CHECK(*e <= 1e5);
  CHECK_THROWS_AS(synth_residual(others, Channel::kDcFlow12, SynthOptions{8, 0.1, *e * 0.99, {}}),
                  DegreeTooLowError);
  CHECK_NOTHROW(synth_residual(others, Channel::kDcFlow12, SynthOptions{8, 0.1, *e * 1.01, {}}));
}

TEST_CASE("bank at the working setting: DC member recovers and isolates") {
  const auto& b = bank();
  CHECK(b.members.size() == 1);
  CHECK(b.failures.size() == 1);
  CHECK_FALSE(b.complete());
  const auto& g = dc_member();
  CHECK(g.decoupling_error < 1e-8);
  CHECK(g.decoupled == std::vector<Channel>{Channel::kAcFlow12});

  const auto clean = attacked({}, 0, 600, 21);
  const Vector r0 = run_residual(g, clean.y_tilde);
  CHECK(r0.tail(600 - g.startup_samples()).cwiseAbs().maxCoeff() < 1e-6);

  const auto tr = attacked({{Channel::kAcFlow12, 0.44}, {Channel::kDcFlow12, -0.39}}, 250, 600, 21);
  const Vector r = run_residual(g, tr.y_tilde);
  CHECK(std::abs(r(599) + 0.39) < 1e-6);
  CHECK(r.segment(g.startup_samples(), 240).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("filter matches a cascade of first-order sections") {
  const auto& g = dc_member();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.01);
  Matrix y(200, 4);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = n(rng);
  const Vector r = run_residual(g, y);

  const Eigen::Index d = g.degree;
  Vector s = Vector::Zero(200);
  for (Eigen::Index k = 0; k < 200; ++k) {
    for (Eigen::Index i = 0; i <= d; ++i) {
      const Eigen::Index t = k - d + i;
      if (t >= 0) s(k) += g.numerator.row(i).dot(y.row(t));
    }
  }
  for (Eigen::Index stage = 0; stage < d; ++stage) {
    Vector next(200);
    double prev = 0.0;
    for (Eigen::Index k = 0; k < 200; ++k) next(k) = prev = g.pole * prev + s(k);
    s = next;
  }
  CHECK(max_abs(r - s) <= 1e-9 * std::max(1.0, max_abs(s)));
}

TEST_CASE("stream order is checked") {
  const auto& g = dc_member();
  const Matrix y = Matrix::Zero(10, 4);
  const std::vector<Channel> swapped{Channel::kFreq2, Channel::kFreq1, Channel::kAcFlow12, Channel::kDcFlow12};
  CHECK_THROWS_AS(run_residual(g, y, swapped), InvalidArgument);
  CHECK_THROWS_AS(run_residual(g, Matrix::Zero(10, 3)), InvalidArgument);
  CHECK_NOTHROW(run_residual(g, y, vi().channels));
}

TEST_CASE("a faster pole never settles later") {
  const auto others = absorb_attacks(vi_dae(), {Channel::kAcFlow12});
  const auto tr = attacked({{Channel::kDcFlow12, -0.39}}, 250, 600, 5);
  double prev = 1e9;
  for (double p : {0.5, 0.3, 0.1}) {
    auto o = working();
    o.pole = p;
    const auto g = synth_residual(others, Channel::kDcFlow12, o);
    const auto t = settling_time(run_residual(g, tr.y_tilde), 0.04, 250, -0.39);
    REQUIRE(t.has_value());
    CHECK(*t <= prev + 1e-12);
    prev = *t;
  }
}

TEST_CASE("settling time and alarm threshold") {
  Vector r = Vector::Zero(20);
  r.segment(5, 15).setConstant(1.0);
  r(7) = 0.5;
  CHECK(*settling_time(r, 0.1, 5, 1.0) == doctest::Approx(0.3));
  r(19) = 2.0;
  CHECK_FALSE(settling_time(r, 0.1, 5, 1.0).has_value());
  CHECK_THROWS_AS(settling_time(r, 0.1, 20, 1.0), InvalidArgument);

  Vector c = Vector::Constant(50, -0.2);
  CHECK(alarm_threshold(c, 10) == doctest::Approx(0.2));
  c(0) = 100.0;
  CHECK(alarm_threshold(c, 1) == doctest::Approx(0.2));
}

TEST_CASE("synthesis rejects bad options") {
  const auto& d = vi_dae();
  CHECK_THROWS_AS(synth_residual(d, Channel::kDcFlow12, SynthOptions{0, 0.1, 100.0, {}}), InvalidArgument);
  CHECK_THROWS_AS(synth_residual(d, Channel::kDcFlow12, SynthOptions{3, 1.0, 100.0, {}}), InvalidArgument);
  CHECK_THROWS_AS(synth_residual(d, Channel::kDcFlow12, SynthOptions{3, 0.1, 0.0, {}}), InvalidArgument);
}

}  // TEST_SUITE
