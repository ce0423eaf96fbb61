#include <doctest.h>

#include "acdc/error.hpp"
#include "acdc/grid/model.hpp"

using namespace acdc;

namespace {

Eigen::Index idx(const LtiModel& m, StateLabel s) { return *m.state_index(s); }

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("variant dimensions") {
  const auto ac = make_model(Variant::kAcOnly, GridParams::defaults(Variant::kAcOnly));
  const auto acdc = make_model(Variant::kAcDc, GridParams::defaults(Variant::kAcDc));
  const auto vi = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  CHECK(ac.n_states() == 9);
  CHECK(ac.n_channels() == 3);
  CHECK(acdc.n_states() == 10);
  CHECK(acdc.n_channels() == 4);
  CHECK(vi.n_states() == 12);
  CHECK(vi.n_channels() == 4);
  CHECK(vi.disc().a.rows() == 12);
  CHECK(vi.disc().bd.cols() == 2);
  CHECK(vi.disc().bf.cols() == 4);
  CHECK_FALSE(ac.channel_index(Channel::kDcFlow12).has_value());
  CHECK_THROWS_AS(ac.require_channel(Channel::kDcFlow12), InvalidArgument);
}

TEST_CASE("shipped defaults are stable in every variant") {
  for (auto v : {Variant::kAcOnly, Variant::kAcDc, Variant::kAcDcVi}) {
    const auto m = make_model(v, GridParams::defaults(v));
    const auto rep = validate_stability(m);
    CHECK(rep.stable);
    CHECK(rep.spectral_radius < 1.0);
    CHECK(m.droop_standard);
  }
}

TEST_CASE("printed droop sign is unstable and the fallback is reported") {
  auto p = GridParams::defaults(Variant::kAcDcVi);
  p.droop = DroopConvention::kAsPrinted;
  const auto printed = build_continuous(Variant::kAcDcVi, p);
  Eigen::EigenSolver<Matrix> es(printed.ac, false);
  CHECK(es.eigenvalues().real().maxCoeff() > 0.0);

  p.droop = DroopConvention::kAuto;
  const auto fallback = build_continuous(Variant::kAcDcVi, p);
  CHECK(fallback.droop_standard);
  CHECK_FALSE(fallback.warnings.empty());
}

TEST_CASE("tie-line row integrates the frequency difference") {
  const auto p = GridParams::defaults(Variant::kAcDcVi);
  const auto m = build_continuous(Variant::kAcDcVi, p);
  const auto ac = idx(m, StateLabel::kPac12);
  CHECK(m.ac(ac, idx(m, StateLabel::kFreq1)) == doctest::Approx(p.t12));
  CHECK(m.ac(ac, idx(m, StateLabel::kFreq2)) == doctest::Approx(-p.t12));
  CHECK(m.ac.row(ac).cwiseAbs().sum() == doctest::Approx(2.0 * p.t12));
}

TEST_CASE("loads enter only the swing rows with opposite sign to generation") {
  const auto m = build_continuous(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  const auto w1 = idx(m, StateLabel::kFreq1);
  const auto w2 = idx(m, StateLabel::kFreq2);
  CHECK(m.bcd(w1, 0) < 0.0);
  CHECK(m.bcd(w2, 1) < 0.0);
  CHECK(m.bcd(w1, 0) == doctest::Approx(-m.ac(w1, idx(m, StateLabel::kPm11))));
  CHECK(m.bcd.cwiseAbs().sum() == doctest::Approx(std::abs(m.bcd(w1, 0)) + std::abs(m.bcd(w2, 1))));
}

TEST_CASE("zero controller gains give no attack path") {
  auto p = GridParams::defaults(Variant::kAcDcVi);
  p.k1 = p.k2 = p.k_ac = 0.0;
  for (auto& a : p.area) a.ki = 0.0;
  CHECK(max_abs(build_attack_matrix(Variant::kAcDcVi, p)) == 0.0);
}

TEST_CASE("attacks enter only the controllers fed by uploaded measurements") {
  const auto p = GridParams::defaults(Variant::kAcDcVi);
  const auto m = build_continuous(Variant::kAcDcVi, p);
  for (auto s : {StateLabel::kFreq1, StateLabel::kFreq2, StateLabel::kPm11, StateLabel::kPm22, StateLabel::kPac12,
                 StateLabel::kPess1, StateLabel::kPess2}) {
    CHECK(m.bcf.row(idx(m, s)).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto dc = idx(m, StateLabel::kPdc12);
  const auto ac_col = *m.channel_index(Channel::kAcFlow12);
  CHECK(m.bcf(dc, ac_col) == doctest::Approx(p.k_ac / p.t_dc));
  CHECK(m.bcf(idx(m, StateLabel::kPagc1), ac_col) == doctest::Approx(p.area[0].ki));
  CHECK(m.bcf(idx(m, StateLabel::kPagc2), ac_col) == doctest::Approx(-p.area[1].ki));
}

TEST_CASE("discrete matrices are the exponential of the continuous ones") {
  const auto m = make_model(Variant::kAcDc, GridParams::defaults(Variant::kAcDc), 0.04);
  CHECK(max_abs(m.disc().a - mat_exp(m.ac * 0.04)) < 1e-12);
  CHECK(m.disc().ts == 0.04);
  CHECK(max_abs(m.c * m.c.transpose() - Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("integral control removes the steady-state frequency error of a load step") {
  const auto m = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  const Matrix g = steady_state_gain(m.disc().a, m.disc().bd, m.c);
  CHECK(max_abs(g) < 1e-9);
}

TEST_CASE("parameter validation") {
  auto p = GridParams::defaults(Variant::kAcDcVi);
  p.area[0].tp = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = GridParams::defaults(Variant::kAcDcVi);
  p.t_dc = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = GridParams::defaults(Variant::kAcDcVi);
  p.area[1].gens[0].r = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK_THROWS_AS(parse_variant("dc"), InvalidArgument);
  CHECK(parse_variant("acdc-vi") == Variant::kAcDcVi);
  CHECK(parse_channel("acflow12") == Channel::kAcFlow12);
}

}  // TEST_SUITE
