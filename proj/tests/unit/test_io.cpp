#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "acdc/error.hpp"
#include "acdc/io/config.hpp"
#include "acdc/io/csv.hpp"
#include "acdc/io/serialize.hpp"

using namespace acdc;
using nlohmann::json;

TEST_SUITE("io") {

TEST_CASE("unknown keys are rejected with their path") {
  try {
    parse_config(json::parse(R"({"model": {"variant": "acdc", "bogus": 1}})"));
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(json::parse(R"({"extra": {}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"params": {"areas": [{"kp": 1, "zz": 2}, {}]}}})")),
                  ConfigError);
}

TEST_CASE("wrong types and values are config errors") {
  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"ts": "fast"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"ts": -1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"variant": "dc"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"model": {"variant": "ac"},
      "scenario": {"attacks": [{"entries": [{"channel": "dc", "magnitude": 0.1}]}]}})")),
                  ConfigError);
}

TEST_CASE("an empty document gives the defaults") {
  const auto c = parse_config(json::object());
  CHECK(c.model.variant == Variant::kAcDcVi);
  CHECK(c.model.ts == 0.04);
  CHECK(c.horizon_samples() == 750);
  CHECK(c.vuln.stealth.ace_max == 0.05);
  CHECK(c.detect.synth.degree == 3);
  CHECK(max_abs(c.loads()) == 0.0);
}

TEST_CASE("parameter overrides sit on top of the variant defaults") {
  const auto c = parse_config(json::parse(R"({"model": {"params": {"k_ac": -0.5, "areas": [{"ki": 0.07}, {}]}}})"));
  const auto p = c.params();
  const auto d = GridParams::defaults(Variant::kAcDcVi);
  CHECK(p.k_ac == -0.5);
  CHECK(p.area[0].ki == 0.07);
  CHECK(p.area[1].ki == d.area[1].ki);
  CHECK(p.k1 == d.k1);
}

TEST_CASE("reseeding changes every stochastic element") {
  auto c = parse_config(json::parse(R"({"scenario": {
      "loads": [{"type": "ou", "seed": 1}],
      "attacks": [{"shape": "random", "seed": 1, "entries": [{"channel": "ac", "magnitude": 0.1}]}]}})"));
  const Matrix before = c.loads();
  c.reseed(99);
  CHECK(c.scenario.noise.seed == 99);
  CHECK(max_abs(c.loads() - before) > 0.0);
  CHECK(std::get<RandomShape>(c.attacks()[0].shape).seed != 1);
}

TEST_CASE("every shipped config parses") {
  const std::filesystem::path dir = std::filesystem::path(ACDC_SOURCE_DIR) / "configs";
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++n;
  }
  CHECK(n >= 4);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("bank json round trip") {
  const auto m = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  const auto d = build_dae(m);
  SynthOptions o;
  o.degree = 8;
  o.eta = 1e5;
  const auto b = synth_bank(d, {Channel::kAcFlow12, Channel::kDcFlow12}, o);
  REQUIRE(b.members.size() == 1);

  const json j = json::parse(bank_to_json(b, m).dump());
  const auto s = bank_from_json(j);
  CHECK(s.fingerprint == model_fingerprint(m));
  CHECK(s.variant == Variant::kAcDcVi);
  CHECK(s.bank.failures == b.failures);
  REQUIRE(s.bank.members.size() == 1);
  const auto& g = s.bank.members[0];
  CHECK(max_abs(g.numerator - b.members[0].numerator) == 0.0);
  CHECK(max_abs(g.denominator - b.members[0].denominator) == 0.0);
  CHECK(g.eta_min == b.members[0].eta_min);
  CHECK(g.measured == b.members[0].measured);

  json broken = j;
  broken["generators"][0]["numerator"] = json::array();
  CHECK_THROWS_AS(bank_from_json(broken), InvalidArgument);
  CHECK_THROWS_AS(bank_from_json(json{{"format", "other"}}), InvalidArgument);
}

TEST_CASE("fingerprint follows the discrete model") {
  const auto a = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi));
  const auto b = make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi), 0.05);
  auto p = GridParams::defaults(Variant::kAcDcVi);
  p.k_ac *= 1.01;
  const auto c = make_model(Variant::kAcDcVi, p);
  CHECK(model_fingerprint(a) == model_fingerprint(make_model(Variant::kAcDcVi, GridParams::defaults(Variant::kAcDcVi))));
  CHECK(model_fingerprint(a) != model_fingerprint(b));
  CHECK(model_fingerprint(a) != model_fingerprint(c));
}

TEST_CASE("trajectory csv carries the corrupted measurements") {
  const auto m = make_model(Variant::kAcDc, GridParams::defaults(Variant::kAcDc));
  AttackScenario s;
  s.entries = {{Channel::kFreq1, 0.02}, {Channel::kDcFlow12, -0.1}};
  s.onset = 5;
  const auto tr = simulate(m, gen_load_profile(LoadStep{1, 0.03, 0.2}, 60, 0.04),
                           gen_attack_signal(s, 60, m.channels));
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  std::string header;
  std::getline(std::istringstream(ss.str()), header);
  CHECK(header.rfind("t,dw1_hz,dw2_hz", 0) == 0);

  double ts = 0.0;
  const Matrix y = read_corrupted_measurements(ss, m.channels, ts);
  CHECK(ts == doctest::Approx(0.04));
  CHECK(max_abs(y - tr.y_tilde) < 1e-9);
}

}  // TEST_SUITE
