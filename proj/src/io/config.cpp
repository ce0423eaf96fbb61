#include "acdc/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "acdc/error.hpp"
#include "acdc/grid/model.hpp"

namespace acdc {

using nlohmann::json;

namespace {

/// Object reader that remembers which keys were consumed, so leftovers
/// (typos, stale options) can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  bool get(const char* key, T& out) {
    const auto it = j_.find(key);
    seen_.insert(key);
    if (it == j_.end()) return false;
    const std::string where = path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(where + ": expected true/false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(where + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(where + ": expected a string");
    }
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

Channel channel_from(const std::string& s, const std::string& where) {
  try {
    return parse_channel(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Variant variant_from(const std::string& s, const std::string& where) {
  try {
    return parse_variant(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<Channel> channel_list(const json* j, const std::string& where) {
  if (!j->is_array()) throw ConfigError(where + ": expected a list of channel names");
  std::vector<Channel> out;
  for (const auto& e : *j) {
    if (!e.is_string()) throw ConfigError(where + ": expected channel names");
    out.push_back(channel_from(e.get<std::string>(), where));
  }
  return out;
}

void read_area(AreaParams& a, const json& j, const std::string& where) {
  Section s(j, where);
  s.get("kp", a.kp);
  s.get("tp", a.tp);
  s.get("beta", a.beta);
  s.get("ki", a.ki);
  s.get("j_em", a.j_em);
  s.get("t_ess", a.t_ess);
  if (const auto* g = s.child("gens")) {
    if (!g->is_array() || g->size() != 2) throw ConfigError(s.path("gens") + ": expected a list of 2 generators");
    for (std::size_t i = 0; i < 2; ++i) {
      Section gs((*g)[i], s.path("gens") + "[" + std::to_string(i) + "]");
      gs.get("r", a.gens[i].r);
      gs.get("t_ch", a.gens[i].t_ch);
      gs.get("phi", a.gens[i].phi);
      gs.finish();
    }
  }
  s.finish();
}

LoadProfile read_load(const json& j, const std::string& where) {
  Section s(j, where);
  std::string type = "step";
  s.get("type", type);
  if (type == "step") {
    LoadStep l;
    s.get("area", l.area);
    s.get("magnitude", l.magnitude);
    s.get("onset_s", l.onset_s);
    s.finish();
    return l;
  }
  if (type == "ou") {
    StochasticLoad l;
    s.get("reversion_rate", l.reversion_rate);
    s.get("volatility", l.volatility);
    s.get("seed", l.seed);
    s.finish();
    return l;
  }
  throw ConfigError(where + ".type: expected 'step' or 'ou'");
}

TimedAttack read_attack(const json& j, const std::string& where) {
  Section s(j, where);
  TimedAttack t;
  s.get("onset_s", t.onset_s);
  std::string shape = "step";
  s.get("shape", shape);
  if (shape == "step") {
    t.scenario.shape = StepShape{};
  } else if (shape == "pulse") {
    t.pulse_s = 0.04;
    s.get("duration_s", t.pulse_s);
    t.scenario.shape = PulseShape{};
  } else if (shape == "ramp") {
    RampShape r;
    s.get("slope", r.slope);
    t.scenario.shape = r;
  } else if (shape == "scaling") {
    t.scenario.shape = ScalingShape{};
  } else if (shape == "random") {
    RandomShape r;
    s.get("std", r.std_dev);
    s.get("seed", r.seed);
    t.scenario.shape = r;
  } else {
    throw ConfigError(where + ".shape: expected step, pulse, ramp, scaling or random");
  }
  const json* entries = s.child("entries");
  if (!entries || !entries->is_array()) throw ConfigError(where + ".entries: expected a list");
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const std::string ew = where + ".entries[" + std::to_string(i) + "]";
    Section es((*entries)[i], ew);
    std::string ch;
    if (!es.get("channel", ch)) throw ConfigError(ew + ": missing 'channel'");
    AttackEntry e{channel_from(ch, ew + ".channel"), 0.0};
    if (!es.get("magnitude", e.magnitude)) throw ConfigError(ew + ": missing 'magnitude'");
    es.finish();
    t.scenario.entries.push_back(e);
  }
  s.finish();
  return t;
}

}  // namespace

void apply_param_overrides(GridParams& p, const json& overrides) {
  Section s(overrides, "model.params");
  if (const auto* areas = s.child("areas")) {
    if (!areas->is_array() || areas->size() != 2) throw ConfigError("model.params.areas: expected a list of 2 areas");
    for (std::size_t i = 0; i < 2; ++i) read_area(p.area[i], (*areas)[i], "model.params.areas[" + std::to_string(i) + "]");
  }
  s.get("t12", p.t12);
  s.get("k1", p.k1);
  s.get("k2", p.k2);
  s.get("k_ac", p.k_ac);
  s.get("t_dc", p.t_dc);
  s.get("omega0", p.omega0);
  std::string droop;
  if (s.get("droop", droop)) {
    if (droop == "auto") {
      p.droop = DroopConvention::kAuto;
    } else if (droop == "as-printed") {
      p.droop = DroopConvention::kAsPrinted;
    } else if (droop == "standard") {
      p.droop = DroopConvention::kStandard;
    } else {
      throw ConfigError("model.params.droop: expected auto, as-printed or standard");
    }
  }
  s.finish();
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "config");

  if (const auto* m = root.child("model")) {
    Section s(*m, "model");
    std::string v;
    if (s.get("variant", v)) c.model.variant = variant_from(v, "model.variant");
    s.get("ts", c.model.ts);
    if (const auto* p = s.child("params")) {
      GridParams probe = GridParams::defaults(c.model.variant);
      apply_param_overrides(probe, *p);  // schema check now, values resolved later
      c.model.overrides = *p;
    }
    s.finish();
  }

  if (const auto* sc = root.child("scenario")) {
    Section s(*sc, "scenario");
    s.get("horizon_s", c.scenario.horizon_s);
    if (const auto* loads = s.child("loads")) {
      if (!loads->is_array()) throw ConfigError("scenario.loads: expected a list");
      for (std::size_t i = 0; i < loads->size(); ++i) {
        c.scenario.loads.push_back(read_load((*loads)[i], "scenario.loads[" + std::to_string(i) + "]"));
      }
    }
    if (const auto* attacks = s.child("attacks")) {
      if (!attacks->is_array()) throw ConfigError("scenario.attacks: expected a list");
      for (std::size_t i = 0; i < attacks->size(); ++i) {
        c.scenario.attacks.push_back(read_attack((*attacks)[i], "scenario.attacks[" + std::to_string(i) + "]"));
      }
    }
    if (const auto* n = s.child("noise")) {
      Section ns(*n, "scenario.noise");
      auto& noise = c.scenario.noise;
      ns.get("enabled", noise.enabled);
      ns.get("freq_variance", noise.freq_variance);
      ns.get("other_variance", noise.other_variance);
      ns.get("process", noise.process);
      ns.get("measurement", noise.measurement);
      ns.get("seed", noise.seed);
      ns.finish();
    }
    s.finish();
  }

  if (const auto* v = root.child("vuln")) {
    Section s(*v, "vuln");
    auto& st = c.vuln.stealth;
    s.get("dw_min_hz", st.dw_min_hz);
    s.get("dw_max_hz", st.dw_max_hz);
    s.get("ace_max", st.ace_max);
    s.get("pdc_ref_max", st.pdc_ref_max);
    s.get("mfd_lim_hz", st.mfd_lim_hz);
    std::string anchor;
    if (s.get("anchor", anchor)) st.anchor = channel_from(anchor, "vuln.anchor");
    double mu = 0.0;
    if (s.get("mu", mu)) st.mu = mu;
    if (const auto* p = s.child("protected")) st.protected_set = channel_list(p, "vuln.protected");
    s.get("horizon_s", c.vuln.horizon_s);
    s.get("stride", st.stride);
    s.get("big_m", st.big_m);
    s.get("area", st.area);
    std::string mode;
    if (s.get("mode", mode)) {
      if (mode == "bias") {
        st.mode = StealthMode::kBias;
      } else if (mode == "trajectory") {
        st.mode = StealthMode::kTrajectory;
      } else {
        throw ConfigError("vuln.mode: expected bias or trajectory");
      }
    }
    s.finish();
  }

  if (const auto* d = root.child("detect")) {
    Section s(*d, "detect");
    s.get("degree", c.detect.synth.degree);
    s.get("pole", c.detect.synth.pole);
    s.get("eta", c.detect.synth.eta);
    if (const auto* ch = s.child("channels")) c.detect.channels = channel_list(ch, "detect.channels");
    s.get("bank_file", c.detect.bank_file);
    s.get("trajectory", c.detect.trajectory);
    s.get("threshold_sigma", c.detect.threshold_sigma);
    s.finish();
  }

  if (const auto* w = root.child("sweep")) {
    Section s(*w, "sweep");
    std::string ch;
    if (s.get("channel", ch)) c.sweep.channel = channel_from(ch, "sweep.channel");
    s.get("max_magnitude", c.sweep.max_magnitude);
    s.get("points", c.sweep.points);
    if (const auto* vs = s.child("variants")) {
      if (!vs->is_array()) throw ConfigError("sweep.variants: expected a list");
      c.sweep.variants.clear();
      for (const auto& e : *vs) {
        if (!e.is_string()) throw ConfigError("sweep.variants: expected variant names");
        c.sweep.variants.push_back(variant_from(e.get<std::string>(), "sweep.variants"));
      }
    }
    s.finish();
  }

  if (const auto* o = root.child("output")) {
    Section s(*o, "output");
    s.get("directory", c.out_dir);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

Eigen::Index ExperimentConfig::horizon_samples() const {
  return static_cast<Eigen::Index>(std::llround(scenario.horizon_s / model.ts));
}

GridParams ExperimentConfig::params() const {
  GridParams p = GridParams::defaults(model.variant);
  apply_param_overrides(p, model.overrides);
  return p;
}

std::vector<AttackScenario> ExperimentConfig::attacks() const {
  std::vector<AttackScenario> out;
  for (const auto& a : scenario.attacks) {
    AttackScenario s = a.scenario;
    s.onset = static_cast<Eigen::Index>(std::llround(a.onset_s / model.ts));
    if (std::holds_alternative<PulseShape>(s.shape)) {
      s.shape = PulseShape{std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(a.pulse_s / model.ts)))};
    }
    out.push_back(std::move(s));
  }
  return out;
}

Matrix ExperimentConfig::loads() const {
  const auto h = horizon_samples();
  Matrix d = Matrix::Zero(h, 2);
  for (const auto& l : scenario.loads) d += gen_load_profile(l, h, model.ts);
  return d;
}

void ExperimentConfig::reseed(std::uint64_t seed) {
  scenario.noise.seed = seed;
  std::uint64_t k = 1;
  for (auto& l : scenario.loads) {
    if (auto* ou = std::get_if<StochasticLoad>(&l)) ou->seed = seed + k++;
  }
  for (auto& a : scenario.attacks) {
    if (auto* r = std::get_if<RandomShape>(&a.scenario.shape)) r->seed = seed + k++;
  }
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(model.ts > 0.0 && std::isfinite(model.ts), "model.ts must be > 0");
  check(scenario.horizon_s > 0.0 && horizon_samples() >= 1, "scenario.horizon_s must cover at least one sample");
  check(vuln.horizon_s > 0.0, "vuln.horizon_s must be > 0");
  check(sweep.points >= 2, "sweep.points must be >= 2");
  check(sweep.max_magnitude > 0.0, "sweep.max_magnitude must be > 0");
  check(detect.threshold_sigma > 0.0, "detect.threshold_sigma must be > 0");
  try {
    params().validate();
    const auto channels = channels_of(model.variant);
    auto measured = [&](Channel ch, const std::string& where) {
      check(std::find(channels.begin(), channels.end(), ch) != channels.end(),
            where + ": channel '" + std::string(to_string(ch)) + "' is not measured in variant " +
                std::string(to_string(model.variant)));
    };
    for (const auto& a : attacks()) {
      a.validate();
      check(a.onset < horizon_samples(), "scenario: attack onset must fall inside the horizon");
      for (const auto& e : a.entries) measured(e.channel, "scenario.attacks");
    }
    for (const auto& l : scenario.loads) (void)gen_load_profile(l, 1, model.ts);
    StealthSpec st = vuln.stealth;
    st.horizon = static_cast<Eigen::Index>(std::llround(vuln.horizon_s / model.ts));
    st.validate();
    measured(st.anchor, "vuln.anchor");
    for (auto c : st.protected_set) measured(c, "vuln.protected");
    measured(sweep.channel, "sweep.channel");
    check(detect.synth.degree >= 1, "detect.degree must be >= 1");
    check(std::abs(detect.synth.pole) < 1.0, "detect.pole must satisfy |p| < 1");
    check(detect.synth.eta > 0.0, "detect.eta must be > 0");
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace acdc
