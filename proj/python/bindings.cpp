#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "acdc/detect/dae.hpp"
#include "acdc/detect/rank_tests.hpp"
#include "acdc/detect/residual.hpp"
#include "acdc/error.hpp"
#include "acdc/io/config.hpp"
#include "acdc/sim/metrics.hpp"
#include "acdc/sim/simulate.hpp"
#include "acdc/vuln/stealth.hpp"

namespace py = pybind11;
using namespace acdc;

namespace {

LtiModel build(const std::string& variant, double ts) {
  const Variant v = parse_variant(variant);
  return make_model(v, GridParams::defaults(v), ts);
}

std::vector<std::string> names(const std::vector<Channel>& cs) {
  std::vector<std::string> out;
  for (auto c : cs) out.emplace_back(to_string(c));
  return out;
}

/// Attacks given as {channel: magnitude}, all starting at `onset_s`.
AttackSignal step_attacks(const LtiModel& m, const std::map<std::string, double>& attacks, double onset_s,
                          Eigen::Index h) {
  if (attacks.empty()) return no_attack(h, m.n_channels());
  AttackScenario s;
  for (const auto& [ch, mag] : attacks) s.entries.push_back({parse_channel(ch), mag});
  s.onset = static_cast<Eigen::Index>(std::llround(onset_s / m.disc().ts));
  return gen_attack_signal(s, h, m.channels);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Two-area AC/HVDC grid model, FDI vulnerability analysis and residual detectors";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<DegreeTooLowError>(mod, "DegreeTooLowError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<LtiModel>(mod, "Model")
      .def(py::init(&build), py::arg("variant") = "acdc-vi", py::arg("ts") = 0.04)
      .def_property_readonly("variant", [](const LtiModel& m) { return std::string(to_string(m.variant)); })
      .def_property_readonly("states", [](const LtiModel& m) {
        std::vector<std::string> out;
        for (auto s : m.states) out.emplace_back(to_string(s));
        return out;
      })
      .def_property_readonly("channels", [](const LtiModel& m) { return names(m.channels); })
      .def_property_readonly("a", [](const LtiModel& m) { return m.disc().a; })
      .def_property_readonly("bd", [](const LtiModel& m) { return m.disc().bd; })
      .def_property_readonly("bf", [](const LtiModel& m) { return m.disc().bf; })
      .def_property_readonly("c", [](const LtiModel& m) { return m.c; })
      .def_property_readonly("ts", [](const LtiModel& m) { return m.disc().ts; })
      .def_property_readonly("spectral_radius", [](const LtiModel& m) { return validate_stability(m).spectral_radius; });

  py::class_<Trajectory>(mod, "Trajectory")
      .def_readonly("ts", &Trajectory::ts)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("y", &Trajectory::y)
      .def_readonly("y_tilde", &Trajectory::y_tilde)
      .def_readonly("f", &Trajectory::f)
      .def_readonly("d", &Trajectory::d)
      .def_readonly("ace", &Trajectory::ace)
      .def_readonly("pdc_ref", &Trajectory::pdc_ref)
      .def("freq_hz", &Trajectory::freq_hz, py::arg("area"))
      .def("mfd_hz", [](const Trajectory& t, int area, Eigen::Index start) {
        return series_impact(t.freq_hz(area), t.ts, start, t.length()).mfd_hz;
      }, py::arg("area") = 1, py::arg("start") = 0);

  mod.def(
      "simulate",
      [](const LtiModel& m, const Matrix& loads, const std::map<std::string, double>& attacks, double onset_s,
         bool noise, std::uint64_t seed) {
        NoiseSpec n;
        n.enabled = noise;
        n.seed = seed;
        return simulate(m, loads, step_attacks(m, attacks, onset_s, loads.rows()), n);
      },
      py::arg("model"), py::arg("loads"), py::arg("attacks") = std::map<std::string, double>{},
      py::arg("onset_s") = 0.0, py::arg("noise") = false, py::arg("seed") = 7,
      "Simulate from rest. loads is horizon x 2; attacks maps channel names to step magnitudes.");

  mod.def(
      "step_load",
      [](int area, double magnitude, double onset_s, Eigen::Index horizon, double ts) {
        return gen_load_profile(LoadStep{area, magnitude, onset_s}, horizon, ts);
      },
      py::arg("area"), py::arg("magnitude"), py::arg("onset_s"), py::arg("horizon"), py::arg("ts") = 0.04);

  mod.def(
      "stochastic_load",
      [](double rate, double volatility, std::uint64_t seed, Eigen::Index horizon, double ts) {
        return gen_load_profile(StochasticLoad{{rate, rate}, {volatility, volatility}, seed}, horizon, ts);
      },
      py::arg("rate"), py::arg("volatility"), py::arg("seed"), py::arg("horizon"), py::arg("ts") = 0.04);

  mod.def(
      "disruptive_threshold",
      [](const LtiModel& m, const std::string& channel, double mfd_lim) {
        const auto t = min_disruptive_magnitude(m, parse_channel(channel), mfd_lim);
        if (!t.reachable) throw InvalidArgument("channel has no effect on the area frequency");
        return t.magnitude;
      },
      py::arg("model"), py::arg("channel") = "ac", py::arg("mfd_lim_hz") = 0.8);

  mod.def(
      "find_attack",
      [](const LtiModel& m, double ace_max, double mfd_lim, std::vector<std::string> protected_set) {
        StealthSpec s;
        s.ace_max = ace_max;
        s.mfd_lim_hz = mfd_lim;
        for (const auto& p : protected_set) s.protected_set.push_back(parse_channel(p));
        const auto r = find_disruptive_stealthy(m, s);
        py::dict out;
        out["feasible"] = r.feasible();
        out["alpha"] = r.feasible() ? py::object(py::int_(r.alpha_star)) : py::object(py::none());
        out["f"] = r.f_star;
        out["mu"] = r.mu;
        out["k_star"] = r.k_star;
        out["mfd_hz"] = r.mfd_hz;
        out["active_rows"] = r.active_rows;
        return out;
      },
      py::arg("model"), py::arg("ace_max") = 0.05, py::arg("mfd_lim_hz") = 0.8,
      py::arg("protected") = std::vector<std::string>{},
      "Minimum-cardinality disruptive stealthy attack; f is in channel order, physical units.");

  py::class_<ResidualGenerator>(mod, "ResidualGenerator")
      .def_property_readonly("target", [](const ResidualGenerator& g) { return std::string(to_string(g.target)); })
      .def_readonly("degree", &ResidualGenerator::degree)
      .def_readonly("pole", &ResidualGenerator::pole)
      .def_readonly("gamma", &ResidualGenerator::gamma)
      .def_readonly("eta_min", &ResidualGenerator::eta_min)
      .def_readonly("decoupling_error", &ResidualGenerator::decoupling_error)
      .def_readonly("numerator", &ResidualGenerator::numerator)
      .def_readonly("denominator", &ResidualGenerator::denominator)
      .def("run", [](const ResidualGenerator& g, const Matrix& y) { return run_residual(g, y); }, py::arg("y"));

  py::class_<DetectorBank>(mod, "DetectorBank")
      .def_property_readonly("channels", [](const DetectorBank& b) { return names(b.channels); })
      .def_readonly("members", &DetectorBank::members)
      .def_readonly("failures", &DetectorBank::failures)
      .def("complete", &DetectorBank::complete)
      .def("run", [](const DetectorBank& b, const Matrix& y) { return run_residual(b, y); }, py::arg("y"));

  mod.def(
      "synth_bank",
      [](const LtiModel& m, const std::vector<std::string>& channels, int degree, double pole, double eta) {
        std::vector<Channel> cs;
        for (const auto& c : channels) cs.push_back(parse_channel(c));
        return synth_bank(build_dae(m), cs, SynthOptions{degree, pole, eta, {}});
      },
      py::arg("model"), py::arg("channels") = std::vector<std::string>{"ac", "dc"}, py::arg("degree") = 3,
      py::arg("pole") = 0.1, py::arg("eta") = 100.0);

  mod.def(
      "check_detectable",
      [](const LtiModel& m, const std::string& c) { return check_detectable(build_dae(m), parse_channel(c)); },
      py::arg("model"), py::arg("channel"));

  mod.def(
      "load_config",
      [](const std::string& path) {
        const auto c = load_config(path);
        py::dict out;
        out["variant"] = std::string(to_string(c.model.variant));
        out["ts"] = c.model.ts;
        out["horizon"] = c.horizon_samples();
        out["out_dir"] = c.out_dir;
        return out;
      },
      py::arg("path"), "Validate a configuration file and return its basic settings.");
}
