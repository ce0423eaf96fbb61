#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "acdc/detect/rank_tests.hpp"
#include "acdc/error.hpp"
#include "acdc/io/csv.hpp"
#include "acdc/io/serialize.hpp"
#include "acdc/sim/metrics.hpp"

namespace acdc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path out_path(const ExperimentConfig& c, const std::string& name) {
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

LtiModel build(const ExperimentConfig& c, Variant v) {
  ExperimentConfig copy = c;
  copy.model.variant = v;
  return make_model(v, copy.params(), c.model.ts);
}

StealthSpec stealth_of(const ExperimentConfig& c) {
  StealthSpec s = c.vuln.stealth;
  s.horizon = static_cast<Eigen::Index>(std::llround(c.vuln.horizon_s / c.model.ts));
  return s;
}

Trajectory run_scenario(const ExperimentConfig& c, const LtiModel& m) {
  const auto h = c.horizon_samples();
  const auto scen = c.attacks();
  const auto sig = gen_attack_signal(scen, h, m.channels);
  return simulate(m, c.loads(), sig, c.scenario.noise);
}

Eigen::Index first_onset(const ExperimentConfig& c) {
  Eigen::Index k = 0;
  const auto a = c.attacks();
  if (!a.empty()) {
    k = a.front().onset;
    for (const auto& s : a) k = std::min(k, s.onset);
  }
  return k;
}

void require_stable(const LtiModel& m) {
  const auto rep = validate_stability(m);
  if (!rep.stable) {
    throw NumericalError("discrete model of variant " + std::string(to_string(m.variant)) +
                         " is not stable (spectral radius " + std::to_string(rep.spectral_radius) + ")");
  }
}

}  // namespace

int cmd_model(const ExperimentConfig& c, std::ostream& log) {
  const auto m = build(c, c.model.variant);
  const auto rep = validate_stability(m);
  const auto path = out_path(c, "model.json");
  save_json(path, model_report(m));
  log << "variant " << to_string(m.variant) << ": " << m.n_states() << " states, " << m.n_channels()
      << " channels, spectral radius " << std::setprecision(6) << rep.spectral_radius
      << (rep.stable ? " (stable)" : " (NOT stable)") << '\n';
  for (const auto& w : m.warnings) log << "warning: " << w << '\n';
  log << "wrote " << path.string() << '\n';
  return rep.stable ? kOk : kNumerical;
}

int cmd_simulate(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  std::vector<Variant> variants{c.model.variant};
  if (o.all_variants) variants = {Variant::kAcOnly, Variant::kAcDc, Variant::kAcDcVi};
  json report = json::object();
  for (auto v : variants) {
    const auto m = build(c, v);
    require_stable(m);
    const auto tr = run_scenario(c, m);
    const auto metrics = compute_metrics(tr, first_onset(c));
    const std::string name = o.all_variants ? "trajectory_" + std::string(to_string(v)) + ".csv" : "trajectory.csv";
    std::ofstream csv(out_path(c, name));
    write_trajectory_csv(csv, tr);
    report[std::string(to_string(v))] = metrics_report(metrics);
    log << std::setw(8) << to_string(v) << "  MFD1 " << std::setprecision(6) << metrics.area[0].mfd_hz << " Hz  MFD2 "
        << metrics.area[1].mfd_hz << " Hz  SSFD1 " << metrics.area[0].ssfd_hz << " Hz  -> " << name << '\n';
  }
  save_json(out_path(c, "metrics.json"), report);
  return kOk;
}

int cmd_impact_sweep(const ExperimentConfig& c, std::ostream& log) {
  const auto& sw = c.sweep;
  const auto h = static_cast<Eigen::Index>(std::llround(c.vuln.horizon_s / c.model.ts));
  const int area = c.vuln.stealth.area;
  const double lim = c.vuln.stealth.mfd_lim_hz;
  Matrix table(sw.points, static_cast<Eigen::Index>(sw.variants.size()) + 1);
  std::vector<std::string> header{"magnitude"};
  json thresholds = json::object();
  for (int i = 0; i < sw.points; ++i) table(i, 0) = sw.max_magnitude * i / (sw.points - 1);
  for (std::size_t vi = 0; vi < sw.variants.size(); ++vi) {
    const auto v = sw.variants[vi];
    const auto m = build(c, v);
    require_stable(m);
    header.push_back("mfd_" + std::string(to_string(v)));
    for (int i = 0; i < sw.points; ++i) {
      AttackScenario s;
      s.entries.push_back({sw.channel, table(i, 0)});
      const auto tr = simulate(m, Matrix::Zero(h, 2), gen_attack_signal(s, h, m.channels));
      table(i, static_cast<Eigen::Index>(vi) + 1) = std::abs(series_impact(tr.freq_hz(area), tr.ts, 0, h).mfd_hz);
    }
    const auto th = min_disruptive_magnitude(m, sw.channel, lim, h, area);
    thresholds[std::string(to_string(v))] = th.reachable ? json(th.magnitude) : json(nullptr);
    log << std::setw(8) << to_string(v) << "  threshold for " << lim << " Hz: "
        << (th.reachable ? std::to_string(th.magnitude) + " p.u." : std::string("unreachable")) << '\n';
  }
  std::ofstream csv(out_path(c, "sweep.csv"));
  write_table(csv, header, table);
  save_json(out_path(c, "sweep.json"),
            {{"channel", std::string(to_string(sw.channel))}, {"mfd_lim_hz", lim}, {"thresholds", thresholds}});
  return kOk;
}

int cmd_attack_find(const ExperimentConfig& c, std::ostream& log) {
  const auto m = build(c, c.model.variant);
  require_stable(m);
  const auto r = find_disruptive_stealthy(m, stealth_of(c));
  save_json(out_path(c, "attack.json"), vuln_report(r, m.channels));
  log << "variant " << to_string(m.variant) << ", anchor " << to_string(c.vuln.stealth.anchor) << " = "
      << std::setprecision(6) << r.mu << '\n';
  if (!r.feasible()) {
    log << "no disruptive stealthy attack exists\n";
    return kInfeasible;
  }
  log << "alpha* = " << r.alpha_star << ", MFD " << r.mfd_hz << " Hz at t = " << r.k_star * c.model.ts << " s\n";
  for (Eigen::Index i = 0; i < m.n_channels(); ++i) {
    if (r.f_star(i) != 0.0) log << "  f[" << to_string(m.channels[static_cast<std::size_t>(i)]) << "] = " << r.f_star(i) << '\n';
  }
  log << "active:";
  for (const auto& a : r.active_rows) log << ' ' << a;
  log << '\n';
  if (r.stats.big_m_binding) log << "warning: attack still binds at big-M = " << r.stats.big_m << '\n';
  return kOk;
}

int cmd_detector_synth(const ExperimentConfig& c, std::ostream& log) {
  const auto m = build(c, c.model.variant);
  require_stable(m);
  for (auto ch : c.detect.channels) m.require_channel(ch);
  const auto dae = build_dae(m);
  for (auto ch : c.detect.channels) {
    log << std::setw(6) << to_string(ch) << "  detectable " << (check_detectable(dae, ch) ? "yes" : "no")
        << "  isolable " << (check_isolable(dae, ch, c.detect.channels) ? "yes" : "no") << '\n';
  }
  const auto bank = synth_bank(dae, c.detect.channels, c.detect.synth);
  const fs::path path = c.detect.bank_file.empty() ? out_path(c, "bank.json") : fs::path(c.detect.bank_file);
  save_json(path, bank_to_json(bank, m));
  for (const auto& g : bank.members) {
    log << "residual " << to_string(g.target) << ": gamma " << std::setprecision(6) << g.gamma << ", |N H| "
        << g.decoupling_error << (g.eta_binding ? ", eta active" : "") << '\n';
  }
  for (const auto& f : bank.failures) log << "failed: " << f << '\n';
  log << "wrote " << path.string() << '\n';
  return bank.complete() ? kOk : kInfeasible;
}

int cmd_detector_run(const ExperimentConfig& c, const RunOptions& o, std::ostream& log) {
  std::string bank_file = o.bank.empty() ? c.detect.bank_file : o.bank;
  if (bank_file.empty()) bank_file = (fs::path(c.out_dir) / "bank.json").string();
  const auto stored = bank_from_json(load_json(bank_file));
  const auto m = build(c, stored.variant);
  if (model_fingerprint(m) != stored.fingerprint) {
    throw InvalidArgument("bank '" + bank_file + "' was synthesized for a different model");
  }

  Matrix y;
  double ts = m.disc().ts;
  Eigen::Index onset = first_onset(c);
  const std::string traj = o.trajectory.empty() ? c.detect.trajectory : o.trajectory;
  if (!traj.empty()) {
    std::ifstream in(traj);
    if (!in) throw InvalidArgument("cannot open trajectory '" + traj + "'");
    y = read_corrupted_measurements(in, m.channels, ts);
    if (std::abs(ts - m.disc().ts) > 1e-9) throw InvalidArgument("trajectory sampling period differs from the bank");
  } else {
    require_stable(m);
    y = run_scenario(c, m).y_tilde;
  }

  const Matrix r = run_residual(stored.bank, y, m.channels);
  std::ofstream csv(out_path(c, "residuals.csv"));
  write_residual_csv(csv, ts, r);

  // Steady-state summary over the last 5 s.
  const auto tail = std::min<Eigen::Index>(y.rows(), static_cast<Eigen::Index>(std::llround(5.0 / ts)));
  json rep = json::array();
  for (std::size_t i = 0; i < stored.bank.members.size(); ++i) {
    const auto col = r.col(static_cast<Eigen::Index>(i));
    const double mean = col.tail(tail).mean();
    json e = {{"channel", std::string(to_string(stored.bank.channels[i]))}, {"tail_mean", mean}};
    const auto skip = std::max<Eigen::Index>(stored.bank.degree, 0);
    if (onset > skip + 1) e["alarm_threshold"] = alarm_threshold(col.head(onset), skip, c.detect.threshold_sigma);
    rep.push_back(e);
    log << "r_" << i + 1 << " (" << to_string(stored.bank.channels[i]) << "): last-5s mean " << std::setprecision(6)
        << mean << '\n';
  }
  save_json(out_path(c, "residual_report.json"), rep);
  return kOk;
}

}  // namespace acdc::cli
