#include "acdc/vuln/stealth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "acdc/error.hpp"
#include "acdc/sim/metrics.hpp"

namespace acdc {

void StealthSpec::validate() const {
  if (!(dw_min_hz < dw_max_hz)) throw InvalidArgument("stealth spec: dw_min must be < dw_max");
  if (!(ace_max > 0.0)) throw InvalidArgument("stealth spec: ACE_max must be > 0");
  if (!(pdc_ref_max > 0.0)) throw InvalidArgument("stealth spec: PDC_ref_max must be > 0");
  // A zero limit is allowed: disruptiveness is then vacuous.
  if (!(mfd_lim_hz >= 0.0)) throw InvalidArgument("stealth spec: MFD_lim must be >= 0");
  if (std::find(protected_set.begin(), protected_set.end(), anchor) != protected_set.end()) {
    throw InvalidArgument("stealth spec: anchor channel is in the protected set");
  }
  if (mu && !std::isfinite(*mu)) throw InvalidArgument("stealth spec: anchor value must be finite");
  if (horizon < 1) throw InvalidArgument("stealth spec: horizon must be >= 1");
  if (stride < 1) throw InvalidArgument("stealth spec: stride must be >= 1");
  if (!(big_m > 0.0)) throw InvalidArgument("stealth spec: big-M must be > 0");
  if (area != 1 && area != 2) throw InvalidArgument("stealth spec: area must be 1 or 2");
}

double StealthSet::violation(const Vector& f_phys) const {
  const Vector v = f * f_phys;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    worst = std::max({worst, b_min(r) - v(r), v(r) - b_max(r)});
  }
  return worst;
}

namespace {

/// V_k = (sum_{j<k} A^j) B_f, scaled to physical input units.
std::vector<Matrix> step_state_responses(const LtiModel& m, Eigen::Index horizon) {
  const auto& dp = m.disc();
  Matrix bf = dp.bf;
  for (Eigen::Index c = 0; c < m.n_channels(); ++c) bf.col(c) *= internal_per_physical(m.channels[c]);
  std::vector<Matrix> v;
  v.reserve(static_cast<std::size_t>(horizon));
  v.push_back(Matrix::Zero(m.n_states(), m.n_channels()));
  for (Eigen::Index k = 1; k < horizon; ++k) v.push_back(dp.a * v.back() + bf);
  return v;
}

/// Bias rows on the controller-side signals, physical units.
void bias_rows(const LtiModel& m, const StealthSpec& spec, Matrix& w, Vector& lo, Vector& hi,
               std::vector<std::string>& names) {
  const auto ny = m.n_channels();
  const auto& p = m.params;
  std::vector<Vector> rows;
  auto unit = [&](Channel c) {
    Vector e = Vector::Zero(ny);
    if (auto i = m.channel_index(c)) e(*i) = 1.0;
    return e;
  };
  std::vector<double> l;
  std::vector<double> h;
  for (auto c : m.channels) {
    if (!is_frequency(c)) continue;
    rows.push_back(unit(c));
    l.push_back(spec.dw_min_hz);
    h.push_back(spec.dw_max_hz);
    names.push_back(std::string(to_string(c)));
  }
  const Vector flow = unit(Channel::kAcFlow12) + unit(Channel::kDcFlow12);
  rows.push_back(p.area[0].beta * unit(Channel::kFreq1) + flow);
  rows.push_back(p.area[1].beta * unit(Channel::kFreq2) - flow);
  names.emplace_back("ace1");
  names.emplace_back("ace2");
  for (int i = 0; i < 2; ++i) {
    l.push_back(-spec.ace_max);
    h.push_back(spec.ace_max);
  }
  Vector dc = Vector::Zero(ny);
  if (m.channel_index(Channel::kDcFlow12)) {
    dc = kTwoPi * (p.k1 * unit(Channel::kFreq1) + p.k2 * unit(Channel::kFreq2)) + p.k_ac * unit(Channel::kAcFlow12);
  }
  rows.push_back(dc);
  l.push_back(-spec.pdc_ref_max);
  h.push_back(spec.pdc_ref_max);
  names.emplace_back("pdc_ref");

  w.resize(static_cast<Eigen::Index>(rows.size()), ny);
  for (std::size_t r = 0; r < rows.size(); ++r) w.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  lo = Eigen::Map<Vector>(l.data(), static_cast<Eigen::Index>(l.size()));
  hi = Eigen::Map<Vector>(h.data(), static_cast<Eigen::Index>(h.size()));
}

}  // namespace

Matrix step_response_coeffs(const LtiModel& m, int area, Eigen::Index horizon) {
  if (horizon < 1) throw InvalidArgument("step_response_coeffs: horizon must be >= 1");
  if (area != 1 && area != 2) throw InvalidArgument("step_response_coeffs: area must be 1 or 2");
  const auto v = step_state_responses(m, horizon);
  Matrix g(horizon, m.n_channels());
  const Eigen::Index row = area - 1;  // Δω_1, Δω_2 lead the state vector
  for (Eigen::Index k = 0; k < horizon; ++k) g.row(k) = v[static_cast<std::size_t>(k)].row(row) / kTwoPi;
  return g;
}

StealthSet build_stealth_set(const LtiModel& m, const StealthSpec& spec) {
  spec.validate();
  m.require_channel(spec.anchor);
  for (auto c : spec.protected_set) m.require_channel(c);

  StealthSet s;
  s.channels = m.channels;
  Matrix w;
  Vector lo;
  Vector hi;
  std::vector<std::string> names;
  bias_rows(m, spec, w, lo, hi, names);

  for (Eigen::Index k = 0; k < spec.horizon; k += spec.stride) s.grid.push_back(k);
  const Matrix g_all = step_response_coeffs(m, spec.area, spec.horizon);
  s.g.resize(static_cast<Eigen::Index>(s.grid.size()), m.n_channels());
  for (std::size_t i = 0; i < s.grid.size(); ++i) s.g.row(static_cast<Eigen::Index>(i)) = g_all.row(s.grid[i]);

  if (spec.mode == StealthMode::kBias) {
    s.f = w;
    s.b_min = lo;
    s.b_max = hi;
    s.row_names = names;
    return s;
  }

  // Corrupted measurement at k, physical units: (D^-1 C V_k + I) f.
  const auto v = step_state_responses(m, spec.horizon);
  const auto nb = w.rows();
  const auto ng = static_cast<Eigen::Index>(s.grid.size());
  s.f.resize(nb * ng, m.n_channels());
  s.b_min.resize(nb * ng);
  s.b_max.resize(nb * ng);
  Vector inv_unit(m.n_channels());
  for (Eigen::Index c = 0; c < m.n_channels(); ++c) inv_unit(c) = 1.0 / internal_per_physical(m.channels[c]);
  for (Eigen::Index i = 0; i < ng; ++i) {
    const Eigen::Index k = s.grid[static_cast<std::size_t>(i)];
    const Matrix resp =
        inv_unit.asDiagonal() * (m.c * v[static_cast<std::size_t>(k)]) + Matrix::Identity(m.n_channels(), m.n_channels());
    s.f.middleRows(i * nb, nb) = w * resp;
    s.b_min.segment(i * nb, nb) = lo;
    s.b_max.segment(i * nb, nb) = hi;
    for (const auto& n : names) s.row_names.push_back(n + "@" + std::to_string(k));
  }
  return s;
}

namespace {

constexpr double kBindTol = 1e-7;
constexpr double kTieTol = 1e-9;
constexpr double kActiveTol = 1e-6;

double resolve_mu(const LtiModel& m, const StealthSpec& spec) {
  if (spec.mu) return *spec.mu;
  const auto th = min_disruptive_magnitude(m, spec.anchor, spec.mfd_lim_hz > 0.0 ? spec.mfd_lim_hz : 1.0,
                                           spec.horizon, spec.area);
  if (!th.reachable) throw InvalidArgument("anchor channel has no effect on the monitored frequency");
  return th.magnitude;
}

/// Shared attack-vector bounds: box, anchor, protected set.
void attack_bounds(LinearProgram& lp, const LtiModel& m, const StealthSpec& spec, double mu, double big_m) {
  for (Eigen::Index c = 0; c < m.n_channels(); ++c) lp.set_bounds(c, -big_m, big_m);
  for (auto c : spec.protected_set) lp.set_bounds(*m.channel_index(c), 0.0, 0.0);
  lp.set_bounds(*m.channel_index(spec.anchor), mu, mu);
}

void add_stealth_rows(LinearProgram& lp, const StealthSet& s, Eigen::Index n_total) {
  const auto ny = s.f.cols();
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    Vector row = Vector::Zero(n_total);
    row.head(ny) = s.f.row(r).transpose();
    lp.add_range(row, s.b_min(r), s.b_max(r));
  }
}

void add_disruptive_row(LinearProgram& lp, const StealthSet& s, Eigen::Index grid_index, int sign, double lim,
                        Eigen::Index n_total) {
  Vector row = Vector::Zero(n_total);
  row.head(s.g.cols()) = sign * s.g.row(grid_index).transpose();
  lp.add_range(row, lim, kInf);
}

/// Abs-value epigraph rows t_c >= |f_c| with t at offset `t0`.
void add_abs_rows(LinearProgram& lp, Eigen::Index ny, Eigen::Index t0, Eigen::Index n_total, double big_m) {
  for (Eigen::Index c = 0; c < ny; ++c) {
    Vector r1 = Vector::Zero(n_total);
    r1(t0 + c) = 1.0;
    r1(c) = -1.0;
    lp.add_range(r1, 0.0, kInf);
    Vector r2 = Vector::Zero(n_total);
    r2(t0 + c) = 1.0;
    r2(c) = 1.0;
    lp.add_range(r2, 0.0, kInf);
    lp.set_bounds(t0 + c, 0.0, big_m);
  }
}

struct Candidate {
  int alpha = kNoAttack;
  double l1 = kInf;
  Vector f;
  Eigen::Index k = -1;
  int sign = 0;

  bool improves(int a, double norm) const { return a < alpha || (a == alpha && norm < l1 - kTieTol); }
};

void finish(VulnResult& out, const Candidate& best, const StealthSet& s, double mu) {
  out.mu = mu;
  out.alpha_star = best.alpha;
  if (best.alpha == kNoAttack) {
    out.f_star = Vector::Zero(static_cast<Eigen::Index>(s.channels.size()));
    return;
  }
  out.f_star = best.f;
  out.sign = best.sign;
  const auto gi = static_cast<std::size_t>(
      std::find(s.grid.begin(), s.grid.end(), best.k) - s.grid.begin());
  out.k_star = best.k;
  out.mfd_hz = s.g.row(static_cast<Eigen::Index>(gi)).dot(best.f);
  const Vector v = s.f * best.f;
  for (Eigen::Index r = 0; r < v.size(); ++r) {
    if (std::abs(v(r) - s.b_max(r)) <= kActiveTol || std::abs(v(r) - s.b_min(r)) <= kActiveTol) {
      out.active_rows.push_back(s.row_names[static_cast<std::size_t>(r)]);
    }
  }
}

int count_support(const Vector& f, double tol) {
  return static_cast<int>((f.array().abs() > tol).count());
}

Candidate solve_milp_grid(const LtiModel& m, const StealthSpec& spec, const StealthSet& s, double mu,
                          double big_m, const MilpOptions& opts, VulnStats& stats) {
  const Eigen::Index ny = m.n_channels();
  const Eigen::Index n_total = 3 * ny;  // f, z, t
  MixedIntegerProgram base;
  base.base = LinearProgram(n_total);
  auto& lp = base.base;
  attack_bounds(lp, m, spec, mu, big_m);
  const double w = 1.0 / (static_cast<double>(ny) * big_m + 1.0);
  for (Eigen::Index c = 0; c < ny; ++c) {
    const Eigen::Index z = ny + c;
    lp.set_bounds(z, 0.0, 1.0);
    lp.objective(z) = 1.0;
    lp.objective(2 * ny + c) = w;
    base.binaries.push_back(z);
    Vector up = Vector::Zero(n_total);
    up(c) = 1.0;
    up(z) = -big_m;
    lp.add_range(up, -kInf, 0.0);
    Vector dn = Vector::Zero(n_total);
    dn(c) = 1.0;
    dn(z) = big_m;
    lp.add_range(dn, 0.0, kInf);
  }
  add_abs_rows(lp, ny, 2 * ny, n_total, big_m);
  add_stealth_rows(lp, s, n_total);

  Candidate best;
  for (std::size_t gi = 0; gi < s.grid.size(); ++gi) {
    for (int sign : {1, -1}) {
      MixedIntegerProgram sub = base;
      add_disruptive_row(sub.base, s, static_cast<Eigen::Index>(gi), sign, spec.mfd_lim_hz, n_total);
      const auto r = milp_solve(sub, opts);
      ++stats.subproblems;
      stats.nodes += static_cast<std::size_t>(r.nodes);
      stats.lp_iterations += static_cast<std::size_t>(r.lp_iterations);
      if (r.status != LpStatus::kOptimal) continue;
      const int alpha = static_cast<int>(std::lround(r.x.segment(ny, ny).sum()));
      const Vector f = r.x.head(ny);
      const double l1 = f.lpNorm<1>();
      if (best.improves(alpha, l1)) best = {alpha, l1, f, s.grid[gi], sign};
    }
  }
  return best;
}

}  // namespace

VulnResult find_disruptive_stealthy(const LtiModel& m, const StealthSpec& spec, const MilpOptions& opts) {
  const StealthSet s = build_stealth_set(m, spec);
  const double mu = resolve_mu(m, spec);
  VulnResult out;
  double big_m = spec.big_m;
  if (std::abs(mu) > big_m) throw InvalidArgument("anchor value exceeds the big-M bound");

  Candidate best = solve_milp_grid(m, spec, s, mu, big_m, opts, out.stats);
  auto binds = [&](const Candidate& c) {
    return c.alpha != kNoAttack && (c.f.array().abs() >= big_m - kBindTol).any();
  };
  if (binds(best)) {
    big_m *= 10.0;
    out.stats.big_m_increased = true;
    best = solve_milp_grid(m, spec, s, mu, big_m, opts, out.stats);
    out.stats.big_m_binding = binds(best);
  }
  out.stats.big_m = big_m;
  finish(out, best, s, mu);
  // The cardinality reported is the support of the attack vector itself.
  if (out.feasible()) out.alpha_star = std::min(out.alpha_star, count_support(out.f_star, 1e-9));
  return out;
}

VulnResult enumerate_oracle(const LtiModel& m, const StealthSpec& spec, const LpOptions& opts) {
  const Eigen::Index ny = m.n_channels();
  if (ny > 8) throw InvalidArgument("enumerate_oracle: at most 8 channels supported");
  const StealthSet s = build_stealth_set(m, spec);
  const double mu = resolve_mu(m, spec);
  if (std::abs(mu) > spec.big_m) throw InvalidArgument("anchor value exceeds the big-M bound");
  const Eigen::Index anchor = *m.channel_index(spec.anchor);
  unsigned forbidden = 0;
  for (auto c : spec.protected_set) forbidden |= 1U << *m.channel_index(c);

  const Eigen::Index n_total = 2 * ny;  // f, t
  VulnResult out;
  out.stats.big_m = spec.big_m;
  Candidate best;
  for (int card = 0; card <= ny && best.alpha == kNoAttack; ++card) {
    for (unsigned mask = 0; mask < (1U << ny); ++mask) {
      if (std::popcount(mask) != card || (mask & forbidden) != 0) continue;
      // The anchor is pinned to mu, so it belongs to the support unless mu = 0.
      if (mu != 0.0 && !(mask & (1U << anchor))) continue;
      LinearProgram lp(n_total);
      attack_bounds(lp, m, spec, mu, spec.big_m);
      for (Eigen::Index c = 0; c < ny; ++c) {
        if (!(mask & (1U << c))) lp.set_bounds(c, 0.0, 0.0);
        lp.objective(ny + c) = 1.0;
      }
      add_abs_rows(lp, ny, ny, n_total, spec.big_m);
      add_stealth_rows(lp, s, n_total);
      for (std::size_t gi = 0; gi < s.grid.size(); ++gi) {
        for (int sign : {1, -1}) {
          LinearProgram sub = lp;
          add_disruptive_row(sub, s, static_cast<Eigen::Index>(gi), sign, spec.mfd_lim_hz, n_total);
          const auto r = lp_solve(sub, opts);
          ++out.stats.subproblems;
          out.stats.lp_iterations += static_cast<std::size_t>(r.iterations);
          if (r.status != LpStatus::kOptimal) continue;
          const Vector f = r.x.head(ny);
          if (best.improves(card, f.lpNorm<1>())) best = {card, f.lpNorm<1>(), f, s.grid[gi], sign};
        }
      }
    }
  }
  finish(out, best, s, mu);
  return out;
}

}  // namespace acdc
