#include "acdc/numerics/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LinearProgram::LinearProgram(Eigen::Index num_vars)
    : objective(Vector::Zero(num_vars)),
      eq_matrix(0, num_vars),
      eq_rhs(0),
      ineq_matrix(0, num_vars),
      ineq_lower(0),
      ineq_upper(0),
      lower(Vector::Zero(num_vars)),
      upper(Vector::Constant(num_vars, kInf)) {}

void LinearProgram::add_equality(const Vector& row, double rhs) {
  if (row.size() != num_vars()) throw InvalidArgument("add_equality: row length differs from variable count");
  eq_matrix.conservativeResize(eq_matrix.rows() + 1, num_vars());
  eq_matrix.row(eq_matrix.rows() - 1) = row.transpose();
  eq_rhs.conservativeResize(eq_rhs.size() + 1);
  eq_rhs(eq_rhs.size() - 1) = rhs;
}

void LinearProgram::add_range(const Vector& row, double lo, double hi) {
  if (row.size() != num_vars()) throw InvalidArgument("add_range: row length differs from variable count");
  ineq_matrix.conservativeResize(ineq_matrix.rows() + 1, num_vars());
  ineq_matrix.row(ineq_matrix.rows() - 1) = row.transpose();
  ineq_lower.conservativeResize(ineq_lower.size() + 1);
  ineq_upper.conservativeResize(ineq_upper.size() + 1);
  ineq_lower(ineq_lower.size() - 1) = lo;
  ineq_upper(ineq_upper.size() - 1) = hi;
}

void LinearProgram::set_bounds(Eigen::Index var, double lo, double hi) {
  if (var < 0 || var >= num_vars()) throw InvalidArgument("set_bounds: variable index out of range");
  lower(var) = lo;
  upper(var) = hi;
}

void LinearProgram::validate() const {
  const auto n = num_vars();
  if (n == 0) throw InvalidArgument("linear program has no variables");
  if (eq_matrix.cols() != n || ineq_matrix.cols() != n) {
    throw InvalidArgument("constraint matrix column count differs from variable count");
  }
  if (eq_rhs.size() != eq_matrix.rows()) throw InvalidArgument("equality rhs length mismatch");
  if (ineq_lower.size() != ineq_matrix.rows() || ineq_upper.size() != ineq_matrix.rows()) {
    throw InvalidArgument("inequality bound length mismatch");
  }
  if (lower.size() != n || upper.size() != n) throw InvalidArgument("variable bound length mismatch");
  if (!objective.allFinite() || !eq_matrix.allFinite() || !ineq_matrix.allFinite() || !eq_rhs.allFinite()) {
    throw InvalidArgument("linear program has non-finite coefficients");
  }
  for (Eigen::Index i = 0; i < ineq_lower.size(); ++i) {
    if (std::isnan(ineq_lower(i)) || std::isnan(ineq_upper(i)) || ineq_lower(i) > ineq_upper(i)) {
      throw InvalidArgument("inequality row " + std::to_string(i) + " has lower > upper");
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) || lower(j) == kInf ||
        upper(j) == -kInf) {
      throw InvalidArgument("variable " + std::to_string(j) + " has inconsistent bounds");
    }
  }
}

double max_violation(const LinearProgram& p, const Vector& x) {
  double v = 0.0;
  if (p.eq_matrix.rows() > 0) v = std::max(v, max_abs(p.eq_matrix * x - p.eq_rhs));
  if (p.ineq_matrix.rows() > 0) {
    const Vector ax = p.ineq_matrix * x;
    for (Eigen::Index i = 0; i < ax.size(); ++i) {
      v = std::max({v, p.ineq_lower(i) - ax(i), ax(i) - p.ineq_upper(i)});
    }
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    v = std::max({v, p.lower(j) - x(j), x(j) - p.upper(j)});
  }
  return v;
}

namespace {

// Standard form: min c's, A s = b, s >= 0, with x = offset + map * s.
struct StandardForm {
  Matrix a;
  Vector b;
  Vector c;
  Vector offset;
  Matrix map;
};

StandardForm to_standard_form(const LinearProgram& p) {
  const auto n = p.num_vars();
  const double sign = p.sense == Sense::kMaximize ? -1.0 : 1.0;

  // Column layout: one or two structural columns per variable, then slacks.
  std::vector<std::pair<Eigen::Index, double>> struct_cols;  // (var, coefficient)
  Vector offset = Vector::Zero(n);
  std::vector<std::pair<Eigen::Index, double>> upper_rows;  // (column, capacity)
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = p.lower(j);
    const double hi = p.upper(j);
    if (std::isfinite(lo)) {
      offset(j) = lo;
      struct_cols.emplace_back(j, 1.0);
      if (std::isfinite(hi)) upper_rows.emplace_back(static_cast<Eigen::Index>(struct_cols.size() - 1), hi - lo);
    } else if (std::isfinite(hi)) {
      offset(j) = hi;
      struct_cols.emplace_back(j, -1.0);
    } else {
      struct_cols.emplace_back(j, 1.0);
      struct_cols.emplace_back(j, -1.0);
    }
  }
  const auto ns = static_cast<Eigen::Index>(struct_cols.size());
  Matrix map = Matrix::Zero(n, ns);
  for (Eigen::Index k = 0; k < ns; ++k) map(struct_cols[k].first, k) = struct_cols[k].second;

  // Rows: (structural row, rhs, slack sign) where slack sign 0 means none.
  struct Row {
    Vector coeffs;
    double rhs;
    double slack;
  };
  std::vector<Row> rows;
  for (Eigen::Index i = 0; i < p.eq_matrix.rows(); ++i) {
    const Vector a = p.eq_matrix.row(i).transpose();
    rows.push_back({map.transpose() * a, p.eq_rhs(i) - a.dot(offset), 0.0});
  }
  for (Eigen::Index i = 0; i < p.ineq_matrix.rows(); ++i) {
    const Vector a = p.ineq_matrix.row(i).transpose();
    const Vector as = map.transpose() * a;
    const double shift = a.dot(offset);
    const double lo = p.ineq_lower(i);
    const double hi = p.ineq_upper(i);
    if (lo == hi) {
      rows.push_back({as, lo - shift, 0.0});
      continue;
    }
    if (std::isfinite(lo)) rows.push_back({as, lo - shift, -1.0});
    if (std::isfinite(hi)) rows.push_back({as, hi - shift, 1.0});
  }
  for (const auto& [col, cap] : upper_rows) {
    Vector e = Vector::Zero(ns);
    e(col) = 1.0;
    rows.push_back({e, cap, 1.0});
  }

  Eigen::Index slacks = 0;
  for (const auto& r : rows) slacks += r.slack != 0.0 ? 1 : 0;
  const auto m = static_cast<Eigen::Index>(rows.size());
  StandardForm sf;
  sf.a = Matrix::Zero(m, ns + slacks);
  sf.b = Vector::Zero(m);
  Eigen::Index next_slack = ns;
  for (Eigen::Index i = 0; i < m; ++i) {
    sf.a.row(i).head(ns) = rows[i].coeffs.transpose();
    if (rows[i].slack != 0.0) sf.a(i, next_slack++) = rows[i].slack;
    sf.b(i) = rows[i].rhs;
  }
  sf.c = Vector::Zero(ns + slacks);
  sf.c.head(ns) = sign * (map.transpose() * p.objective);
  sf.offset = offset;
  sf.map = Matrix::Zero(n, ns + slacks);
  sf.map.leftCols(ns) = map;
  return sf;
}

enum class PhaseOutcome { kOptimal, kUnbounded, kIterationLimit };

class Tableau {
 public:
  Tableau(const StandardForm& sf, const LpOptions& opts) : opts_(opts) {
    m_ = sf.a.rows();
    n_ = sf.a.cols();
    // Columns: structural [0, n), artificial [n, n+m), rhs last.
    t_ = Matrix::Zero(m_, n_ + m_ + 1);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double s = sf.b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = s * sf.a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = s * sf.b(i);
    }
    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    active_row_.assign(m_, true);
  }

  // Phase 1 minimizes the sum of artificials; returns the attained value.
  double phase_one(int& iterations, bool& used_bland) {
    Vector cost = Vector::Zero(n_ + m_);
    cost.tail(m_).setOnes();
    set_objective(cost);
    run(n_ + m_, iterations, used_bland);
    return -obj_(n_ + m_);
  }

  // Pivots artificials out of the basis, dropping rows that are redundant.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_row_[i] || basis_[i] < n_) continue;
      Eigen::Index best = -1;
      double best_abs = opts_.pivot_tol;
      for (Eigen::Index j = 0; j < n_; ++j) {
        const double v = std::abs(t_(i, j));
        if (v > best_abs) {
          best_abs = v;
          best = j;
        }
      }
      if (best >= 0) {
        pivot(i, best);
      } else {
        active_row_[i] = false;
      }
    }
  }

  PhaseOutcome phase_two(const Vector& c, int& iterations, bool& used_bland) {
    Vector cost = Vector::Zero(n_ + m_);
    cost.head(n_) = c;
    set_objective(cost);
    return run(n_, iterations, used_bland);
  }

  // Basic solution refined against the original system.
  Vector solution(const StandardForm& sf) const {
    Vector s = Vector::Zero(n_);
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_row_[i]) continue;
      if (basis_[i] < n_) {
        s(basis_[i]) = t_(i, n_ + m_);
        rows.push_back(i);
        cols.push_back(basis_[i]);
      }
    }
    if (!cols.empty()) {
      const auto k = static_cast<Eigen::Index>(cols.size());
      Matrix bmat(k, k);
      Vector rhs(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) bmat(r, c) = sf.a(rows[r], cols[c]);
        rhs(r) = sf.b(rows[r]);
      }
      Eigen::FullPivLU<Matrix> lu(bmat);
      if (lu.isInvertible()) {
        const Vector refined = lu.solve(rhs);
        // Keep the refinement only if it did not push a basic variable negative.
        if (refined.minCoeff() > -opts_.feasibility_tol) {
          for (Eigen::Index c = 0; c < k; ++c) s(cols[c]) = std::max(0.0, refined(c));
        }
      }
    }
    for (Eigen::Index j = 0; j < n_; ++j) s(j) = std::max(0.0, s(j));
    return s;
  }

 private:
  void set_objective(const Vector& cost) {
    cost_ = cost;
    obj_ = Vector::Zero(n_ + m_ + 1);
    obj_.head(n_ + m_) = cost;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!active_row_[i]) continue;
      const double cb = cost(basis_[i]);
      if (cb != 0.0) obj_ -= cb * t_.row(i).transpose();
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double pv = t_(r, c);
    t_.row(r) /= pv;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double fo = obj_(c);
    if (fo != 0.0) obj_ -= fo * t_.row(r).transpose();
    basis_[r] = c;
  }

  // Iterates until optimal over entering columns [0, limit).
  PhaseOutcome run(Eigen::Index limit, int& iterations, bool& used_bland) {
    bool bland = false;
    int stall = 0;
    double last = obj_(n_ + m_);
    const Eigen::Index rhs = n_ + m_;
    const double cscale = std::max(1.0, cost_.cwiseAbs().maxCoeff());
    while (true) {
      if (iterations >= opts_.max_iterations) return PhaseOutcome::kIterationLimit;
      Eigen::Index enter = -1;
      double most = -opts_.optimality_tol * cscale;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (obj_(j) < most) {
          enter = j;
          if (bland) break;
          most = obj_(j);
        }
      }
      if (enter < 0) return PhaseOutcome::kOptimal;

      Eigen::Index leave = -1;
      double best_ratio = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!active_row_[i]) continue;
        const double a = t_(i, enter);
        if (a <= opts_.pivot_tol) continue;
        const double ratio = t_(i, rhs) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return PhaseOutcome::kUnbounded;
      pivot(leave, enter);
      ++iterations;

      // The objective row holds -z, so progress shows as an increase.
      const double now = obj_(rhs);
      if (now > last + 1e-12 * std::max(1.0, std::abs(last))) {
        stall = 0;
      } else if (++stall >= opts_.stall_limit && !bland) {
        bland = true;
        used_bland = true;
      }
      last = now;
    }
  }

  LpOptions opts_;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  Matrix t_;
  Vector obj_;
  Vector cost_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> active_row_;
};

}  // namespace

LpResult lp_solve(const LinearProgram& p, const LpOptions& opts) {
  p.validate();
  const StandardForm sf = to_standard_form(p);
  LpResult result;

  if (sf.a.rows() == 0) {
    // Only nonnegativity: optimum at the origin unless some cost is negative.
    if ((sf.c.array() < -opts.optimality_tol).any()) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    result.status = LpStatus::kOptimal;
    result.x = sf.offset;
    result.objective = p.objective.dot(result.x);
    return result;
  }

  Tableau tab(sf, opts);
  const double bscale = std::max(1.0, sf.b.cwiseAbs().maxCoeff());
  const double infeas = tab.phase_one(result.iterations, result.used_bland);
  if (infeas > opts.feasibility_tol * bscale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  tab.expel_artificials();
  const auto outcome = tab.phase_two(sf.c, result.iterations, result.used_bland);
  if (outcome == PhaseOutcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  if (outcome == PhaseOutcome::kIterationLimit) {
    throw NumericalError("lp_solve: iteration limit reached");
  }
  const Vector s = tab.solution(sf);
  result.status = LpStatus::kOptimal;
  result.x = sf.offset + sf.map * s;
  result.objective = p.objective.dot(result.x);
  return result;
}

namespace {

struct BranchState {
  const MixedIntegerProgram* problem;
  const MilpOptions* opts;
  double sign;  // +1 minimize, -1 maximize (internal objective is sign * c'x)
  MilpResult best;
  bool have_incumbent = false;
  bool root_unbounded = false;
};

void branch(BranchState& st, LinearProgram& lp, int depth) {
  if (st.best.nodes >= st.opts->max_nodes) throw NumericalError("milp_solve: node limit reached");
  ++st.best.nodes;
  const LpResult r = lp_solve(lp, st.opts->lp);
  st.best.lp_iterations += r.iterations;
  if (r.status == LpStatus::kInfeasible) return;
  if (r.status == LpStatus::kUnbounded) {
    if (depth == 0) st.root_unbounded = true;
    return;
  }
  const double value = st.sign * r.objective;
  if (st.have_incumbent && value >= st.sign * st.best.objective - 1e-9 * std::max(1.0, std::abs(value))) {
    return;
  }
  for (const auto j : st.problem->binaries) {
    const double v = r.x(j);
    if (std::abs(v - std::round(v)) > st.opts->integrality_tol) {
      const double lo = lp.lower(j);
      const double hi = lp.upper(j);
      lp.set_bounds(j, 0.0, 0.0);
      branch(st, lp, depth + 1);
      lp.set_bounds(j, 1.0, 1.0);
      branch(st, lp, depth + 1);
      lp.set_bounds(j, lo, hi);
      return;
    }
  }
  Vector x = r.x;
  for (const auto j : st.problem->binaries) x(j) = std::round(x(j));
  st.best.x = x;
  st.best.objective = r.objective;
  st.best.status = LpStatus::kOptimal;
  st.have_incumbent = true;
}

}  // namespace

MilpResult milp_solve(const MixedIntegerProgram& p, const MilpOptions& opts) {
  p.base.validate();
  LinearProgram lp = p.base;
  for (const auto j : p.binaries) {
    if (j < 0 || j >= lp.num_vars()) throw InvalidArgument("milp_solve: binary index out of range");
    lp.set_bounds(j, std::max(0.0, lp.lower(j)), std::min(1.0, lp.upper(j)));
    if (lp.lower(j) > lp.upper(j)) throw InvalidArgument("milp_solve: binary variable has empty domain");
  }
  BranchState st{&p, &opts, p.base.sense == Sense::kMaximize ? -1.0 : 1.0, {}, false, false};
  branch(st, lp, 0);
  if (st.root_unbounded) {
    MilpResult r;
    r.status = LpStatus::kUnbounded;
    r.nodes = st.best.nodes;
    return r;
  }
  return st.best;
}

}  // namespace acdc
