#include "acdc/detect/residual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "acdc/detect/rank_tests.hpp"
#include "acdc/error.hpp"

namespace acdc {

namespace {

/// Coefficients of (q - p)^d in ascending powers.
Vector pole_polynomial(double p, int d) {
  Vector c = Vector::Zero(d + 1);
  c(0) = 1.0;
  for (int k = 0; k < d; ++k) {
    // multiply by (q - p)
    for (int i = k + 1; i > 0; --i) c(i) = c(i - 1) - p * c(i);
    c(0) *= -p;
  }
  return c;
}

std::string degree_hint(Channel target, int degree) {
  return "no exactly decoupled residual of degree " + std::to_string(degree) + " exists for channel '" +
         std::string(to_string(target)) + "'; try a larger degree";
}

// Singular values below this fraction of the largest count as zero. The
// columns of H̄ are equilibrated first, so exact null directions sit at
// roundoff level while inexact parity relations stay well above it.
constexpr double kNullTol = 1e-13;

Matrix decoupling_basis(const Matrix& hbar) {
  Matrix h = hbar;
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    const double n = h.col(c).norm();
    if (n > 0.0) h.col(c) /= n;
  }
  return left_nullspace(h, kNullTol);
}

// Residual family N̄ = n0 + phi' M, every member satisfying N̄ H̄ = 0 and
// the recovery normalization sum_i N_i F_j = -1.
struct Family {
  Matrix z;        // nullspace basis rows
  Matrix pj;       // column i: Z_i F_j
  Vector theta0;   // particular solution
  Matrix q;        // complement basis, theta = theta0 + q phi
  Eigen::RowVectorXd n0;
  Matrix m;        // q' z
};

Family residual_family(const DaeSystem& d, Channel target, int degree, const Matrix& hbar) {
  const Eigen::Index j = d.attack_column(target);
  Family f;
  f.z = decoupling_basis(hbar);
  if (f.z.rows() == 0) throw DegreeTooLowError(degree_hint(target, degree));

  const Eigen::Index nr = d.rows();
  const Vector fj = d.f.col(j) * internal_per_physical(target);
  f.pj.resize(f.z.rows(), degree + 1);
  for (Eigen::Index i = 0; i <= degree; ++i) f.pj.col(i) = f.z.middleCols(i * nr, nr) * fj;
  const Vector total = f.pj.rowwise().sum();
  if (total.norm() <= 1e-10 * fj.norm()) {
    throw DegreeTooLowError("every decoupled residual of degree " + std::to_string(degree) +
                            " has zero steady-state gain to channel '" + std::string(to_string(target)) +
                            "'; a constant attack on it cannot be recovered");
  }
  const double t2 = total.squaredNorm();
  f.theta0 = -total / t2;
  Eigen::HouseholderQR<Matrix> qr(total);
  f.q = Matrix(qr.householderQ()).rightCols(f.z.rows() - 1);
  f.n0 = f.theta0.transpose() * f.z;
  f.m = f.q.transpose() * f.z;
  return f;
}

// Adds |n0 + phi' M| <= t (t a variable at index `t`, or the constant eta
// when t < 0) to lp, whose first columns are phi.
void add_box(LinearProgram& lp, const Family& f, Eigen::Index t, double eta) {
  const Eigen::Index np = f.m.rows();
  for (Eigen::Index e = 0; e < f.m.cols(); ++e) {
    Vector row = Vector::Zero(lp.num_vars());
    row.head(np) = f.m.col(e);
    if (t < 0) {
      lp.add_range(row, -eta - f.n0(e), eta - f.n0(e));
    } else {
      row(t) = -1.0;
      lp.add_range(row, -kInf, -f.n0(e));
      row(t) = 1.0;
      lp.add_range(row, -f.n0(e), kInf);
    }
  }
}

double family_min_eta(const Family& f, const LpOptions& opts) {
  const Eigen::Index np = f.m.rows();
  if (np == 0) return f.n0.cwiseAbs().maxCoeff();
  LinearProgram lp(np + 1);
  for (Eigen::Index v = 0; v < np; ++v) lp.set_bounds(v, -kInf, kInf);
  lp.objective(np) = 1.0;
  add_box(lp, f, np, 0.0);
  const auto r = lp_solve(lp, opts);
  if (r.status != LpStatus::kOptimal) throw NumericalError("synth_residual: minimum-eta LP failed");
  return r.objective;
}

}  // namespace

std::optional<double> min_feasible_eta(const DaeSystem& d, Channel target, int degree, const LpOptions& lp) {
  if (degree < 1) throw InvalidArgument("min_feasible_eta: degree must be >= 1");
  const Toeplitz t = stack_toeplitz(d, degree);
  try {
    return family_min_eta(residual_family(d, target, degree, t.h), lp);
  } catch (const DegreeTooLowError&) {
    return std::nullopt;
  }
}

ResidualGenerator synth_residual(const DaeSystem& d, Channel target, const SynthOptions& o) {
  if (o.degree < 1) throw InvalidArgument("synth_residual: degree must be >= 1");
  if (!(std::abs(o.pole) < 1.0)) throw InvalidArgument("synth_residual: pole must satisfy |p| < 1");
  if (!(o.eta > 0.0)) throw InvalidArgument("synth_residual: eta must be > 0");

  const Eigen::Index nr = d.rows();
  const Eigen::Index blocks = o.degree + 1;
  const Toeplitz t = stack_toeplitz(d, o.degree);
  const Family fam = residual_family(d, target, o.degree, t.h);
  const double eta_min = family_min_eta(fam, o.lp);
  if (eta_min > o.eta) {
    std::ostringstream msg;
    msg << "recovering channel '" << to_string(target) << "' at degree " << o.degree << " needs eta >= " << eta_min
        << " (eta = " << o.eta << "); raise eta or the degree";
    throw DegreeTooLowError(msg.str());
  }

  const Eigen::Index np = fam.m.rows();
  LinearProgram base(np);
  for (Eigen::Index v = 0; v < np; ++v) base.set_bounds(v, -kInf, kInf);
  add_box(base, fam, -1, o.eta);

  // Largest attainable |N_i F_j| over all taps and both signs.
  double gamma = -kInf;
  Eigen::Index best_i = 0;
  int best_sign = 1;
  for (Eigen::Index i = 0; i < blocks; ++i) {
    const double c0 = fam.theta0.dot(fam.pj.col(i));
    const Vector c = fam.q.transpose() * fam.pj.col(i);
    for (int sign : {1, -1}) {
      double value = sign * c0;
      if (np > 0) {
        LinearProgram lp = base;
        lp.sense = Sense::kMaximize;
        lp.objective = sign * c;
        const auto r = lp_solve(lp, o.lp);
        if (r.status != LpStatus::kOptimal) throw NumericalError("synth_residual: sensitivity LP failed");
        value += r.objective;
      }
      if (value > gamma + 1e-12 * std::max(1.0, std::abs(gamma))) {
        gamma = value;
        best_i = i;
        best_sign = sign;
      }
    }
  }

  // Among the maximizers keep the smallest ||N̄||_1.
  Vector phi = Vector::Zero(np);
  if (np > 0) {
    const Eigen::Index ne = fam.m.cols();
    LinearProgram tie(np + ne);
    for (Eigen::Index v = 0; v < np; ++v) tie.set_bounds(v, -kInf, kInf);
    for (Eigen::Index e = 0; e < ne; ++e) {
      const Eigen::Index s = np + e;
      tie.set_bounds(s, 0.0, o.eta);
      tie.objective(s) = 1.0;
      Vector row = Vector::Zero(np + ne);
      row.head(np) = fam.m.col(e);
      row(s) = -1.0;
      tie.add_range(row, -kInf, -fam.n0(e));
      row(s) = 1.0;
      tie.add_range(row, -fam.n0(e), kInf);
    }
    Vector sens = Vector::Zero(np + ne);
    sens.head(np) = best_sign * (fam.q.transpose() * fam.pj.col(best_i));
    const double c0 = best_sign * fam.theta0.dot(fam.pj.col(best_i));
    tie.add_range(sens, gamma - c0 - 1e-9 * std::max(1.0, std::abs(gamma)), kInf);
    const auto tr = lp_solve(tie, o.lp);
    if (tr.status != LpStatus::kOptimal) throw NumericalError("synth_residual: tie-break LP failed");
    phi = tr.x.head(np);
  }

  const Vector theta = fam.theta0 + fam.q * phi;
  const Eigen::RowVectorXd nbar = theta.transpose() * fam.z;

  ResidualGenerator g;
  g.target = target;
  g.degree = o.degree;
  g.pole = o.pole;
  g.eta = o.eta;
  g.eta_min = eta_min;
  g.measured = d.measured;
  g.decoupled = d.absorbed;
  g.n.resize(blocks, nr);
  for (Eigen::Index i = 0; i < blocks; ++i) g.n.row(i) = nbar.segment(i * nr, nr);
  const Vector fj = d.f.col(d.attack_column(target)) * internal_per_physical(target);
  g.gamma = (g.n * fj).cwiseAbs().maxCoeff();
  g.decoupling_error = (nbar * t.h).cwiseAbs().maxCoeff();
  g.eta_binding = nbar.cwiseAbs().maxCoeff() >= o.eta * (1.0 - 1e-9);

  const double gain = std::pow(1.0 - o.pole, o.degree);
  g.numerator = gain * (g.n * d.l);
  g.denominator = pole_polynomial(o.pole, o.degree);
  return g;
}

DetectorBank synth_bank(const DaeSystem& d, const std::vector<Channel>& channels, const SynthOptions& o) {
  DetectorBank b;
  b.degree = o.degree;
  b.pole = o.pole;
  b.eta = o.eta;
  for (auto j : channels) {
    const std::string name(to_string(j));
    if (!check_isolable(d, j, channels)) {
      b.failures.push_back(name + ": not isolable from the other bank channels");
      continue;
    }
    std::vector<Channel> others;
    std::copy_if(channels.begin(), channels.end(), std::back_inserter(others), [j](Channel c) { return c != j; });
    try {
      b.members.push_back(synth_residual(absorb_attacks(d, others), j, o));
      b.channels.push_back(j);
    } catch (const DegreeTooLowError& e) {
      b.failures.push_back(name + ": " + e.what());
    }
  }
  return b;
}

ResidualFilter::ResidualFilter(const ResidualGenerator& g) : num_(g.numerator), den_(g.denominator) {
  if (den_.size() != num_.rows() || den_.size() < 2) throw InvalidArgument("ResidualFilter: malformed generator");
  reset();
}

void ResidualFilter::reset() {
  y_hist_ = Matrix::Zero(num_.rows(), num_.cols());
  r_hist_ = Vector::Zero(den_.size() - 1);
}

double ResidualFilter::step(const Vector& y) {
  if (y.size() != num_.cols()) throw InvalidArgument("ResidualFilter: measurement length mismatch");
  const Eigen::Index d = den_.size() - 1;
  for (Eigen::Index i = 0; i < d; ++i) y_hist_.row(i) = y_hist_.row(i + 1);
  y_hist_.row(d) = y.transpose();
  // sum_m c_m r[k-d+m] = sum_i b_i y[k-d+i], with c_d = 1
  double r = (num_.cwiseProduct(y_hist_)).sum() - den_.head(d).dot(r_hist_);
  for (Eigen::Index i = 0; i + 1 < d; ++i) r_hist_(i) = r_hist_(i + 1);
  r_hist_(d - 1) = r;
  return r;
}

namespace {

void check_stream(const std::vector<Channel>& expected, std::span<const Channel> stream, Eigen::Index cols) {
  if (cols != static_cast<Eigen::Index>(expected.size())) {
    throw InvalidArgument("run_residual: stream has " + std::to_string(cols) + " channels, generator expects " +
                          std::to_string(expected.size()));
  }
  if (!stream.empty() && !std::equal(stream.begin(), stream.end(), expected.begin(), expected.end())) {
    throw InvalidArgument("run_residual: channel order differs from the synthesis order");
  }
}

}  // namespace

Vector run_residual(const ResidualGenerator& g, const Matrix& y, std::span<const Channel> stream) {
  check_stream(g.measured, stream, y.cols());
  ResidualFilter f(g);
  Vector r(y.rows());
  for (Eigen::Index k = 0; k < y.rows(); ++k) r(k) = f.step(y.row(k).transpose());
  return r;
}

Matrix run_residual(const DetectorBank& b, const Matrix& y, std::span<const Channel> stream) {
  Matrix r(y.rows(), static_cast<Eigen::Index>(b.members.size()));
  for (std::size_t i = 0; i < b.members.size(); ++i) r.col(static_cast<Eigen::Index>(i)) = run_residual(b.members[i], y, stream);
  return r;
}

std::optional<double> settling_time(const Vector& r, double ts, Eigen::Index onset, double target, double band) {
  if (onset < 0 || onset >= r.size()) throw InvalidArgument("settling_time: onset out of range");
  const double tol = band * std::abs(target);
  Eigen::Index last_out = onset - 1;
  for (Eigen::Index k = onset; k < r.size(); ++k) {
    if (std::abs(r(k) - target) > tol) last_out = k;
  }
  if (last_out == r.size() - 1) return std::nullopt;
  return static_cast<double>(last_out + 1 - onset) * ts;
}

double alarm_threshold(const Vector& r, Eigen::Index skip, double k) {
  if (skip < 0 || skip >= r.size()) throw InvalidArgument("alarm_threshold: nothing left after skip");
  const Vector tail = r.tail(r.size() - skip);
  const double mean = tail.mean();
  const double var = (tail.array() - mean).square().sum() / static_cast<double>(std::max<Eigen::Index>(1, tail.size() - 1));
  return std::abs(mean) + k * std::sqrt(var);
}

}  // namespace acdc
