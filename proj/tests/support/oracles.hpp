#pragma once

// Independent reference computations used by the tests. None of these call
// the library routine they are meant to check.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <utility>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Random Hurwitz pair (Ac, Bc): a Gaussian matrix shifted so its rightmost
/// eigenvalue sits at -margin, scaled to a spectral abscissa around 1..25/s.
inline std::pair<Matrix, Matrix> random_stable_system(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 5.0);
  std::uniform_real_distribution<double> margin(0.05, 1.0);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  a *= scale(rng);
  Eigen::EigenSolver<Matrix> es(a, false);
  const double shift = es.eigenvalues().real().maxCoeff() + margin(rng);
  a -= shift * Matrix::Identity(n, n);
  Matrix b(n, m);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  return {a, b};
}

struct Zoh {
  Matrix a;
  Matrix b;
};

/// Exact solution of x' = Ac x + Bc u over ts with u held constant, built by
/// composing `substeps` fourth-order Taylor steps of the augmented system.
inline Zoh substep_zoh(const Matrix& ac, const Matrix& bc, double ts, int substeps) {
  const Eigen::Index n = ac.rows();
  const Eigen::Index m = bc.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = ac;
  aug.topRightCorner(n, m) = bc;
  const Matrix h = aug * (ts / substeps);
  const Matrix eye = Matrix::Identity(n + m, n + m);
  const Matrix h2 = h * h;
  const Matrix step = eye + h + h2 / 2.0 + h2 * h / 6.0 + h2 * h2 / 24.0;
  Matrix total = eye;
  for (int k = 0; k < substeps; ++k) total = step * total;
  return {total.topLeftCorner(n, n), total.topRightCorner(n, m)};
}

/// max c'x over {A x <= b, |x_i| <= box} in two variables by enumerating
/// every pairwise intersection of constraint lines. Empty when infeasible.
inline std::optional<double> lp2_by_vertices(const Matrix& a, const Vector& b, const Eigen::Vector2d& c,
                                             double box) {
  const Eigen::Index m = a.rows();
  Matrix rows(m + 4, 2);
  Vector rhs(m + 4);
  rows.topRows(m) = a;
  rhs.head(m) = b;
  rows.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
  rhs.tail(4).setConstant(box);
  std::optional<double> best;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      Eigen::Matrix2d s;
      s << rows.row(i), rows.row(j);
      if (std::abs(s.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = s.inverse() * Eigen::Vector2d(rhs(i), rhs(j));
      if (((rows * x - rhs).array() > 1e-9).any()) continue;
      const double v = c.dot(x);
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

/// Coefficients of the product of two matrix polynomials given as
/// horizontally stacked blocks [P_0 .. P_p] (rows x cols each).
inline Matrix poly_multiply(const Matrix& p, Eigen::Index p_cols, const Matrix& q, Eigen::Index q_cols) {
  const Eigen::Index np = p.cols() / p_cols;
  const Eigen::Index nq = q.cols() / q_cols;
  Matrix out = Matrix::Zero(p.rows(), (np + nq - 1) * q_cols);
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < nq; ++j) {
      out.middleCols((i + j) * q_cols, q_cols) +=
          p.middleCols(i * p_cols, p_cols) * q.block(0, j * q_cols, p_cols, q_cols);
    }
  }
  return out;
}

/// Plain state recursion x+ = A x + B u from rest; rows of u are samples.
inline Matrix recurse(const Matrix& a, const Matrix& b, const Matrix& u) {
  Matrix x = Matrix::Zero(u.rows(), a.rows());
  Vector s = Vector::Zero(a.rows());
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    x.row(k) = s.transpose();
    s = a * s + b * u.row(k).transpose();
  }
  return x;
}

}  // namespace oracle
