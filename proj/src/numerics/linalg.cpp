#include "acdc/numerics/linalg.hpp"

#include <cmath>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix mat_exp(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw InvalidArgument("mat_exp: matrix is not square");
  if (m.rows() == 0) throw InvalidArgument("mat_exp: empty matrix");
  require_finite(m, "mat_exp");

  const auto n = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix x = m / std::ldexp(1.0, squarings);

  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  // ||x||_1 <= 1/2 bounds the tail by twice the last term, so 60 terms is far
  // more than double precision ever needs.
  for (int k = 1; k <= 60; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
    const double term_norm = term.cwiseAbs().maxCoeff();
    if (term_norm <= tol * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Discretization zoh_discretize(const Matrix& ac, const Matrix& bc, double ts) {
  if (ac.rows() != ac.cols()) throw InvalidArgument("zoh_discretize: A_c is not square");
  if (bc.rows() != ac.rows()) throw InvalidArgument("zoh_discretize: B_c row count differs from A_c");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw InvalidArgument("zoh_discretize: sampling period must be positive");
  require_finite(ac, "zoh_discretize");
  require_finite(bc, "zoh_discretize");

  const auto n = ac.rows();
  const auto m = bc.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = ac;
  aug.topRightCorner(n, m) = bc;
  const Matrix phi = mat_exp(aug * ts);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

Matrix steady_state_gain(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows()) {
    throw InvalidArgument("steady_state_gain: dimension mismatch");
  }
  const Matrix i_minus_a = Matrix::Identity(a.rows(), a.cols()) - a;
  Eigen::FullPivLU<Matrix> lu(i_minus_a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw MarginallyStableError("steady_state_gain: I - A is singular (model has an eigenvalue at 1)");
  }
  return c * lu.solve(b);
}

namespace {

template <typename M>
int rank_from_svd(const M& m, double tol) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw InvalidArgument("numeric_rank: non-finite entries");
  Eigen::JacobiSVD<M> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = tol * s(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

}  // namespace

int numeric_rank(const Matrix& m, double tol) { return rank_from_svd(m, tol); }

int numeric_rank(const ComplexMatrix& m, double tol) { return rank_from_svd(m, tol); }

Matrix left_nullspace(const Matrix& m, double tol) {
  require_finite(m, "left_nullspace");
  const auto rows = m.rows();
  if (rows == 0) return Matrix(0, 0);
  if (m.cols() == 0) return Matrix::Identity(rows, rows);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol * s(0)) ++rank;
    }
  }
  const auto nullity = rows - rank;
  return svd.matrixU().rightCols(nullity).transpose();
}

double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("spectral_radius: matrix is not square");
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigen decomposition failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace acdc
