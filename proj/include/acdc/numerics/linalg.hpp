#pragma once

#include <Eigen/Dense>

namespace acdc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultRankTol = 1e-9;

/// Throws InvalidArgument unless every entry of `m` is finite.
void require_finite(const Matrix& m, const char* what);

/// e^M by scaling and squaring around a truncated Taylor kernel.
///
/// The argument is scaled by 2^-s until its 1-norm is at most 1/2; the series
/// is summed until the next term drops below `tol` relative to the partial sum,
/// then squared s times.
Matrix mat_exp(const Matrix& m, double tol = 1e-16);

struct Discretization {
  Matrix a;
  Matrix b;
};

/// Zero-order-hold discretization via one exponential of [[Ac, Bc], [0, 0]]·Ts.
Discretization zoh_discretize(const Matrix& ac, const Matrix& bc, double ts);

/// C (I - A)^{-1} B. Throws MarginallyStableError when I - A is singular.
Matrix steady_state_gain(const Matrix& a, const Matrix& b, const Matrix& c);

/// Number of singular values above tol · sigma_max.
int numeric_rank(const Matrix& m, double tol = kDefaultRankTol);
int numeric_rank(const ComplexMatrix& m, double tol = kDefaultRankTol);

/// Orthonormal basis (as rows) of {r : r M = 0}.
Matrix left_nullspace(const Matrix& m, double tol = kDefaultRankTol);

/// Largest absolute entry.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Spectral radius via the real Schur/eigen decomposition.
double spectral_radius(const Matrix& a);

}  // namespace acdc
