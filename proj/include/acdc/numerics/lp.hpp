#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "acdc/numerics/linalg.hpp"

namespace acdc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(LpStatus s);

/// Dense linear program
///
///   opt  c'x
///   s.t. A_eq x = b_eq
///        lo <= A_in x <= hi      (either side may be infinite)
///        l <= x <= u             (either side may be infinite)
///
/// Built incrementally; variables default to [0, +inf).
class LinearProgram {
 public:
  explicit LinearProgram(Eigen::Index num_vars = 0);

  Eigen::Index num_vars() const { return objective.size(); }

  void add_equality(const Vector& row, double rhs);
  void add_range(const Vector& row, double lo, double hi);
  void set_bounds(Eigen::Index var, double lo, double hi);

  /// Throws InvalidArgument when dimensions disagree or bounds are crossed.
  void validate() const;

  Vector objective;
  Sense sense = Sense::kMinimize;
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix ineq_matrix;
  Vector ineq_lower;
  Vector ineq_upper;
  Vector lower;
  Vector upper;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
  bool used_bland = false;
};

struct LpOptions {
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-10;
  double feasibility_tol = 1e-8;
  int max_iterations = 50000;
  /// Degenerate pivots in a row before switching to Bland's rule.
  int stall_limit = 50;
};

/// Two-phase primal simplex on a dense tableau.
LpResult lp_solve(const LinearProgram& p, const LpOptions& opts = {});

/// Largest violation of any constraint or bound at x.
double max_violation(const LinearProgram& p, const Vector& x);

/// Binary-restricted mixed-integer program.
struct MixedIntegerProgram {
  LinearProgram base;
  std::vector<Eigen::Index> binaries;
};

struct MilpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  int nodes = 0;
  int lp_iterations = 0;
};

struct MilpOptions {
  LpOptions lp;
  double integrality_tol = 1e-7;
  int max_nodes = 1 << 20;
};

/// Depth-first branch and bound. Branches on the lowest-index fractional
/// binary, exploring the 0 branch before the 1 branch.
MilpResult milp_solve(const MixedIntegerProgram& p, const MilpOptions& opts = {});

}  // namespace acdc
