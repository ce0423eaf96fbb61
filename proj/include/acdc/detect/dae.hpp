#pragma once

#include <vector>

#include "acdc/grid/model.hpp"

namespace acdc {

/// H(q) x + L y + F f = 0 with H(q) = H0 + H1 q, unknowns x = [X; d].
/// Rows: n_X state equations followed by n_Y output equations. `y` is the
/// corrupted measurement vector in internal units.
struct DaeSystem {
  Matrix h0;  // n_r x n_x
  Matrix h1;  // n_r x n_x
  Matrix l;   // n_r x n_Y
  Matrix f;   // n_r x (#attack columns), one per entry of `channels`
  std::vector<Channel> channels;       // attack columns still in F
  std::vector<Channel> measured;       // y order (model channel order)
  std::vector<Channel> absorbed;       // attack columns moved into the unknowns
  Eigen::Index n_states = 0;

  Eigen::Index rows() const { return h0.rows(); }
  Eigen::Index unknowns() const { return h0.cols(); }
  /// Column index of `c` in F; throws if it is not an attack column.
  Eigen::Index attack_column(Channel c) const;
};

DaeSystem build_dae(const LtiModel& m);

/// Moves the F columns of `channels` into the unknown vector, so a residual
/// built on the result is decoupled from attacks on those channels.
DaeSystem absorb_attacks(const DaeSystem& d, const std::vector<Channel>& channels);

struct Toeplitz {
  Matrix h;  // (deg+1) n_r x (deg+2) n_x
  Matrix f;  // (deg+1) n_r x (deg+1) n_f, block diagonal
};

/// Banded stacking such that [N_0 .. N_deg] h lists the coefficients of
/// N(q) H(q) in ascending powers of q.
Toeplitz stack_toeplitz(const DaeSystem& d, int degree);

}  // namespace acdc
