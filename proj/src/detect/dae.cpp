#include "acdc/detect/dae.hpp"

#include <algorithm>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

Eigen::Index DaeSystem::attack_column(Channel c) const {
  const auto it = std::find(channels.begin(), channels.end(), c);
  if (it == channels.end()) {
    throw InvalidArgument("channel '" + std::string(to_string(c)) + "' is not an attack column of this DAE");
  }
  return static_cast<Eigen::Index>(it - channels.begin());
}

DaeSystem build_dae(const LtiModel& m) {
  const auto& dp = m.disc();
  const Eigen::Index nx = m.n_states();
  const Eigen::Index nd = dp.bd.cols();
  const Eigen::Index ny = m.n_channels();
  const Eigen::Index nr = nx + ny;

  DaeSystem d;
  d.n_states = nx;
  d.channels = m.channels;
  d.measured = m.channels;
  d.h0 = Matrix::Zero(nr, nx + nd);
  d.h0.topLeftCorner(nx, nx) = dp.a;
  d.h0.topRightCorner(nx, nd) = dp.bd;
  d.h0.bottomLeftCorner(ny, nx) = m.c;
  d.h1 = Matrix::Zero(nr, nx + nd);
  d.h1.topLeftCorner(nx, nx) = -Matrix::Identity(nx, nx);
  d.l = Matrix::Zero(nr, ny);
  d.l.bottomRows(ny) = -Matrix::Identity(ny, ny);
  d.f.resize(nr, ny);
  d.f.topRows(nx) = dp.bf;
  d.f.bottomRows(ny) = Matrix::Identity(ny, ny);
  return d;
}

DaeSystem absorb_attacks(const DaeSystem& d, const std::vector<Channel>& channels) {
  std::vector<Eigen::Index> move;
  for (auto c : channels) move.push_back(d.attack_column(c));
  DaeSystem out = d;
  const auto extra = static_cast<Eigen::Index>(move.size());
  out.h0.conservativeResize(Eigen::NoChange, d.unknowns() + extra);
  out.h1.conservativeResize(Eigen::NoChange, d.unknowns() + extra);
  out.h1.rightCols(extra).setZero();
  for (Eigen::Index i = 0; i < extra; ++i) out.h0.col(d.unknowns() + i) = d.f.col(move[static_cast<std::size_t>(i)]);

  out.channels.clear();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < d.f.cols(); ++c) {
    if (std::find(move.begin(), move.end(), c) != move.end()) continue;
    keep.push_back(c);
    out.channels.push_back(d.channels[static_cast<std::size_t>(c)]);
  }
  out.f.resize(d.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.f.col(static_cast<Eigen::Index>(i)) = d.f.col(keep[i]);
  out.absorbed.insert(out.absorbed.end(), channels.begin(), channels.end());
  return out;
}

Toeplitz stack_toeplitz(const DaeSystem& d, int degree) {
  if (degree < 1) throw InvalidArgument("stack_toeplitz: degree must be >= 1");
  const Eigen::Index nr = d.rows();
  const Eigen::Index nx = d.unknowns();
  const Eigen::Index nf = d.f.cols();
  const Eigen::Index blocks = degree + 1;
  Toeplitz t;
  t.h = Matrix::Zero(blocks * nr, (blocks + 1) * nx);
  t.f = Matrix::Zero(blocks * nr, blocks * nf);
  for (Eigen::Index i = 0; i < blocks; ++i) {
    t.h.block(i * nr, i * nx, nr, nx) = d.h0;
    t.h.block(i * nr, (i + 1) * nx, nr, nx) = d.h1;
    t.f.block(i * nr, i * nf, nr, nf) = d.f;
  }
  return t;
}

}  // namespace acdc
