#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acdc/detect/dae.hpp"
#include "acdc/numerics/lp.hpp"

namespace acdc {

struct SynthOptions {
  int degree = 3;
  double pole = 0.1;
  double eta = 100.0;
  LpOptions lp;
};

/// Scalar residual r = a(q)^-1 N(q) L y with a(q) = (q - p)^d / (1 - p)^d.
/// Under a constant attack on the target channel the residual settles to
/// the attack value in physical units (Hz for frequency channels).
struct ResidualGenerator {
  Channel target = Channel::kAcFlow12;
  int degree = 3;
  double pole = 0.1;
  double eta = 100.0;
  double gamma = 0.0;  // max_i |N_i F_j|, physical units

  Matrix n;            // (degree+1) x n_r, rows N_0..N_d
  Matrix numerator;    // (degree+1) x n_Y, taps of (1-p)^d N(q) L
  Vector denominator;  // coefficients of (q-p)^d, ascending powers, monic

  std::vector<Channel> measured;   // order of the y stream
  std::vector<Channel> decoupled;  // other attacks the residual ignores

  double eta_min = 0.0;            // smallest box admitting the normalization
  double decoupling_error = 0.0;   // max |N̄ H̄|
  bool eta_binding = false;

  /// Samples after which the delay line is fully populated.
  int startup_samples() const { return degree; }
};

/// Throws DegreeTooLowError when no exactly decoupled residual of this
/// degree exists, when every such residual is blind to a constant attack
/// on `target`, or when the normalization needs a box larger than eta.
ResidualGenerator synth_residual(const DaeSystem& d, Channel target, const SynthOptions& o = {});

/// Smallest eta for which the normalization is feasible at this degree;
/// empty when no decoupled residual recovers the target at all.
std::optional<double> min_feasible_eta(const DaeSystem& d, Channel target, int degree, const LpOptions& lp = {});

struct DetectorBank {
  std::vector<Channel> channels;  // one generator per entry, same order
  std::vector<ResidualGenerator> members;
  int degree = 3;
  double pole = 0.1;
  double eta = 100.0;
  std::vector<std::string> failures;  // channels that could not be isolated

  bool complete() const { return failures.empty(); }
};

/// Each member decouples the other bank channels by absorbing their attack
/// columns into the unknowns. Channels failing the isolability test or the
/// synthesis are reported in `failures` and left out.
DetectorBank synth_bank(const DaeSystem& d, const std::vector<Channel>& channels, const SynthOptions& o = {});

/// Online realization; one call per sample, constant work.
class ResidualFilter {
 public:
  explicit ResidualFilter(const ResidualGenerator& g);
  /// y is the corrupted measurement in internal units, measured-channel order.
  double step(const Vector& y);
  void reset();

 private:
  Matrix num_;
  Vector den_;
  Matrix y_hist_;  // rows y[k-d..k]
  Vector r_hist_;  // r[k-d..k-1]
};

/// Rows of `y` are samples in internal units. `stream` names the columns;
/// when given it must equal the synthesis order.
Vector run_residual(const ResidualGenerator& g, const Matrix& y, std::span<const Channel> stream = {});
Matrix run_residual(const DetectorBank& b, const Matrix& y, std::span<const Channel> stream = {});

/// Time (s) from `onset` until r stays within `band`·|target| of target;
/// empty when it never settles.
std::optional<double> settling_time(const Vector& r, double ts, Eigen::Index onset, double target,
                                    double band = 0.05);

/// k-sigma alarm threshold from an attack-free calibration run, ignoring
/// the first `skip` samples.
double alarm_threshold(const Vector& r, Eigen::Index skip, double k = 3.0);

}  // namespace acdc
