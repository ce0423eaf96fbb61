#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "acdc/sim/simulate.hpp"

namespace acdc {

/// Columns: t, dw1_hz, dw2_hz, states (internal units), y_<ch>, yt_<ch>,
/// ace1, ace2, pdc_ref, f_<ch>. Channel columns are in physical units.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Corrupted measurements (yt_<ch> columns) of a trajectory CSV, converted
/// to internal units, in the order of `channels`. Sets `ts` from the time
/// column when at least two rows are present.
Matrix read_corrupted_measurements(std::istream& is, const std::vector<Channel>& channels, double& ts);

/// Columns: t, r_1..r_m.
void write_residual_csv(std::ostream& os, double ts, const Matrix& r);

/// Generic numeric table with a header row.
void write_table(std::ostream& os, const std::vector<std::string>& header, const Matrix& rows);

}  // namespace acdc
