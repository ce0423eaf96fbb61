#include "acdc/io/csv.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "acdc/error.hpp"

namespace acdc {

namespace {

constexpr int kDigits = 15;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

std::string channel_column(const char* prefix, Channel c) {
  return std::string(prefix) + std::string(to_string(c)) + (is_frequency(c) ? "_hz" : "");
}

}  // namespace

void write_table(std::ostream& os, const std::vector<std::string>& header, const Matrix& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols()) throw InvalidArgument("write_table: header size mismatch");
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n' << std::setprecision(kDigits);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) os << (c ? "," : "") << rows(r, c);
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const Eigen::Index t = tr.length();
  const Eigen::Index nx = tr.x.cols();
  const Eigen::Index ny = tr.y.cols();
  std::vector<std::string> header{"t", "dw1_hz", "dw2_hz"};
  for (auto s : tr.states) header.emplace_back(to_string(s));
  for (auto c : tr.channels) header.push_back(channel_column("y_", c));
  for (auto c : tr.channels) header.push_back(channel_column("yt_", c));
  header.insert(header.end(), {"ace1", "ace2", "pdc_ref"});
  for (auto c : tr.channels) header.push_back(channel_column("f_", c));

  Vector unit(ny);
  for (Eigen::Index c = 0; c < ny; ++c) unit(c) = 1.0 / internal_per_physical(tr.channels[static_cast<std::size_t>(c)]);
  Matrix rows(t, static_cast<Eigen::Index>(header.size()));
  for (Eigen::Index k = 0; k < t; ++k) rows(k, 0) = static_cast<double>(k) * tr.ts;
  rows.col(1) = tr.freq_hz(1);
  rows.col(2) = tr.freq_hz(2);
  rows.middleCols(3, nx) = tr.x;
  rows.middleCols(3 + nx, ny) = tr.y * unit.asDiagonal();
  rows.middleCols(3 + nx + ny, ny) = tr.y_tilde * unit.asDiagonal();
  rows.middleCols(3 + nx + 2 * ny, 2) = tr.ace;
  rows.col(5 + nx + 2 * ny) = tr.pdc_ref;
  rows.middleCols(6 + nx + 2 * ny, ny) = tr.f * unit.asDiagonal();
  write_table(os, header, rows);
}

Matrix read_corrupted_measurements(std::istream& is, const std::vector<Channel>& channels, double& ts) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("trajectory CSV is empty");
  const auto header = split(line);
  std::vector<std::size_t> cols;
  for (auto c : channels) {
    const auto name = channel_column("yt_", c);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("trajectory CSV has no column '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  if (header.empty() || header[0] != "t") throw InvalidArgument("trajectory CSV must start with a 't' column");

  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw InvalidArgument("trajectory CSV row has the wrong number of cells");
    std::vector<double> r;
    try {
      times.push_back(std::stod(cells[0]));
      for (auto c : cols) r.push_back(std::stod(cells[c]));
    } catch (const std::exception&) {
      throw InvalidArgument("trajectory CSV has a non-numeric cell");
    }
    rows.push_back(std::move(r));
  }
  if (times.size() >= 2) ts = times[1] - times[0];
  Matrix y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < channels.size(); ++c) {
      y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = rows[k][c] * internal_per_physical(channels[c]);
    }
  }
  return y;
}

void write_residual_csv(std::ostream& os, double ts, const Matrix& r) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < r.cols(); ++i) header.push_back("r_" + std::to_string(i + 1));
  Matrix rows(r.rows(), r.cols() + 1);
  for (Eigen::Index k = 0; k < r.rows(); ++k) rows(k, 0) = static_cast<double>(k) * ts;
  rows.rightCols(r.cols()) = r;
  write_table(os, header, rows);
}

}  // namespace acdc
