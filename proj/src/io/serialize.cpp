#include "acdc/io/serialize.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "acdc/error.hpp"

namespace acdc {

using nlohmann::json;

namespace {

constexpr const char* kBankFormat = "acdc-fdi/residual-bank";
constexpr int kBankVersion = 1;

void fnv1a(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

void hash_matrix(std::uint64_t& h, const Matrix& m) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "[%td,%td]", m.rows(), m.cols());
  fnv1a(h, buf);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12e;", m(i, j));
      fnv1a(h, buf);
    }
  }
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<std::string> channel_names(const std::vector<Channel>& cs) {
  std::vector<std::string> out;
  for (auto c : cs) out.emplace_back(to_string(c));
  return out;
}

std::vector<Channel> channels_from(const json& j) {
  std::vector<Channel> out;
  for (const auto& e : j) out.push_back(parse_channel(e.get<std::string>()));
  return out;
}

}  // namespace

std::string model_fingerprint(const LtiModel& m) {
  const auto& d = m.disc();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv1a(h, std::string(to_string(m.variant)));
  char buf[40];
  std::snprintf(buf, sizeof buf, "ts=%.12e;", d.ts);
  fnv1a(h, buf);
  hash_matrix(h, d.a);
  hash_matrix(h, d.bd);
  hash_matrix(h, d.bf);
  hash_matrix(h, m.c);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("matrix: expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols) throw InvalidArgument("matrix: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

json model_report(const LtiModel& m) {
  json j;
  j["variant"] = std::string(to_string(m.variant));
  std::vector<std::string> states;
  for (auto s : m.states) states.emplace_back(to_string(s));
  j["states"] = states;
  j["channels"] = channel_names(m.channels);
  j["droop"] = m.droop_standard ? "standard" : "as-printed";
  j["warnings"] = m.warnings;
  j["continuous"] = {{"a", to_json(m.ac)}, {"b_d", to_json(m.bcd)}, {"b_f", to_json(m.bcf)}, {"c", to_json(m.c)}};
  Eigen::EigenSolver<Matrix> es(m.ac, false);
  json eig = json::array();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    eig.push_back({es.eigenvalues()(i).real(), es.eigenvalues()(i).imag()});
  }
  j["continuous"]["eigenvalues"] = eig;
  if (m.discrete) {
    const auto rep = validate_stability(m);
    j["discrete"] = {{"ts", m.discrete->ts},
                     {"a", to_json(m.discrete->a)},
                     {"b_d", to_json(m.discrete->bd)},
                     {"b_f", to_json(m.discrete->bf)},
                     {"eigenvalue_moduli", rep.moduli},
                     {"spectral_radius", rep.spectral_radius},
                     {"stable", rep.stable}};
    j["fingerprint"] = model_fingerprint(m);
  }
  return j;
}

json metrics_report(const ImpactMetrics& m) {
  auto area = [](const AreaImpact& a) {
    return json{{"mfd_hz", a.mfd_hz}, {"mfd_time_s", a.mfd_time_s}, {"ssfd_hz", a.ssfd_hz}};
  };
  return {{"area1", area(m.area[0])},
          {"area2", area(m.area[1])},
          {"center_of_inertia", area(m.coi)},
          {"peak_ace", {m.peak_ace[0], m.peak_ace[1]}},
          {"peak_pdc_ref", m.peak_pdc_ref}};
}

json vuln_report(const VulnResult& r, const std::vector<Channel>& channels) {
  json j;
  j["feasible"] = r.feasible();
  j["alpha_star"] = r.feasible() ? json(r.alpha_star) : json("inf");
  j["anchor_value"] = r.mu;
  json attack = json::object();
  for (std::size_t i = 0; i < channels.size() && static_cast<Eigen::Index>(i) < r.f_star.size(); ++i) {
    attack[std::string(to_string(channels[i]))] = r.f_star(static_cast<Eigen::Index>(i));
  }
  j["attack"] = attack;
  if (r.feasible()) {
    j["k_star"] = r.k_star;
    j["sign"] = r.sign;
    j["mfd_hz"] = r.mfd_hz;
    j["active_constraints"] = r.active_rows;
  }
  j["stats"] = {{"subproblems", r.stats.subproblems},
                {"nodes", r.stats.nodes},
                {"lp_iterations", r.stats.lp_iterations},
                {"big_m", r.stats.big_m},
                {"big_m_increased", r.stats.big_m_increased},
                {"big_m_binding", r.stats.big_m_binding}};
  return j;
}

json bank_to_json(const DetectorBank& b, const LtiModel& m) {
  json j;
  j["format"] = kBankFormat;
  j["version"] = kBankVersion;
  j["model_fingerprint"] = model_fingerprint(m);
  j["variant"] = std::string(to_string(m.variant));
  j["ts"] = m.disc().ts;
  j["degree"] = b.degree;
  j["pole"] = b.pole;
  j["eta"] = b.eta;
  j["channels"] = channel_names(b.channels);
  j["failures"] = b.failures;
  json gens = json::array();
  for (const auto& g : b.members) {
    gens.push_back({{"target", std::string(to_string(g.target))},
                    {"gamma", g.gamma},
                    {"measured", channel_names(g.measured)},
                    {"decoupled", channel_names(g.decoupled)},
                    {"decoupling_error", g.decoupling_error},
                    {"eta_min", g.eta_min},
                    {"eta_binding", g.eta_binding},
                    {"n", to_json(g.n)},
                    {"numerator", to_json(g.numerator)},
                    {"denominator", vector_json(g.denominator)}});
  }
  j["generators"] = gens;
  return j;
}

StoredBank bank_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kBankFormat) throw InvalidArgument("not a residual bank document");
    if (j.at("version").get<int>() != kBankVersion) throw InvalidArgument("unsupported bank version");
    StoredBank s;
    s.fingerprint = j.at("model_fingerprint").get<std::string>();
    s.variant = parse_variant(j.at("variant").get<std::string>());
    s.ts = j.at("ts").get<double>();
    auto& b = s.bank;
    b.degree = j.at("degree").get<int>();
    b.pole = j.at("pole").get<double>();
    b.eta = j.at("eta").get<double>();
    b.channels = channels_from(j.at("channels"));
    b.failures = j.at("failures").get<std::vector<std::string>>();
    for (const auto& gj : j.at("generators")) {
      ResidualGenerator g;
      g.target = parse_channel(gj.at("target").get<std::string>());
      g.degree = b.degree;
      g.pole = b.pole;
      g.eta = b.eta;
      g.gamma = gj.at("gamma").get<double>();
      g.measured = channels_from(gj.at("measured"));
      g.decoupled = channels_from(gj.at("decoupled"));
      g.decoupling_error = gj.at("decoupling_error").get<double>();
      g.eta_binding = gj.at("eta_binding").get<bool>();
      g.eta_min = gj.value("eta_min", 0.0);
      g.n = matrix_from_json(gj.at("n"));
      g.numerator = matrix_from_json(gj.at("numerator"));
      const auto den = gj.at("denominator").get<std::vector<double>>();
      g.denominator = Eigen::Map<const Vector>(den.data(), static_cast<Eigen::Index>(den.size()));
      if (g.numerator.rows() != b.degree + 1 || g.denominator.size() != b.degree + 1 ||
          g.numerator.cols() != static_cast<Eigen::Index>(g.measured.size())) {
        throw InvalidArgument("generator for '" + std::string(to_string(g.target)) + "' has inconsistent sizes");
      }
      b.members.push_back(std::move(g));
    }
    if (b.members.size() != b.channels.size()) throw InvalidArgument("generator count differs from channel list");
    return s;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bank document: ") + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace acdc
