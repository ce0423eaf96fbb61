#include "acdc/grid/params.hpp"

#include <cmath>
#include <string>

#include "acdc/error.hpp"

namespace acdc {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kAcOnly:
      return "ac";
    case Variant::kAcDc:
      return "acdc";
    case Variant::kAcDcVi:
      return "acdc-vi";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "ac") return Variant::kAcOnly;
  if (s == "acdc") return Variant::kAcDc;
  if (s == "acdc-vi") return Variant::kAcDcVi;
  throw InvalidArgument("unknown variant '" + std::string(s) + "' (expected ac, acdc, acdc-vi)");
}

GridParams GridParams::defaults(Variant v) {
  // Shared plant: a light, low-inertia area 1 tied weakly to a stiffer
  // area 2 (3.5x the regulation strength).
  constexpr double kStiff = 3.50442303;
  GridParams p;
  for (int i = 0; i < 2; ++i) {
    const double s = i == 0 ? 1.0 : kStiff;
    auto& a = p.area[i];
    a.kp = 180.416723 / s;
    a.tp = 2.07963666;
    a.beta = 0.108448228 * s;
    a.gens[0] = {7.39826854 / s, 0.517510460, 0.5};
    a.gens[1] = {1.1 * 7.39826854 / s, 1.3 * 0.517510460, 0.5};
    a.t_ess = 0.282892606;
  }
  p.t12 = 0.0485488453;

  // Controllers are tuned per configuration.
  auto set_ki = [&p](double ki) {
    for (auto& a : p.area) a.ki = ki;
  };
  switch (v) {
    case Variant::kAcOnly:
      set_ki(0.328518240);
      break;
    case Variant::kAcDc:
      set_ki(0.101764952);
      p.k1 = 0.0640852768;
      p.k2 = -0.150285124;
      p.k_ac = -0.742715985;
      p.t_dc = 0.310140224;
      break;
    case Variant::kAcDcVi:
      set_ki(0.200761519);
      p.k1 = -0.0133395798;
      p.k2 = 0.152420636;
      p.k_ac = -0.848336378;
      p.t_dc = 0.458749425;
      for (auto& a : p.area) a.j_em = 0.0111384764;
      break;
  }
  return p;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("GridParams: " + what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void GridParams::validate() const {
  for (int i = 0; i < 2; ++i) {
    const auto& a = area[i];
    const std::string tag = "area " + std::to_string(i + 1) + " ";
    require(positive(a.kp), tag + "K_p must be > 0");
    require(positive(a.tp), tag + "T_p must be > 0");
    require(std::isfinite(a.beta), tag + "beta must be finite");
    require(std::isfinite(a.ki), tag + "K_I must be finite");
    require(std::isfinite(a.j_em) && a.j_em >= 0.0, tag + "J_em must be >= 0");
    require(positive(a.t_ess), tag + "T_ESS must be > 0");
    double phi_sum = 0.0;
    for (int g = 0; g < 2; ++g) {
      const auto& gen = a.gens[g];
      require(positive(gen.r), tag + "droop R must be > 0");
      require(positive(gen.t_ch), tag + "T_ch must be > 0");
      require(std::isfinite(gen.phi), tag + "participation factor must be finite");
      phi_sum += gen.phi;
    }
    require(std::abs(phi_sum - 1.0) <= 1e-9, tag + "participation factors must sum to 1");
  }
  require(std::isfinite(t12), "T_12 must be finite");
  require(std::isfinite(k1) && std::isfinite(k2) && std::isfinite(k_ac), "SPMC gains must be finite");
  require(positive(t_dc), "T_DC must be > 0");
  require(positive(omega0), "omega_o must be > 0");
}

}  // namespace acdc
