#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "acdc/detect/residual.hpp"
#include "acdc/grid/model.hpp"
#include "acdc/sim/metrics.hpp"
#include "acdc/vuln/stealth.hpp"

namespace acdc {

/// Stable 64-bit hash (hex) of the discrete matrices and sampling period.
/// A bank only runs against the model it was synthesized on.
std::string model_fingerprint(const LtiModel& m);

nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json model_report(const LtiModel& m);
nlohmann::json metrics_report(const ImpactMetrics& m);
nlohmann::json vuln_report(const VulnResult& r, const std::vector<Channel>& channels);

struct StoredBank {
  DetectorBank bank;
  std::string fingerprint;
  Variant variant = Variant::kAcDcVi;
  double ts = 0.0;
};

nlohmann::json bank_to_json(const DetectorBank& b, const LtiModel& m);
StoredBank bank_from_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace acdc
