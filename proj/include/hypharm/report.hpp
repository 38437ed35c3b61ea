#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypharm/common.hpp"

namespace hypharm {

inline constexpr const char* kReportSchema = "hypharm-report/1";
inline constexpr const char* kToolVersion = "0.3.0";

struct StabilityInfo {
  double refined_ratio = 0.0;
  double delta_pct = 0.0;
};

/// Serializable record of one experiment run: norms, ratio, grid metadata and
/// diagnostics. `details` carries experiment-specific tables.
struct ExperimentReport {
  std::string experiment;
  std::string paper_ref;
  nlohmann::json grid_meta = nlohmann::json::object();
  std::string family;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::optional<StabilityInfo> stability;
  Warnings warnings;
  bool pass = true;
  nlohmann::json details = nlohmann::json::object();
};

/// JSON form following the "hypharm-report/1" schema. `config_hash` and
/// `timestamp` are attached by the caller when known (empty = omitted).
nlohmann::json to_json(const ExperimentReport& report,
                       const std::string& config_hash = {},
                       const std::string& timestamp = {});

ExperimentReport report_from_json(const nlohmann::json& j);

/// Measure normalization constants, attached to every serialized grid.
nlohmann::json measure_info();

/// ratio = lhs / rhs when rhs > 0, otherwise 0 (for lhs == 0) or +inf.
double safe_ratio(double lhs, double rhs);

}  // namespace hypharm
