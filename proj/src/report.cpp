#include "hypharm/report.hpp"

#include <limits>

namespace hypharm {

nlohmann::json to_json(const ExperimentReport& report,
                       const std::string& config_hash,
                       const std::string& timestamp) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["experiment"] = report.experiment;
  j["paper_ref"] = report.paper_ref;
  j["grid_meta"] = report.grid_meta;
  j["family"] = report.family;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["ratio"] = report.ratio;
  if (report.stability) {
    j["stability"] = {{"refined_ratio", report.stability->refined_ratio},
                      {"delta_pct", report.stability->delta_pct}};
  } else {
    j["stability"] = nullptr;
  }
  j["warnings"] = report.warnings;
  j["pass"] = report.pass;
  j["details"] = report.details;
  if (!config_hash.empty()) {
    j["config_hash"] = config_hash;
  }
  if (!timestamp.empty()) {
    j["timestamp"] = timestamp;
  }
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.paper_ref = j.value("paper_ref", "");
  r.grid_meta = j.value("grid_meta", nlohmann::json::object());
  r.family = j.value("family", "");
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.ratio = j.at("ratio").get<double>();
  if (j.contains("stability") && !j["stability"].is_null()) {
    r.stability = StabilityInfo{j["stability"].at("refined_ratio").get<double>(),
                                j["stability"].at("delta_pct").get<double>()};
  }
  r.warnings = j.value("warnings", Warnings{});
  r.pass = j.value("pass", true);
  r.details = j.value("details", nlohmann::json::object());
  return r;
}

nlohmann::json measure_info() {
  return {{"spectral", measure::kSpectralMeasure},
          {"horocycle_h", measure::kHMeasure},
          {"horocycle_n", measure::kNMeasure},
          {"weyl_order", measure::kWeylOrder}};
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) {
    return lhs / rhs;
  }
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace hypharm
