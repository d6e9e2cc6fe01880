#pragma once

#include "vw/fields.hpp"
#include "vw/lagrangian.hpp"
#include "vw/shooting.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vw {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kConfigVersion = 1;

// Non-finite numbers serialize as null; the caller's JSON stays valid.
Json number(double v);
Json vec_json(const Vec& v);

Json to_json(const ConditionReport& r);
Json to_json(const CertificateEntry& e);
Json to_json(const ShootingCertificate& c, const std::string& trajectory_path);
Json to_json(const ConvexityCertificate& c);
Json to_json(const AlmostPeriodScan& s, bool include_profile = false);

// One certificate line of a report: status plus measured value against a bound.
struct ReportLine {
  std::string name;
  Status status = Status::Pass;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::optional<double> witness_t;
};

Json to_json(const ReportLine& l);
ReportLine line_from(const ConditionReport& r);  // measured = worst violation, bound = 0

struct Tolerances {
  std::optional<double> rtol, atol, anchor_tol, param_tol;
};

struct RunConfig {
  int version = kConfigVersion;
  std::string pipeline;
  std::string system;
  std::map<std::string, std::string> tables;
  std::optional<double> t0, t1;  // window
  Tolerances tolerances;
  std::uint64_t seed = 1;
  std::string output = "vw-out";
  std::map<std::string, double> params;

  // Unknown keys anywhere in the document are a ConfigError.
  static RunConfig parse(const Json& j);
  static RunConfig load(const std::string& path);
  Json to_json() const;
};

// Text summary: one line per certificate; "no certificates" when the list
// is empty. Throws MalformedReport.
std::string render_report(const Json& report);
std::string render_reports(const std::vector<Json>& reports);

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& content);

// Report JSON without the meta block, for determinism comparisons.
std::string canonical_report(const Json& report);

}  // namespace vw
