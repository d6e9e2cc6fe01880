#include "vw/report.hpp"

#include "vw/error.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace vw {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

namespace {

Json opt_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

}  // namespace

Json to_json(const ConditionReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["status"] = to_string(r.status);
  j["worst_value"] = number(r.worst_value);
  j["witness_t"] = opt_number(r.witness_t);
  j["witness_x"] = r.witness_x.size() ? vec_json(r.witness_x) : Json(nullptr);
  j["samples"] = r.samples;
  Json c = Json::object();
  for (const auto& [k, v] : r.constants) c[k] = number(v);
  j["constants"] = c;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const CertificateEntry& e) {
  Json j;
  j["name"] = e.name;
  j["status"] = to_string(e.status);
  j["measured"] = number(e.measured);
  j["bound"] = number(e.bound);
  j["margin"] = number(e.margin);
  j["witness_t"] = opt_number(e.witness_t);
  return j;
}

Json to_json(const ShootingCertificate& c, const std::string& trajectory_path) {
  Json j;
  j["sup_V"] = number(c.sup_V);
  j["bound_V"] = number(c.bound_V);
  j["W_min"] = number(c.W_min);
  j["W_max"] = number(c.W_max);
  j["omega0"] = number(c.omega0);
  j["omega_sup"] = number(c.omega_sup);
  Json anchors = Json::array();
  for (const Vec& a : c.anchors) anchors.push_back(vec_json(a));
  j["anchors"] = anchors;
  j["anchor_starts"] = c.anchor_starts;
  Json diffs = Json::array();
  for (double d : c.anchor_diffs) diffs.push_back(number(d));
  j["anchor_diffs"] = diffs;
  j["cauchy_residual"] = number(c.cauchy_residual);
  j["status"] = to_string(c.status);
  j["witness_t"] = opt_number(c.witness_t);
  j["witness_x"] = c.witness_x.size() ? vec_json(c.witness_x) : Json(nullptr);
  j["confidence"] = c.confidence;
  j["trajectory"] = trajectory_path;
  j["trajectory_nodes"] = c.trajectory.size();
  Json entries = Json::array();
  for (const CertificateEntry& e : c.entries) entries.push_back(to_json(e));
  j["entries"] = entries;
  return j;
}

Json to_json(const ConvexityCertificate& c) {
  Json j;
  j["r"] = number(c.r);
  j["d"] = number(c.d);
  j["rho_hat"] = number(c.rho_hat);
  j["vartheta"] = number(c.vartheta);
  j["samples"] = c.samples;
  j["pairs"] = c.pairs;
  j["quadratic_test_run"] = c.quadratic_test_run;
  j["quadratic_test_worst"] = number(c.quadratic_test_worst);
  j["alpha1_min"] = number(c.alpha1_min);
  j["beta1_max"] = number(c.beta1_max);
  j["gamma1_min"] = number(c.gamma1_min);
  j["alpha2_max"] = number(c.alpha2_max);
  j["beta2_max"] = number(c.beta2_max);
  j["gamma2_min"] = number(c.gamma2_min);
  j["status"] = to_string(c.status);
  j["witness_t"] = opt_number(c.witness_t);
  j["notes"] = c.notes;
  return j;
}

Json to_json(const AlmostPeriodScan& s, bool include_profile) {
  Json j;
  j["epsilon"] = number(s.epsilon);
  j["tau_count"] = s.tau.size();
  j["accepted_count"] = s.accepted.size();
  j["max_gap"] = number(s.max_gap);
  j["accepted"] = s.accepted;
  if (include_profile) {
    Json prof = Json::array();
    for (std::size_t i = 0; i < s.tau.size(); ++i) prof.push_back({number(s.tau[i]), number(s.defect[i])});
    j["profile"] = prof;
  }
  return j;
}

Json to_json(const ReportLine& l) {
  Json j;
  j["name"] = l.name;
  j["status"] = to_string(l.status);
  j["measured"] = number(l.measured);
  j["bound"] = number(l.bound);
  j["margin"] = number(l.margin);
  j["witness_t"] = opt_number(l.witness_t);
  return j;
}

ReportLine line_from(const ConditionReport& r) {
  ReportLine l;
  l.name = r.condition;
  l.status = r.status;
  l.measured = r.worst_value;
  l.bound = 0.0;
  l.margin = 0.0 - r.worst_value;
  if (r.status == Status::Fail) l.witness_t = r.witness_t;
  return l;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
}

double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) config_error("'" + key + "' must be a number");
  return j.get<double>();
}

std::string get_string(const Json& j, const std::string& key) {
  if (!j.is_string()) config_error("'" + key + "' must be a string");
  return j.get<std::string>();
}

}  // namespace

RunConfig RunConfig::parse(const Json& j) {
  reject_unknown(j, {"version", "pipeline", "system", "tables", "window", "tolerances", "seed",
                     "output", "params"},
                 "config");
  RunConfig c;
  if (!j.contains("version")) config_error("missing 'version'");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kConfigVersion)
    config_error("unsupported config version");
  if (!j.contains("pipeline")) config_error("missing 'pipeline'");
  c.pipeline = get_string(j["pipeline"], "pipeline");
  if (j.contains("system")) c.system = get_string(j["system"], "system");
  if (j.contains("tables")) {
    if (!j["tables"].is_object()) config_error("'tables' must be an object");
    for (const auto& [k, v] : j["tables"].items()) c.tables[k] = get_string(v, "tables." + k);
  }
  if (j.contains("window")) {
    const Json& w = j["window"];
    if (!w.is_array() || w.size() != 2) config_error("'window' must be [t0, t1]");
    c.t0 = get_number(w[0], "window[0]");
    c.t1 = get_number(w[1], "window[1]");
    if (!(*c.t1 > *c.t0)) config_error("window must satisfy t0 < t1");
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    reject_unknown(t, {"rtol", "atol", "anchor_tol", "param_tol"}, "tolerances");
    auto take = [&](const char* k, std::optional<double>& dst) {
      if (!t.contains(k)) return;
      dst = get_number(t[k], std::string("tolerances.") + k);
      if (!(*dst >= 0.0)) config_error(std::string("tolerances.") + k + " must be nonnegative");
    };
    take("rtol", c.tolerances.rtol);
    take("atol", c.tolerances.atol);
    take("anchor_tol", c.tolerances.anchor_tol);
    take("param_tol", c.tolerances.param_tol);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      config_error("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) c.output = get_string(j["output"], "output");
  if (j.contains("params")) {
    if (!j["params"].is_object()) config_error("'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) c.params[k] = get_number(v, "params." + k);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse(j);
}

Json RunConfig::to_json() const {
  Json j;
  j["version"] = version;
  j["pipeline"] = pipeline;
  j["system"] = system;
  Json t = Json::object();
  for (const auto& [k, v] : tables) t[k] = v;
  j["tables"] = t;
  if (t0 && t1) j["window"] = {*t0, *t1};
  Json tol = Json::object();
  if (tolerances.rtol) tol["rtol"] = *tolerances.rtol;
  if (tolerances.atol) tol["atol"] = *tolerances.atol;
  if (tolerances.anchor_tol) tol["anchor_tol"] = *tolerances.anchor_tol;
  if (tolerances.param_tol) tol["param_tol"] = *tolerances.param_tol;
  j["tolerances"] = tol;
  j["seed"] = seed;
  j["output"] = output;
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  return j;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedReport, what);
}

std::string fmt(const Json& v) {
  if (v.is_null()) return "n/a";
  if (!v.is_number()) malformed("expected a number");
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(6) << std::scientific << v.get<double>();
  return os.str();
}

}  // namespace

std::string render_report(const Json& report) {
  if (!report.is_object() || !report.contains("certificates") || !report["certificates"].is_array())
    malformed("report has no certificate list");
  std::ostringstream os;
  if (report.contains("pipeline") && report["pipeline"].is_string())
    os << "# " << report["pipeline"].get<std::string>();
  if (report.contains("system") && report["system"].is_string())
    os << " / " << report["system"].get<std::string>();
  if (report.contains("status") && report["status"].is_string())
    os << ": " << report["status"].get<std::string>();
  os << '\n';
  if (report["certificates"].empty()) {
    os << "no certificates\n";
    return os.str();
  }
  for (const Json& c : report["certificates"]) {
    if (!c.is_object() || !c.contains("name") || !c.contains("status") || !c["name"].is_string() ||
        !c["status"].is_string())
      malformed("certificate entry needs name and status");
    const std::string st = c["status"].get<std::string>();
    std::string tag;
    if (st == "pass") tag = "PASS";
    else if (st == "fail") tag = "FAIL";
    else if (st == "inconclusive") tag = "INCONCLUSIVE";
    else malformed("unknown status '" + st + "'");
    os << tag << "  " << c["name"].get<std::string>()
       << "  measured=" << fmt(c.value("measured", Json(nullptr)))
       << "  bound=" << fmt(c.value("bound", Json(nullptr)))
       << "  margin=" << fmt(c.value("margin", Json(nullptr)));
    if (st != "pass") os << "  witness_t=" << fmt(c.value("witness_t", Json(nullptr)));
    os << '\n';
  }
  return os.str();
}

std::string render_reports(const std::vector<Json>& reports) {
  if (reports.empty()) return "no certificates\n";
  std::string out;
  for (const Json& r : reports) out += render_report(r);
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string canonical_report(const Json& report) {
  Json copy = report;
  if (copy.is_object()) copy.erase("meta");
  return copy.dump(2);
}

}  // namespace vw
