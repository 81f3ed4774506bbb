#pragma once

// Serialization of experiment reports. JSON carries everything; the flat CSV
// variant has one header row and one value row in the same field order.

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ladderlab/experiments.hpp"

namespace ladderlab {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace detail {

/// Non-finite doubles become null; JSON has no spelling for them.
inline nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentReport& r) {
  using nlohmann::json;
  using detail::json_number;
  const auto& p = r.params;
  json j = json::object();
  j["name"] = r.name;
  j["params"] = {{"T", p.T},
                 {"u_exponent", p.u_exponent},
                 {"epsilon", p.epsilon},
                 {"xi", json_number(r.xi)},
                 {"x", p.x},
                 {"y", p.y},
                 {"n1", p.n1},
                 {"n2", p.n2},
                 {"tol", p.tol}};
  j["lhs"] = json_number(r.lhs);
  j["rhs"] = json_number(r.rhs);
  j["ratio"] = json_number(r.ratio);
  j["err_est"] = json_number(r.err_est);
  j["runtime_s"] = r.runtime_s;
  j["n_evaluations"] = r.n_evaluations;
  j["cache"] = {{"file", r.cache_file}, {"version", r.cache_version}};
  j["notes"] = r.notes;
  j["artifact_version"] = kArtifactVersion;
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = json_number(v);
  j["extras"] = extras;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"hard", c.hard},
                      {"passed", c.passed},
                      {"value", json_number(c.value)},
                      {"bound", json_number(c.bound)}});
  j["checks"] = checks;
  return j;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const ExperimentReport& r) {
  const auto& p = r.params;
  std::ostringstream head;
  std::ostringstream row;
  row.precision(17);
  head << "name,T,u_exponent,epsilon,xi,x,y,n1,n2,tol,lhs,rhs,ratio,err_est,runtime_s,n_evaluations,"
          "cache_file,cache_version,notes,artifact_version";
  row << csv_escape(r.name) << ',' << p.T << ',' << p.u_exponent << ',' << p.epsilon << ',' << r.xi << ',' << p.x
      << ',' << p.y << ',' << p.n1 << ',' << p.n2 << ',' << p.tol << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio
      << ',' << r.err_est << ',' << r.runtime_s << ',' << r.n_evaluations << ',' << csv_escape(r.cache_file) << ','
      << r.cache_version << ',';
  std::string notes;
  for (const auto& n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
  row << csv_escape(notes) << ',' << kArtifactVersion;
  for (const auto& [k, v] : r.extras) {
    head << ',' << k;
    row << ',' << v;
  }
  return head.str() + "\n" + row.str() + "\n";
}

inline std::string plot_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,integrand\n";
  for (const auto& [t, v] : r.plot_data) os << t << ',' << v << '\n';
  return os.str();
}

}  // namespace ladderlab
