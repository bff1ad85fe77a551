#pragma once

// Machine-readable verification reports. Serialization is bit-stable for
// fixed inputs: object keys are emitted in sorted order and every float is
// formatted with "%.12e".

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace phgeom {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::array<double, 4> worst_point{};

  static CheckResult make(std::string name, double residual, double tol,
                          std::array<double, 4> worst = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.max_residual = residual;
    r.tolerance = tol;
    r.pass = residual < tol;
    r.worst_point = worst;
    return r;
  }
  // for checks that must EXCEED a bound (negative controls, obstructions)
  static CheckResult make_lower_bound(std::string name, double value, double bound,
                                      std::array<double, 4> worst = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.max_residual = value;
    r.tolerance = bound;
    r.pass = value > bound;
    r.worst_point = worst;
    return r;
  }
};

struct Report {
  std::string family;
  std::string classification;
  std::string params_echo;  // canonical JSON echo of the configured parameters
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool all_pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt_e12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace detail

// Keys inside every object are emitted in sorted order by construction;
// floats go through fmt_e12.
inline std::string to_json(const Report& r) {
  std::string s = "{";
  s += "\"checks\":[";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const CheckResult& c = r.checks[i];
    if (i) s += ",";
    s += "{\"max_residual\":" + detail::fmt_e12(c.max_residual);
    s += ",\"name\":\"" + detail::json_escape(c.name) + "\"";
    s += std::string(",\"pass\":") + (c.pass ? "true" : "false");
    s += ",\"tolerance\":" + detail::fmt_e12(c.tolerance);
    s += ",\"worst_point\":[";
    for (int k = 0; k < 4; ++k) {
      if (k) s += ",";
      s += detail::fmt_e12(c.worst_point[k]);
    }
    s += "]}";
  }
  s += "],";
  s += "\"classification\":\"" + detail::json_escape(r.classification) + "\",";
  s += "\"family\":\"" + detail::json_escape(r.family) + "\",";
  s += "\"notes\":[";
  for (std::size_t i = 0; i < r.notes.size(); ++i) {
    if (i) s += ",";
    s += "\"" + detail::json_escape(r.notes[i]) + "\"";
  }
  s += "],";
  s += "\"params\":" + (r.params_echo.empty() ? std::string("{}") : r.params_echo);
  s += "}";
  return s;
}

}  // namespace phgeom
