#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"  // nlohmann, vendored

namespace sol4 {

/// One verified quantity. `relation` is "<=" (value <= bound), ">=" (value >= bound)
/// or "==" (|value - expected| <= bound).
struct Check {
  std::string id;
  double value = 0.0;
  double bound = 0.0;
  std::optional<double> expected;
  bool pass = false;
  std::string anchor;
  std::string relation = "<=";
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  /// Residual-style check: passes when value <= bound (NaN fails).
  Check& bound(std::string id, double value, double bound, std::string anchor) {
    checks.push_back({std::move(id), value, bound, std::nullopt, value <= bound, std::move(anchor), "<="});
    return checks.back();
  }

  /// Lower-bound check: passes when value >= bound (NaN fails).
  Check& at_least(std::string id, double value, double bound, std::string anchor) {
    checks.push_back({std::move(id), value, bound, std::nullopt, value >= bound, std::move(anchor), ">="});
    return checks.back();
  }

  /// Target check: passes when |value - expected| <= tol.
  Check& target(std::string id, double value, double expected, double tol, std::string anchor) {
    const bool ok = std::abs(value - expected) <= tol;
    checks.push_back({std::move(id), value, tol, expected, ok, std::move(anchor), "=="});
    return checks.back();
  }

  /// Predicate check recorded as 1 (true) or 0 (false) against bound 1.
  Check& flag(std::string id, bool ok, std::string anchor) {
    checks.push_back({std::move(id), ok ? 1.0 : 0.0, 0.0, 1.0, ok, std::move(anchor), "=="});
    return checks.back();
  }

  void merge(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }

  void sort() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const Check& a, const Check& b) { return a.id < b.id; });
  }

  double worst_excess() const {
    double w = -INFINITY;
    for (const Check& c : checks) {
      double excess = c.value - c.bound;
      if (c.expected) excess = std::abs(c.value - *c.expected) - c.bound;
      if (c.relation == ">=") excess = c.bound - c.value;
      w = std::max(w, excess);
    }
    return w;
  }
};

/// Nine significant digits, shortest form.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

// nlohmann serializes doubles at full precision; route numbers through the
// 9-digit formatter so reports are stable across platforms.
inline nlohmann::ordered_json rounded(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return nlohmann::ordered_json::parse(format_number(v));
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

}  // namespace detail

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const Check& c : r.checks) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["value"] = detail::rounded(c.value);
    if (c.expected) j["expected"] = detail::rounded(*c.expected);
    j["bound"] = detail::rounded(c.bound);
    j["relation"] = c.relation;
    j["pass"] = c.pass;
    j["anchor"] = c.anchor;
    checks.push_back(std::move(j));
  }
  return {{"suite", r.suite}, {"pass", r.pass()}, {"checks", std::move(checks)}};
}

inline std::string to_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << "suite,id,value,expected,relation,bound,pass,anchor\n";
  for (const Check& c : r.checks) {
    os << detail::csv_escape(r.suite) << ',' << detail::csv_escape(c.id) << ','
       << format_number(c.value) << ',' << (c.expected ? format_number(*c.expected) : "") << ','
       << c.relation << ',' << format_number(c.bound) << ',' << (c.pass ? "true" : "false") << ','
       << detail::csv_escape(c.anchor) << '\n';
  }
  return os.str();
}

}  // namespace sol4
