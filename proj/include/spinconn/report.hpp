#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace spinconn {

struct Check {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int points_evaluated = 0;
};

/// Named residual checks; the report passes iff every check does.
struct ResidualReport {
  std::vector<Check> checks;

  Check& add(const std::string& name, double residual, double tolerance, int points = 0) {
    checks.push_back({name, residual, tolerance, residual <= tolerance, points});
    return checks.back();
  }

  /// Fold another observation into an existing check by max-reduction, creating it if needed.
  void merge(const std::string& name, double residual, double tolerance, int points = 1) {
    for (auto& c : checks)
      if (c.name == name) {
        c.max_residual = std::max(c.max_residual, residual);
        c.points_evaluated += points;
        c.pass = c.max_residual <= c.tolerance;
        return;
      }
    add(name, residual, tolerance, points);
  }

  void append(const ResidualReport& other, const std::string& prefix = "") {
    for (const auto& c : other.checks) checks.push_back({prefix + c.name, c.max_residual, c.tolerance, c.pass, c.points_evaluated});
  }

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  double residual(const std::string& name) const {
    const Check* c = find(name);
    return c ? c->max_residual : -1.0;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

}  // namespace spinconn
