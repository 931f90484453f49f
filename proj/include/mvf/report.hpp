#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace mvf {

inline constexpr int kReportSchemaVersion = 1;

/// One named assertion with its measured value and tolerance. Informational
/// checks are reported but do not gate the exit status.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">", "|x-target|<=", "informational"
  double target = 0.0;
  bool pass = false;
  bool gating = true;
};

inline Check check_le(std::string name, double value, double tol) {
  return {std::move(name), value, tol, "<=", 0.0, std::isfinite(value) && value <= tol, true};
}

inline Check check_gt(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, ">", 0.0, std::isfinite(value) && value > threshold, true};
}

inline Check check_near(std::string name, double value, double target, double tol) {
  return {std::move(name), value, tol, "|x-target|<=", target,
          std::isfinite(value) && std::abs(value - target) <= tol, true};
}

inline Check check_true(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", 1.0, ok, true}; }

inline Check note(std::string name, double value) {
  return {std::move(name), value, 0.0, "informational", 0.0, true, false};
}

inline bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (c.gating && !c.pass) return false;
  return true;
}

}  // namespace mvf
