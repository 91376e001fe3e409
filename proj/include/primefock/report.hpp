#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace primefock {

inline constexpr int kSchemaVersion = 1;

/// Outcome of one numerical identity check: pass iff residual <= tolerance.
struct VerificationReport {
  std::string check;
  std::map<std::string, std::string> parameters;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> diagnostics;

  VerificationReport() = default;
  VerificationReport(std::string name, double residual_, double tolerance_)
      : check(std::move(name)), residual(residual_), tolerance(tolerance_) {
    settle();
  }

  VerificationReport& param(const std::string& key, double value);
  VerificationReport& param(const std::string& key, const std::string& value);
  VerificationReport& diag(const std::string& key, double value) {
    diagnostics[key] = value;
    return *this;
  }
  /// Recomputes `pass` after residual or tolerance changed.
  void settle() { pass = residual <= tolerance; }
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

nlohmann::json to_json(const VerificationReport& report);

}  // namespace primefock
