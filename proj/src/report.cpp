#include "primefock/report.hpp"

#include <charconv>
#include <cmath>

namespace primefock {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

VerificationReport& VerificationReport::param(const std::string& key, double value) {
  parameters[key] = format_double(value);
  return *this;
}

VerificationReport& VerificationReport::param(const std::string& key,
                                              const std::string& value) {
  parameters[key] = value;
  return *this;
}

nlohmann::json to_json(const VerificationReport& report) {
  auto finite_or_string = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return format_double(x);
  };
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, v] : report.diagnostics) diag[k] = finite_or_string(v);
  return {{"schema_version", kSchemaVersion},
          {"check", report.check},
          {"parameters", report.parameters},
          {"residual", finite_or_string(report.residual)},
          {"tolerance", finite_or_string(report.tolerance)},
          {"pass", report.pass},
          {"diagnostics", diag}};
}

}  // namespace primefock
