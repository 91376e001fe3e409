#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "primefock/numtheory.hpp"
#include "primefock/report.hpp"
#include "primefock/dirichlet.hpp"

namespace primefock::cli {

enum ExitCode : int { kPass = 0, kFailure = 1, kUsage = 2 };

/// Parameters shared by the verification suites.
struct RunConfig {
  TruncationSpec truncation;
  HalfPlanePoint s{1.3, 0.0};
  std::optional<SiteWeights> z;  // unset means each suite's own choice
  unsigned occupation_cap = 4;
  unsigned radial_order = 8;
  std::size_t subset = 50;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "ccr",        "eigen", "poisson", "uncertainty", "displacement", "resolution",
      "dirichlet-ring", "holstein", "norms", "commutator", "mass"};
  return names;
}

/// Runs one named suite. Throws std::invalid_argument for an unknown name.
std::vector<VerificationReport> run_suite(const std::string& suite, const RunConfig& config);

/// Parses "re", "re+imi", "re-imi" or "imi".
Complex parse_complex(const std::string& text);

/// Parses "p=re+imi".
std::pair<u64, Complex> parse_site_assignment(const std::string& text);

/// Entry point of the primefock executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace primefock::cli
