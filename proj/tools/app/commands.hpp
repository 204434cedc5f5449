#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace ktrg::app {

struct Check {
  std::string module;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  std::vector<std::filesystem::path> artifacts;

  bool ok() const;
  void add(Check c) { checks.push_back(std::move(c)); }
  void merge(Report other);
  const Check* first_failure() const;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"decompose", "coeffs", "flow", "separatrix", "polymers", "oracle", "all"};
  return names;
}

// Runs one pipeline; artifacts go to config.out_dir, which must exist.
Report run(const std::string& command, const RunConfig& config);

Report run_decompose(const RunConfig& c);
Report run_coeffs(const RunConfig& c);
Report run_flow(const RunConfig& c);
Report run_separatrix(const RunConfig& c);
Report run_polymers(const RunConfig& c);
Report run_oracle(const RunConfig& c);

// Every module check at the configured scale, written as JSON to out_dir/verify.json.
Report verify_all(const RunConfig& c, double* seconds = nullptr);
std::string report_json(const Report& r, double seconds);

void print_summary(std::ostream& out, const Report& r);

}  // namespace ktrg::app
