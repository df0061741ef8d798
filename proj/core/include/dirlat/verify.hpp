#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dirlat {

struct VerifyOptions {
  int seeds = 0;  // 0 picks each suite's default
  std::uint64_t first_seed = 1;
};

struct SuiteCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCheck> checks;
  double seconds = 0.0;
  bool passed() const;
};

// oracle, lp-bounds, certificate, splitting, rounding, constants.
const std::vector<std::string>& suite_names();

// Throws std::invalid_argument for an unknown suite.
SuiteResult run_suite(const std::string& name, const VerifyOptions& options = {});

std::string suite_to_json(const std::vector<SuiteResult>& results);

}  // namespace dirlat
