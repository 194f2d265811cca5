#pragma once

// Built-in property suites: miniature full period, bijectivity and
// decryption, CRT/Garner equivalence against direct exponentiation, Schrage
// equivalence against mulmod, and primality against trial division.

#include <functional>
#include <string>
#include <vector>

namespace rsarand {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

std::vector<std::string> selftest_suites();

/// Runs the named suites (all when empty), calling `progress` after each.
std::vector<SuiteResult> run_selftest(const std::vector<std::string>& suites = {},
                                      const std::function<void(const SuiteResult&)>& progress = {});

}  // namespace rsarand
