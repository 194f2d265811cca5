// Built against a core compiled with a deliberately wrong Garner step. The
// self-test has to notice: exit 0 means the fault was caught by the
// crt-equivalence suite, 1 means it slipped through.

#include <cstdio>

#include "rsarand/selftest.hpp"

int main() {
  const auto results = rsarand::run_selftest({"crt-equivalence", "miniature-period"});
  bool crt_caught = false;
  for (const auto& r : results) {
    std::printf("%-20s %s  %s\n", r.name.c_str(), r.passed ? "passed" : "FAILED", r.detail.c_str());
    if (r.name == "crt-equivalence" && !r.passed) crt_caught = true;
  }
  std::printf("injected Garner fault %s\n", crt_caught ? "detected" : "NOT detected");
  return crt_caught ? 0 : 1;
}
