// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace swt {

enum class VerifyScale { small, medium };

VerifyScale parse_scale(std::string_view name);

struct SuiteResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  std::string detail;  // on failure: the first failing case's inputs
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const {
    for (const auto& s : suites)
      if (!s.passed) return false;
    return true;
  }
};

/// Runs the invariant battery: loss vs. path enumeration, finite-difference
/// gradient checks, closed-form losses, engine equivalence across all four
/// modes, memory release, determinism, and the parallel-iterations table.
/// Medium scale adds the batch-size memory-scaling assertions.
VerifyReport run_verification(VerifyScale scale);

}  // namespace swt
