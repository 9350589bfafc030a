#pragma once

#include <cstdint>
#include <ostream>

struct TheoryCheckOptions {
  std::uint64_t trials = 200000;
  std::uint64_t seed = 1;
};

// Prints one PASS/FAIL row per check; returns true when all pass.
bool run_theory_check(const TheoryCheckOptions& options, std::ostream& out);
