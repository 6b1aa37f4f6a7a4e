#pragma once
#include <cstdint>

namespace ttclab {

// Enumeration budgets. Exceeding one raises CapExceeded, which checkers and
// the CLI surface as an explicit "refused" verdict.
struct Caps {
  std::uint64_t max_profiles = 10'000'000;     // profiles per enumerated space
  std::uint64_t max_eval_calls = 100'000'000;  // mechanism evaluations per check
  int pareto_market_cap = 7;                   // allocation enumeration bound
  int threads = 1;                             // worker threads for scans
};

}  // namespace ttclab
