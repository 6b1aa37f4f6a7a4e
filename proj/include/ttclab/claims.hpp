#pragma once
// Registry of reproducible claims: each claim re-derives one documented result
// end to end and reports a deterministic transcript. The `reproduce` command
// and the acceptance harness are thin wrappers around this registry.

#include <functional>
#include <string>
#include <vector>

#include "ttclab/caps.hpp"

namespace ttclab {

struct ClaimResult {
  std::string id;
  bool pass = false;
  std::string expected;             // what must hold, one line
  std::string observed;             // outcome summary, one line
  std::vector<std::string> lines;   // supporting transcript, deterministic
};

struct Claim {
  std::string id;
  std::string title;
  std::function<ClaimResult(const Caps&)> run;
};

const std::vector<Claim>& claim_registry();
const Claim* find_claim(const std::string& id);  // nullptr if unknown

}  // namespace ttclab
