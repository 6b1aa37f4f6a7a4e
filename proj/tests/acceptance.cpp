// Acceptance harness: evaluates the ten release criteria and prints one
// [PASS]/[FAIL] line per criterion. Exit code = number of failing criteria.
//
// Criterion 10 (determinism) reruns every claim at 1, 4, and 8 worker threads
// and byte-compares the transcripts, so this binary runs the full claim
// registry three times.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ttclab/axioms.hpp"
#include "ttclab/claims.hpp"
#include "ttclab/core.hpp"
#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"
#include "ttclab/ttc.hpp"

using namespace ttclab;

namespace {

struct SuiteRun {
  std::map<std::string, ClaimResult> by_id;
  std::string transcript;
};

SuiteRun run_all_claims(int threads) {
  Caps caps;
  caps.threads = threads;
  SuiteRun run;
  std::ostringstream t;
  for (const Claim& c : claim_registry()) {
    ClaimResult res = c.run(caps);
    t << "== " << res.id << " ==\n"
      << "expected: " << res.expected << "\n";
    for (const std::string& l : res.lines) t << l << "\n";
    t << "observed: " << res.observed << "\n"
      << "pass: " << (res.pass ? "yes" : "no") << "\n";
    run.by_id[res.id] = res;
    run.transcript += t.str();
    t.str("");
  }
  return run;
}

struct CriterionResult {
  int number = 0;
  bool pass = false;
  std::string text;
  std::vector<std::string> notes;
};

class Evaluator {
 public:
  explicit Evaluator(const SuiteRun& run) : run_(run) {}

  CriterionResult from_claims(int number, std::string text, std::vector<std::string> ids) {
    CriterionResult r;
    r.number = number;
    r.text = std::move(text);
    r.pass = true;
    for (const std::string& id : ids) {
      auto it = run_.by_id.find(id);
      if (it == run_.by_id.end()) {
        r.pass = false;
        r.notes.push_back("missing claim: " + id);
        continue;
      }
      if (!it->second.pass) {
        r.pass = false;
        r.notes.push_back("claim " + id + ": " + it->second.observed);
        for (const std::string& l : it->second.lines)
          if (l.rfind("VIOLATION", 0) == 0) r.notes.push_back("  " + l);
      }
    }
    return r;
  }

 private:
  const SuiteRun& run_;
};

}  // namespace

int main() {
  SuiteRun base = run_all_claims(1);
  Evaluator eval(base);

  std::vector<CriterionResult> results;
  results.push_back(eval.from_claims(
      1, "ttc axiom battery: n=3 with whole-market coalitions, n=4 with pair coalitions",
      {"ttc-axioms-three", "ttc-axioms-four"}));
  results.push_back(eval.from_claims(
      2, "direct and first-step local-unanimity engines agree on every catalog pairing",
      {"first-step-equivalence"}));
  results.push_back(eval.from_claims(
      3, "single-peaked exception mechanism: differs from ttc, lu+sp exhaustive, gsp fails "
         "with replayable witness",
      {"single-peaked-example"}));
  results.push_back(eval.from_claims(
      4, "single-dipped swap mechanism: differs from ttc, lu mixed with gsp both pass",
      {"single-dipped-example"}));
  results.push_back(eval.from_claims(
      5, "prover: {lu,sp} forces exactly ttc on top1-min and top2-min; single-dipped {lu,gsp} "
         "leaves several mechanisms",
      {"top-two-unique", "top-one-unique", "single-dipped-multiplicity"}));
  results.push_back(eval.from_claims(
      6, "linked prover: {lu,consistency} forces exactly ttc; dropping either axiom reopens "
         "the space",
      {"consistency-unique", "lu-only-multiplicity", "consistency-only-multiplicity"}));

  // Criterion 7 requires, beyond the recorded claims, that the grand-market
  // patch FAIL consistency on the 3-agent weak-universal family. Re-derive
  // that verdict here so the criterion reports what actually holds.
  {
    CriterionResult r = eval.from_claims(
        7, "weak-preference suite at n=3: ttc with fixed tie-breakers passes all four axioms; "
           "each foil fails exactly its target axiom",
        {"tiebreak-ttc-suite", "no-trade-weak", "sp-violator", "bossy", "patchwork-consistency"});
    Market g3 = Market::grand(3);
    WeakMechanism pw3 = market_patchwork_mechanism<WeakPreference>(
        g3, ttc_fixed_tiebreakers_mechanism(uniform_tiebreak(g3, {3, 2, 1})),
        ttc_fixed_tiebreakers_mechanism(uniform_tiebreak(g3, {2, 3, 1})));
    CheckReport rep = check_consistency(pw3, weak_universal_family(g3), Caps{});
    if (rep.verdict != Verdict::kFail) {
      r.pass = false;
      r.notes.push_back(
          "the grand-market patch is required to fail consistency at n=3, but it passes "
          "(verdict: " + std::string(to_string(rep.verdict)) + " over " +
          std::to_string(rep.profiles_examined) + " profiles)");
      r.notes.push_back(
          "every proper submarket of the 3-agent grand market has at most two agents, where "
          "the endowment-singleton rule leaves no ties to break, so both patches reduce to "
          "the same strict ttc and no removal can expose a disagreement");
      r.notes.push_back(
          "the same construction does fail consistency one size up; claim "
          "patchwork-consistency replays a 4-agent economy where removing agent 4 changes "
          "agent 1's assignment");
    }
    results.push_back(r);
  }

  results.push_back(eval.from_claims(
      8, "implication audits: lu+sp forces ir on top-one-rich strict domains; lu+sp+nb forces "
         "weak pareto on the weak-universal domain",
      {"ir-implication-audit", "weak-pareto-implication-audit"}));
  results.push_back(eval.from_claims(
      9, "four-profile walkthrough: unanimity seeding plus sp propagation reproduce the ttc "
         "table step by step",
      {"walkthrough-derivation"}));

  // Criterion 10: byte-identical claim transcripts at 1, 4, and 8 threads.
  {
    CriterionResult r;
    r.number = 10;
    r.text = "byte-identical claim transcripts across 1, 4, and 8 worker threads";
    r.pass = true;
    for (int threads : {4, 8}) {
      SuiteRun rerun = run_all_claims(threads);
      if (rerun.transcript != base.transcript) {
        r.pass = false;
        r.notes.push_back("transcript at " + std::to_string(threads) +
                          " threads differs from the single-thread run");
      }
    }
    results.push_back(r);
  }

  int failures = 0;
  for (const CriterionResult& r : results) {
    std::cout << "criterion " << (r.number < 10 ? " " : "") << r.number << " "
              << (r.pass ? "[PASS] " : "[FAIL] ") << r.text << "\n";
    if (!r.pass) {
      ++failures;
      for (const std::string& n : r.notes) std::cout << "        note: " << n << "\n";
    }
  }
  std::cout << "criteria: " << (results.size() - failures) << " pass, " << failures << " fail";
  if (failures == 1 && !results[6].pass)
    std::cout << " (criterion 7: the n=3 patch cannot fail consistency)";
  std::cout << "\n";
  return failures;
}
