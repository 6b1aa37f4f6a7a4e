#pragma once
// The mechanism catalog: TTC, the no-trade and first-step-only foils, the
// restricted-domain counterexample mechanisms, and the weak-preference
// constructions built around TTC with fixed tie-breakers.

#include <functional>
#include <optional>
#include <string>

#include "ttclab/core.hpp"
#include "ttclab/ttc.hpp"

namespace ttclab {

enum class PopulationMode { kFixed, kVariable };

// Deterministic map from admissible economies to allocations. Fixed-mode
// mechanisms only accept their grand market; variable-mode ones accept any
// market they are defined for.
template <class Pref>
struct Mechanism {
  std::string name;
  PopulationMode mode = PopulationMode::kVariable;
  std::function<Allocation(const Economy<Pref>&)> eval;

  Allocation operator()(const Economy<Pref>& e) const { return eval(e); }
};

using StrictMechanism = Mechanism<StrictPreference>;
using WeakMechanism = Mechanism<WeakPreference>;

template <class Pref>
Mechanism<Pref> no_trade_mechanism() {
  return {"no-trade", PopulationMode::kVariable,
          [](const Economy<Pref>& e) { return no_trade_allocation(e.market()); }};
}

StrictMechanism ttc_mechanism();

// Agents in a first-step cycle trade; everyone else keeps their endowment.
StrictMechanism first_step_only_mechanism();

// Single-peaked counterexample (needs n >= 4): on profiles matching its
// exceptional pattern the first three agents trade along the cycle 1->3->2->1;
// elsewhere it coincides with TTC. Rejects non-single-peaked profiles.
StrictMechanism single_peaked_example_mechanism(int n);

// Single-dipped counterexample: agents 1 and n swap exactly when each ranks
// the other's endowment first; otherwise nobody trades. Rejects
// non-single-dipped profiles.
StrictMechanism single_dipped_example_mechanism(int n);

WeakMechanism ttc_fixed_tiebreakers_mechanism(TieBreakerProfile tb);

// Same tie-breaker order for every agent of the grand market.
TieBreakerProfile uniform_tiebreak(const Market& grand, const std::vector<ObjectId>& order);

// Dispatch on whether the queried market is the whole grand set.
template <class Pref>
Mechanism<Pref> market_patchwork_mechanism(Market grand, Mechanism<Pref> on_grand,
                                           Mechanism<Pref> elsewhere);

// Three-agent weak-preference construction that is manipulable but satisfies
// the other axioms: it follows TTC with one fixed tie-breaker profile except
// on an exceptional family of profiles, where it switches to another.
WeakMechanism sp_violator_mechanism();

// Three-agent weak-preference construction that is bossy but satisfies the
// other axioms: on its exceptional family it fixes the three-cycle
// 1->o2, 2->o3, 3->o1.
WeakMechanism bossy_mechanism();

// CLI-facing catalog.
std::vector<std::string> strict_mechanism_names();
std::vector<std::string> weak_mechanism_names();
StrictMechanism make_strict_mechanism(const std::string& name, int n);
WeakMechanism make_weak_mechanism(const std::string& name, const Market& grand,
                                  const std::optional<TieBreakerProfile>& tb,
                                  const std::optional<TieBreakerProfile>& tb_rest);

}  // namespace ttclab
