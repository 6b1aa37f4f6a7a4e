#pragma once
// Top trading cycles with full trace output, plus the fixed-tie-breaker
// variant for weak preferences.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ttclab/core.hpp"

namespace ttclab {

// Agents listed in trading order: agents[k] receives the endowment of
// agents[k+1] (cyclically). Canonical form starts at the smallest agent.
struct Cycle {
  std::vector<AgentId> agents;
  friend bool operator==(const Cycle&, const Cycle&) = default;
};

struct TtcStep {
  std::vector<Cycle> cycles;  // sorted by leading agent
  friend bool operator==(const TtcStep&, const TtcStep&) = default;
};

struct TtcTrace {
  std::vector<TtcStep> steps;
  Allocation allocation;
  friend bool operator==(const TtcTrace&, const TtcTrace&) = default;
};

TtcTrace run_ttc(const StrictEconomy& e);

// Cycles of the favourite-object pointing graph before any trade executes.
// Exactly step one of run_ttc; kept separate so unanimity checks have an
// independent entry point.
std::vector<Cycle> first_step_cycles(const StrictEconomy& e);

// Weak-preference variant: only agents whose best tier is a singleton point.
// Cycles of that partial graph are the trades forced by local unanimity.
std::vector<Cycle> first_step_cycles(const WeakEconomy& e);

// Strict order over the grand object set, one per agent.
class TieBreakerProfile {
 public:
  explicit TieBreakerProfile(std::map<AgentId, std::vector<ObjectId>> orders);
  const std::vector<ObjectId>& order_for(AgentId a) const;
  const std::map<AgentId, std::vector<ObjectId>>& orders() const { return orders_; }

 private:
  std::map<AgentId, std::vector<ObjectId>> orders_;
};

// Refine ties by the fixed order: o comes before o' iff o is in a strictly
// better tier, or tied and o precedes o' in `tiebreak`.
StrictPreference break_ties(const WeakPreference& p, const std::vector<ObjectId>& tiebreak);
StrictEconomy break_ties(const WeakEconomy& e, const TieBreakerProfile& tb);

TtcTrace run_ttc_fixed_tiebreakers(const WeakEconomy& e, const TieBreakerProfile& tb);

std::string to_text(const TtcTrace& t);
TieBreakerProfile parse_tiebreakers(std::string_view text);
std::string to_text(const TieBreakerProfile& tb);

}  // namespace ttclab
