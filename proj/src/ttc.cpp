#include "ttclab/ttc.hpp"

#include <algorithm>
#include <sstream>

namespace ttclab {

namespace {

// Cycles of a (possibly partial) pointing map over `agents`. succ_of maps an
// agent to the agent whose endowment it points at, or -1 for "does not
// point". Cycles come out rotated to their smallest agent and sorted.
std::vector<Cycle> pointing_cycles(const std::vector<AgentId>& agents,
                                   const std::vector<int>& succ_of) {
  std::vector<signed char> state(succ_of.size(), 0);  // 0 new, 1 on path, 2 done
  std::vector<Cycle> cycles;
  std::vector<AgentId> path;
  for (AgentId start : agents) {
    if (state[start] != 0) continue;
    path.clear();
    int a = start;
    while (a != -1 && state[a] == 0) {
      state[a] = 1;
      path.push_back(a);
      a = succ_of[a];
    }
    if (a != -1 && state[a] == 1) {
      // Closed a fresh cycle: the tail of `path` from `a` onwards.
      auto it = std::find(path.begin(), path.end(), a);
      Cycle c;
      c.agents.assign(it, path.end());
      auto min_it = std::min_element(c.agents.begin(), c.agents.end());
      std::rotate(c.agents.begin(), min_it, c.agents.end());
      cycles.push_back(std::move(c));
    }
    for (AgentId v : path) state[v] = 2;
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const Cycle& x, const Cycle& y) { return x.agents.front() < y.agents.front(); });
  return cycles;
}

}  // namespace

TtcTrace run_ttc(const StrictEconomy& e) {
  const Market& m = e.market();
  int max_id = m.agents().back();
  std::vector<char> active(max_id + 1, 0);
  std::vector<int> cursor(max_id + 1, 0);  // position in own preference order
  std::vector<int> assigned(max_id + 1, -1);
  for (AgentId a : m.agents()) active[a] = 1;

  std::vector<TtcStep> steps;
  std::vector<AgentId> remaining = m.agents();
  std::vector<int> succ(max_id + 1, -1);
  while (!remaining.empty()) {
    for (AgentId a : remaining) {
      const auto& order = e.pref_of(a).order();
      while (!active[order[cursor[a]]]) ++cursor[a];  // objects exit with their owners
      succ[a] = order[cursor[a]];
    }
    TtcStep step;
    step.cycles = pointing_cycles(remaining, succ);
    for (const Cycle& c : step.cycles)
      for (size_t k = 0; k < c.agents.size(); ++k) {
        AgentId a = c.agents[k];
        assigned[a] = succ[a];
        active[a] = 0;
      }
    std::erase_if(remaining, [&](AgentId a) { return assigned[a] != -1; });
    steps.push_back(std::move(step));
  }

  std::vector<ObjectId> objects;
  objects.reserve(m.size());
  for (AgentId a : m.agents()) objects.push_back(assigned[a]);
  return TtcTrace{std::move(steps), Allocation(m, std::move(objects))};
}

std::vector<Cycle> first_step_cycles(const StrictEconomy& e) {
  int max_id = e.market().agents().back();
  std::vector<int> succ(max_id + 1, -1);
  for (AgentId a : e.market().agents()) succ[a] = e.pref_of(a).top();
  return pointing_cycles(e.market().agents(), succ);
}

std::vector<Cycle> first_step_cycles(const WeakEconomy& e) {
  int max_id = e.market().agents().back();
  std::vector<int> succ(max_id + 1, -1);
  for (AgentId a : e.market().agents())
    if (auto t = e.pref_of(a).unique_top()) succ[a] = *t;
  return pointing_cycles(e.market().agents(), succ);
}

TieBreakerProfile::TieBreakerProfile(std::map<AgentId, std::vector<ObjectId>> orders)
    : orders_(std::move(orders)) {
  if (orders_.empty()) throw Error("tie-breaker profile must cover at least one agent");
  for (const auto& [agent, order] : orders_) {
    (void)agent;
    StrictPreference check{order};  // validates distinctness
  }
}

const std::vector<ObjectId>& TieBreakerProfile::order_for(AgentId a) const {
  auto it = orders_.find(a);
  if (it == orders_.end()) throw Error("tie-breaker profile missing an agent");
  return it->second;
}

StrictPreference break_ties(const WeakPreference& p, const std::vector<ObjectId>& tiebreak) {
  std::vector<int> pos(128, -1);
  for (size_t i = 0; i < tiebreak.size(); ++i) pos[tiebreak[i]] = static_cast<int>(i);
  std::vector<ObjectId> order;
  for (const auto& tier : p.tiers()) {
    size_t begin = order.size();
    for (ObjectId o : tier) {
      if (pos[o] < 0) throw Error("tie-breaker order does not cover the preference's objects");
      order.push_back(o);
    }
    std::sort(order.begin() + begin, order.end(),
              [&](ObjectId a, ObjectId b) { return pos[a] < pos[b]; });
  }
  return StrictPreference(std::move(order));
}

StrictEconomy break_ties(const WeakEconomy& e, const TieBreakerProfile& tb) {
  std::vector<StrictPreference> prefs;
  prefs.reserve(e.market().size());
  for (AgentId a : e.market().agents())
    prefs.push_back(break_ties(e.pref_of(a), tb.order_for(a)));
  return StrictEconomy(e.market(), std::move(prefs), unchecked);
}

TtcTrace run_ttc_fixed_tiebreakers(const WeakEconomy& e, const TieBreakerProfile& tb) {
  return run_ttc(break_ties(e, tb));
}

std::string to_text(const TtcTrace& t) {
  std::ostringstream out;
  for (size_t s = 0; s < t.steps.size(); ++s) {
    out << "step " << s + 1 << ":";
    for (const Cycle& c : t.steps[s].cycles) {
      out << " (";
      for (size_t k = 0; k < c.agents.size(); ++k) {
        if (k) out << ' ';
        out << c.agents[k];
      }
      out << ')';
    }
    out << '\n';
  }
  out << "allocation: " << to_text(t.allocation) << '\n';
  return out.str();
}

TieBreakerProfile parse_tiebreakers(std::string_view text) {
  std::map<AgentId, std::vector<ObjectId>> orders;
  for (const auto& [agent, body] : parse_agent_lines(text))
    orders[agent] = parse_strict_preference(body).order();
  return TieBreakerProfile(std::move(orders));
}

std::string to_text(const TieBreakerProfile& tb) {
  std::ostringstream out;
  for (const auto& [agent, order] : tb.orders())
    out << agent << ": " << to_text(StrictPreference{order}) << '\n';
  return out.str();
}

}  // namespace ttclab
