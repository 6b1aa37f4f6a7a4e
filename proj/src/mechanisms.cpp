#include "ttclab/mechanisms.hpp"

#include <algorithm>

#include "ttclab/domains.hpp"

namespace ttclab {

namespace {

void require_grand(const Market& got, int n, const char* who) {
  if (!(got == Market::grand(n))) throw Error(std::string(who) + ": economy must be over the full market");
}

std::vector<ObjectId> ascending_axis(const Market& m) { return m.objects(); }

}  // namespace

StrictMechanism ttc_mechanism() {
  return {"ttc", PopulationMode::kVariable,
          [](const StrictEconomy& e) { return run_ttc(e).allocation; }};
}

StrictMechanism first_step_only_mechanism() {
  return {"first-step", PopulationMode::kVariable, [](const StrictEconomy& e) {
            const Market& m = e.market();
            std::vector<ObjectId> objects = m.objects();  // default: keep endowments
            for (const Cycle& c : first_step_cycles(e)) {
              size_t len = c.agents.size();
              for (size_t k = 0; k < len; ++k)
                objects[m.position_of(c.agents[k])] = c.agents[(k + 1) % len];
            }
            return Allocation(m, std::move(objects));
          }};
}

StrictMechanism single_peaked_example_mechanism(int n) {
  if (n < 4) throw Error("single-peaked example needs at least four agents");
  return {"sp-example", PopulationMode::kFixed, [n](const StrictEconomy& e) {
            require_grand(e.market(), n, "sp-example");
            std::vector<ObjectId> axis = ascending_axis(e.market());
            for (AgentId a : e.market().agents())
              if (!is_single_peaked(e.pref_of(a), axis))
                throw Error("sp-example: profile is not single-peaked");

            auto leads_with = [&](AgentId a, std::initializer_list<ObjectId> front) {
              const auto& order = e.pref_of(a).order();
              size_t k = 0;
              for (ObjectId o : front)
                if (order[k++] != o) return false;
              return true;
            };
            bool exceptional = leads_with(1, {4, 3, 2, 1}) && leads_with(2, {1, 2, 3, 4}) &&
                               leads_with(3, {1, 2, 3, 4});
            for (AgentId a = 4; a <= n && exceptional; ++a)
              exceptional = e.pref_of(a).top() == a;
            if (!exceptional) return run_ttc(e).allocation;

            std::vector<ObjectId> objects = e.market().objects();
            objects[0] = 3;  // agent 1
            objects[1] = 1;  // agent 2
            objects[2] = 2;  // agent 3
            return Allocation(e.market(), std::move(objects));
          }};
}

StrictMechanism single_dipped_example_mechanism(int n) {
  if (n < 2) throw Error("single-dipped example needs at least two agents");
  return {"sd-example", PopulationMode::kFixed, [n](const StrictEconomy& e) {
            require_grand(e.market(), n, "sd-example");
            std::vector<ObjectId> axis = ascending_axis(e.market());
            for (AgentId a : e.market().agents())
              if (!is_single_dipped(e.pref_of(a), axis))
                throw Error("sd-example: profile is not single-dipped");

            std::vector<ObjectId> objects = e.market().objects();
            if (e.pref_of(1).top() == n && e.pref_of(n).top() == 1) {
              objects.front() = n;
              objects.back() = 1;
            }
            return Allocation(e.market(), std::move(objects));
          }};
}

WeakMechanism ttc_fixed_tiebreakers_mechanism(TieBreakerProfile tb) {
  return {"ttc-tb", PopulationMode::kVariable, [tb = std::move(tb)](const WeakEconomy& e) {
            return run_ttc_fixed_tiebreakers(e, tb).allocation;
          }};
}

TieBreakerProfile uniform_tiebreak(const Market& grand, const std::vector<ObjectId>& order) {
  std::map<AgentId, std::vector<ObjectId>> orders;
  for (AgentId a : grand.agents()) orders[a] = order;
  return TieBreakerProfile(std::move(orders));
}

template <class Pref>
Mechanism<Pref> market_patchwork_mechanism(Market grand, Mechanism<Pref> on_grand,
                                           Mechanism<Pref> elsewhere) {
  std::string name = "patchwork(" + on_grand.name + "|" + elsewhere.name + ")";
  return {std::move(name), PopulationMode::kVariable,
          [grand = std::move(grand), on_grand = std::move(on_grand),
           elsewhere = std::move(elsewhere)](const Economy<Pref>& e) {
            if (!e.market().is_subset_of(grand))
              throw Error("patchwork: market outside the grand set");
            return e.market() == grand ? on_grand(e) : elsewhere(e);
          }};
}

template StrictMechanism market_patchwork_mechanism(Market, StrictMechanism, StrictMechanism);
template WeakMechanism market_patchwork_mechanism(Market, WeakMechanism, WeakMechanism);

namespace {

bool top_tier_is(const WeakPreference& p, std::vector<ObjectId> objects) {
  std::sort(objects.begin(), objects.end());
  return p.tiers().front() == objects;
}

}  // namespace

WeakMechanism sp_violator_mechanism() {
  Market grand = Market::grand(3);
  TieBreakerProfile primary = uniform_tiebreak(grand, {3, 2, 1});
  TieBreakerProfile exceptional({{1, {2, 3, 1}}, {2, {3, 2, 1}}, {3, {3, 2, 1}}});
  return {"sp-violator", PopulationMode::kVariable,
          [grand, primary, exceptional](const WeakEconomy& e) {
            if (!e.market().is_subset_of(grand))
              throw Error("sp-violator: market outside the grand set");
            if (e.market() == grand && top_tier_is(e.pref_of(1), {2, 3}) &&
                e.pref_of(2).unique_top() == std::optional<ObjectId>(1) &&
                e.pref_of(3).unique_top() == std::optional<ObjectId>(1))
              return run_ttc_fixed_tiebreakers(e, exceptional).allocation;
            return run_ttc_fixed_tiebreakers(e, primary).allocation;
          }};
}

WeakMechanism bossy_mechanism() {
  Market grand = Market::grand(3);
  TieBreakerProfile primary({{1, {3, 2, 1}}, {2, {1, 3, 2}}, {3, {1, 2, 3}}});
  return {"bossy", PopulationMode::kVariable, [grand, primary](const WeakEconomy& e) {
            if (!e.market().is_subset_of(grand)) throw Error("bossy: market outside the grand set");
            if (e.market() == grand && top_tier_is(e.pref_of(1), {2, 3}) &&
                e.pref_of(2).prefers(3, 2) && e.pref_of(3).tier_of(1) == 0)
              return Allocation(grand, {2, 3, 1});
            return run_ttc_fixed_tiebreakers(e, primary).allocation;
          }};
}

std::vector<std::string> strict_mechanism_names() {
  return {"ttc", "no-trade", "first-step", "sp-example", "sd-example"};
}

std::vector<std::string> weak_mechanism_names() {
  return {"ttc-tb", "no-trade", "patchwork", "sp-violator", "bossy"};
}

StrictMechanism make_strict_mechanism(const std::string& name, int n) {
  if (name == "ttc") return ttc_mechanism();
  if (name == "no-trade") return no_trade_mechanism<StrictPreference>();
  if (name == "first-step") return first_step_only_mechanism();
  if (name == "sp-example") return single_peaked_example_mechanism(n);
  if (name == "sd-example") return single_dipped_example_mechanism(n);
  throw Error("unknown strict-mode mechanism: " + name);
}

WeakMechanism make_weak_mechanism(const std::string& name, const Market& grand,
                                  const std::optional<TieBreakerProfile>& tb,
                                  const std::optional<TieBreakerProfile>& tb_rest) {
  if (name == "ttc-tb") {
    if (!tb) throw Error("ttc-tb requires a tie-breaker profile");
    return ttc_fixed_tiebreakers_mechanism(*tb);
  }
  if (name == "no-trade") return no_trade_mechanism<WeakPreference>();
  if (name == "patchwork") {
    if (!tb || !tb_rest) throw Error("patchwork requires two tie-breaker profiles");
    return market_patchwork_mechanism(grand, ttc_fixed_tiebreakers_mechanism(*tb),
                                      ttc_fixed_tiebreakers_mechanism(*tb_rest));
  }
  if (name == "sp-violator") return sp_violator_mechanism();
  if (name == "bossy") return bossy_mechanism();
  throw Error("unknown weak-mode mechanism: " + name);
}

}  // namespace ttclab
