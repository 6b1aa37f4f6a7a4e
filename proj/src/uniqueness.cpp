#include "ttclab/uniqueness.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "ttclab/ttc.hpp"

namespace ttclab {

// --- AllocationUniverse ------------------------------------------------------

AllocationUniverse::AllocationUniverse(const Market& market) : market_(market) {
  std::vector<ObjectId> objects = market.objects();
  do {
    allocs_.push_back(objects);
  } while (std::next_permutation(objects.begin(), objects.end()));
  if (allocs_.size() > 64)
    throw CapExceeded("allocation universe exceeds 64 (market too large for the prover)");
  full_mask_ = allocs_.size() == 64 ? ~std::uint64_t{0}
                                    : (std::uint64_t{1} << allocs_.size()) - 1;
  int max_id = market.agents().back();
  assign_mask_.assign(market.size(), std::vector<std::uint64_t>(max_id + 1, 0));
  for (size_t idx = 0; idx < allocs_.size(); ++idx)
    for (int pos = 0; pos < market.size(); ++pos)
      assign_mask_[pos][allocs_[idx][pos]] |= std::uint64_t{1} << idx;
}

Allocation AllocationUniverse::allocation_at(int idx) const {
  return Allocation(market_, allocs_[idx]);
}

int AllocationUniverse::index_of(const std::vector<ObjectId>& objects) const {
  auto it = std::lower_bound(allocs_.begin(), allocs_.end(), objects);
  if (it == allocs_.end() || *it != objects) return -1;
  return static_cast<int>(it - allocs_.begin());
}

std::uint64_t AllocationUniverse::assigning(int pos, ObjectId o) const {
  return assign_mask_[pos][o];
}

// --- MechanismTable ----------------------------------------------------------

MechanismTable::MechanismTable(const StrictDomain& d, const Caps& caps)
    : dom_(&d), space_(d, caps.max_profiles), universe_(d.market) {
  offer_rank_.resize(d.per_agent.size());
  for (size_t pos = 0; pos < d.per_agent.size(); ++pos) {
    offer_rank_[pos].resize(d.per_agent[pos].size());
    for (size_t digit = 0; digit < d.per_agent[pos].size(); ++digit) {
      auto& row = offer_rank_[pos][digit];
      row.resize(universe_.size());
      for (int a = 0; a < universe_.size(); ++a)
        row[a] = static_cast<std::int8_t>(
            d.per_agent[pos][digit].rank_of(universe_.objects_of(a)[pos]));
    }
  }
  masks_.assign(space_.size(), universe_.full_mask());
}

int MechanismTable::candidate_count(std::uint64_t p) const {
  return std::popcount(masks_[p]);
}

int MechanismTable::sole_candidate(std::uint64_t p) const {
  if (candidate_count(p) != 1) throw Error("profile is not decided");
  return std::countr_zero(masks_[p]);
}

std::uint64_t MechanismTable::decided_count() const {
  std::uint64_t n = 0;
  for (std::uint64_t m : masks_) n += std::popcount(m) == 1;
  return n;
}

// --- seeding -----------------------------------------------------------------

bool seed_local_unanimity(MechanismTable& table, const AxiomSet& axioms) {
  const StrictDomain& d = table.domain();
  const Market& market = d.market;
  bool sp_active = axioms.strategy_proofness || axioms.gsp_max_coalition != 0;
  bool filter_ir = sp_active && check_top_one_richness(d);
  // Individually rational candidates per (position, digit).
  std::vector<std::vector<std::uint64_t>> ir_mask;
  if (filter_ir) {
    ir_mask.resize(d.per_agent.size());
    for (size_t pos = 0; pos < d.per_agent.size(); ++pos) {
      ir_mask[pos].resize(d.per_agent[pos].size());
      for (size_t digit = 0; digit < d.per_agent[pos].size(); ++digit) {
        int endow = d.per_agent[pos][digit].rank_of(market.agents()[pos]);
        std::uint64_t ok = 0;
        for (int a = 0; a < table.universe().size(); ++a)
          if (table.offer_rank(static_cast<int>(pos), static_cast<int>(digit), a) <= endow)
            ok |= std::uint64_t{1} << a;
        ir_mask[pos][digit] = ok;
      }
    }
  }
  std::vector<int> digits;
  for (std::uint64_t p = 0; p < table.space().size(); ++p) {
    StrictEconomy e = table.space().economy_at(p);
    std::uint64_t mask = table.mask(p);
    for (const Cycle& c : first_step_cycles(e))
      for (size_t k = 0; k < c.agents.size(); ++k)
        mask &= table.universe().assigning(market.position_of(c.agents[k]),
                                           c.agents[(k + 1) % c.agents.size()]);
    if (filter_ir) {
      table.space().digits_at(p, digits);
      for (int pos = 0; pos < market.size(); ++pos) mask &= ir_mask[pos][digits[pos]];
    }
    table.set_mask(p, mask);
    if (mask == 0) return false;
  }
  return true;
}

// --- propagation -------------------------------------------------------------

namespace {

// Two-sided prune across one unilateral-deviation edge. The agent at `pos`
// reports `digits[pos]` truthfully at p and `alt` at p2; ranks are measured
// with the truth at p. Returns true when something changed; empties are the
// caller's to detect.
bool revise_sp_pair(MechanismTable& t, std::uint64_t p, const std::vector<int>& digits, int pos,
                    int alt) {
  std::uint64_t p2 = t.space().replace_digit(p, pos, digits[pos], alt);
  std::uint64_t cand_p = t.mask(p);
  std::uint64_t cand_q = t.mask(p2);
  if (cand_p == 0 || cand_q == 0) return false;
  int digit = digits[pos];
  int worst_q = -1, best_p = 127;
  for (std::uint64_t m = cand_q; m; m &= m - 1)
    worst_q = std::max(worst_q, t.offer_rank(pos, digit, std::countr_zero(m)));
  for (std::uint64_t m = cand_p; m; m &= m - 1)
    best_p = std::min(best_p, t.offer_rank(pos, digit, std::countr_zero(m)));
  std::uint64_t new_p = 0, new_q = 0;
  for (std::uint64_t m = cand_p; m; m &= m - 1) {
    int a = std::countr_zero(m);
    if (t.offer_rank(pos, digit, a) <= worst_q) new_p |= std::uint64_t{1} << a;
  }
  for (std::uint64_t m = cand_q; m; m &= m - 1) {
    int a = std::countr_zero(m);
    if (t.offer_rank(pos, digit, a) >= best_p) new_q |= std::uint64_t{1} << a;
  }
  bool changed = new_p != cand_p || new_q != cand_q;
  t.set_mask(p, new_p);
  t.set_mask(p2, new_q);
  return changed;
}

// One coalition deviation edge: positions in `combo` jointly report `reports`
// instead of their digits at p. Forbidden pairs (a at truth, a2 after): all
// members weakly gain and someone strictly.
bool revise_gsp_pair(MechanismTable& t, std::uint64_t p, const std::vector<int>& digits,
                     const std::vector<int>& combo, const std::vector<int>& reports) {
  std::uint64_t p2 = p;
  for (size_t i = 0; i < combo.size(); ++i)
    p2 = t.space().replace_digit(p2, combo[i], digits[combo[i]], reports[i]);
  if (p2 == p) return false;
  std::uint64_t cand_p = t.mask(p);
  std::uint64_t cand_q = t.mask(p2);
  if (cand_p == 0 || cand_q == 0) return false;
  auto forbidden = [&](int a, int a2) {
    bool strict = false;
    for (size_t i = 0; i < combo.size(); ++i) {
      int pos = combo[i];
      int now = t.offer_rank(pos, digits[pos], a2);
      int was = t.offer_rank(pos, digits[pos], a);
      if (now > was) return false;
      if (now < was) strict = true;
    }
    return strict;
  };
  std::uint64_t new_p = 0, new_q = cand_q;
  for (std::uint64_t m = cand_p; m; m &= m - 1) {
    int a = std::countr_zero(m);
    bool all_forbidden = true;
    for (std::uint64_t m2 = cand_q; m2; m2 &= m2 - 1)
      if (!forbidden(a, std::countr_zero(m2))) {
        all_forbidden = false;
        break;
      }
    if (!all_forbidden) new_p |= std::uint64_t{1} << a;
  }
  for (std::uint64_t m2 = cand_q; m2; m2 &= m2 - 1) {
    int a2 = std::countr_zero(m2);
    bool all_forbidden = true;
    for (std::uint64_t m = cand_p; m; m &= m - 1)
      if (!forbidden(std::countr_zero(m), a2)) {
        all_forbidden = false;
        break;
      }
    if (all_forbidden) new_q &= ~(std::uint64_t{1} << a2);
  }
  bool changed = new_p != cand_p || new_q != cand_q;
  t.set_mask(p, new_p);
  t.set_mask(p2, new_q);
  return changed;
}

// Reduction constraint between a market's table and a submarket's: when a
// candidate hands the removed agents exactly their own endowments (as a set),
// its restriction must remain available downstairs, and vice versa.
struct LinkEdge {
  int sub;                                  // table index of the kept market
  unsigned kept_mask;                       // positions kept, in `mi`'s market
  std::vector<std::vector<int>> digit_map;  // [pos][digit] -> kept digit
  std::vector<int> restr;                   // [alloc] -> sub alloc, -1 if not removable
};

struct Linked {
  std::vector<MechanismTable*> tables;
  std::vector<std::vector<LinkEdge>> edges;  // per table index
};

bool revise_link(Linked& link, int mi, std::uint64_t p, const std::vector<int>& digits,
                 const LinkEdge& e) {
  MechanismTable& t = *link.tables[mi];
  MechanismTable& s = *link.tables[e.sub];
  std::vector<int> sub_digits;
  for (int pos = 0; pos < t.space().agent_count(); ++pos)
    if ((e.kept_mask >> pos) & 1) sub_digits.push_back(e.digit_map[pos][digits[pos]]);
  std::uint64_t q = s.space().index_of(sub_digits);
  std::uint64_t cand_p = t.mask(p);
  std::uint64_t cand_q = s.mask(q);
  if (cand_p == 0 || cand_q == 0) return false;
  std::uint64_t new_p = 0;
  bool wildcard = false;
  std::uint64_t reachable = 0;
  for (std::uint64_t m = cand_p; m; m &= m - 1) {
    int a = std::countr_zero(m);
    if (e.restr[a] < 0) {
      new_p |= std::uint64_t{1} << a;
      wildcard = true;
    } else {
      if ((cand_q >> e.restr[a]) & 1) new_p |= std::uint64_t{1} << a;
      reachable |= std::uint64_t{1} << e.restr[a];
    }
  }
  std::uint64_t new_q = wildcard ? cand_q : (cand_q & reachable);
  bool changed = new_p != cand_p || new_q != cand_q;
  t.set_mask(p, new_p);
  s.set_mask(q, new_q);
  return changed;
}

class Prop {
 public:
  Prop(std::vector<MechanismTable*> tables, const AxiomSet& axioms,
       std::vector<std::vector<LinkEdge>> edges)
      : axioms_(axioms) {
    link_.tables = std::move(tables);
    link_.edges = std::move(edges);
  }

  // Chaotic iteration to the (unique) fixpoint; false iff a set empties.
  bool run() {
    while (true) {
      bool changed = false;
      for (size_t mi = 0; mi < link_.tables.size(); ++mi) {
        MechanismTable& t = *link_.tables[mi];
        int m = t.space().agent_count();
        int gsp = axioms_.gsp_max_coalition;
        if (gsp < 0 || gsp > m) gsp = m;
        for (std::uint64_t p = 0; p < t.space().size(); ++p) {
          if (t.mask(p) == 0) return false;
          t.space().digits_at(p, digits_);
          if (axioms_.strategy_proofness)
            for (int pos = 0; pos < m; ++pos)
              for (int alt = 0; alt < t.space().domain_size(pos); ++alt) {
                if (alt == digits_[pos]) continue;
                changed |= revise_sp_pair(t, p, digits_, pos, alt);
                if (t.mask(p) == 0) return false;
              }
          if (gsp > 0) changed |= gsp_edges(t, p, gsp);
          if (t.mask(p) == 0) return false;
          for (const LinkEdge& e : link_.edges.empty() ? kNoEdges : link_.edges[mi]) {
            changed |= revise_link(link_, static_cast<int>(mi), p, digits_, e);
            if (t.mask(p) == 0) return false;
          }
        }
      }
      if (!changed) break;
    }
    for (MechanismTable* t : link_.tables)
      for (std::uint64_t p = 0; p < t->space().size(); ++p)
        if (t->mask(p) == 0) return false;
    return true;
  }

 private:
  bool gsp_edges(MechanismTable& t, std::uint64_t p, int k) {
    int m = t.space().agent_count();
    bool changed = false;
    std::vector<int> combo, reports;
    for (int size = 1; size <= k; ++size) {
      combo.resize(size);
      for (int i = 0; i < size; ++i) combo[i] = i;
      while (true) {
        reports.assign(size, 0);
        while (true) {
          changed |= revise_gsp_pair(t, p, digits_, combo, reports);
          if (t.mask(p) == 0) return changed;
          int i = size - 1;
          while (i >= 0 && reports[i] + 1 >= t.space().domain_size(combo[i])) {
            reports[i] = 0;
            --i;
          }
          if (i < 0) break;
          ++reports[i];
        }
        int i = size - 1;
        while (i >= 0 && combo[i] == m - size + i) --i;
        if (i < 0) break;
        ++combo[i];
        for (int j = i + 1; j < size; ++j) combo[j] = combo[j - 1] + 1;
      }
    }
    return changed;
  }

  AxiomSet axioms_;
  Linked link_;
  std::vector<int> digits_;
  static const std::vector<LinkEdge> kNoEdges;
};

const std::vector<LinkEdge> Prop::kNoEdges{};

}  // namespace

bool propagate_sp(MechanismTable& table, unsigned shuffle_seed) {
  struct Edge {
    std::uint64_t p;
    int pos;
    int alt;
  };
  std::vector<Edge> edges;
  int m = table.space().agent_count();
  std::vector<int> digits;
  for (std::uint64_t p = 0; p < table.space().size(); ++p) {
    table.space().digits_at(p, digits);
    for (int pos = 0; pos < m; ++pos)
      for (int alt = 0; alt < table.space().domain_size(pos); ++alt)
        if (alt != digits[pos]) edges.push_back({p, pos, alt});
  }
  if (shuffle_seed != 0) {
    std::mt19937 rng(shuffle_seed);
    std::shuffle(edges.begin(), edges.end(), rng);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Edge& e : edges) {
      table.space().digits_at(e.p, digits);
      changed |= revise_sp_pair(table, e.p, digits, e.pos, e.alt);
      if (table.mask(e.p) == 0) return false;
    }
  }
  for (std::uint64_t p = 0; p < table.space().size(); ++p)
    if (table.mask(p) == 0) return false;
  return true;
}

// --- table-backed mechanisms ---------------------------------------------------

namespace {

// Digits of an economy inside a domain's profile space, or failure.
bool digits_of_economy(const StrictDomain& d, const StrictEconomy& e, std::vector<int>& digits) {
  digits.clear();
  for (size_t pos = 0; pos < d.per_agent.size(); ++pos) {
    const auto& list = d.per_agent[pos];
    auto it = std::lower_bound(list.begin(), list.end(), e.pref_at(static_cast<int>(pos)));
    if (it == list.end() || !(*it == e.pref_at(static_cast<int>(pos)))) return false;
    digits.push_back(static_cast<int>(it - list.begin()));
  }
  return true;
}

struct TableState {
  StrictDomain domain;
  StrictProfileSpace space;
  AllocationUniverse universe;
  std::vector<std::uint32_t> choice;
  TableState(StrictDomain d, std::vector<std::uint32_t> c)
      : domain(std::move(d)), space(domain), universe(domain.market), choice(std::move(c)) {}
};

struct LinkedState {
  std::vector<std::shared_ptr<TableState>> per_market;
  std::map<std::vector<AgentId>, int> index;
};

}  // namespace

StrictMechanism table_mechanism(const StrictDomain& d, std::vector<std::uint32_t> choice,
                                std::string name) {
  if (choice.size() != StrictProfileSpace(d).size())
    throw Error("table size does not match the domain");
  auto st = std::make_shared<TableState>(d, std::move(choice));
  StrictMechanism mech;
  mech.name = std::move(name);
  mech.mode = PopulationMode::kFixed;
  mech.eval = [st](const StrictEconomy& e) {
    if (!(e.market() == st->domain.market))
      throw Error("table mechanism: economy market does not match");
    std::vector<int> digits;
    if (!digits_of_economy(st->domain, e, digits))
      throw Error("table mechanism: profile outside the domain");
    return st->universe.allocation_at(
        static_cast<int>(st->choice[st->space.index_of(digits)]));
  };
  return mech;
}

StrictMechanism linked_table_mechanism(const StrictDomainFamily& fam,
                                       std::vector<std::vector<std::uint32_t>> choice,
                                       std::string name) {
  auto st = std::make_shared<LinkedState>();
  std::vector<Market> markets = all_submarkets(fam.grand());
  if (choice.size() != markets.size()) throw Error("one table per submarket required");
  for (size_t i = 0; i < markets.size(); ++i) {
    st->per_market.push_back(
        std::make_shared<TableState>(fam.domain_for(markets[i]), std::move(choice[i])));
    st->index[markets[i].agents()] = static_cast<int>(i);
  }
  StrictMechanism mech;
  mech.name = std::move(name);
  mech.mode = PopulationMode::kVariable;
  mech.eval = [st](const StrictEconomy& e) {
    auto it = st->index.find(e.market().agents());
    if (it == st->index.end()) throw Error("table mechanism: unknown market");
    const TableState& ts = *st->per_market[it->second];
    std::vector<int> digits;
    if (!digits_of_economy(ts.domain, e, digits))
      throw Error("table mechanism: profile outside the domain");
    return ts.universe.allocation_at(static_cast<int>(ts.choice[ts.space.index_of(digits)]));
  };
  return mech;
}

std::vector<std::uint32_t> ttc_choices(const StrictDomain& d, const Caps& caps) {
  MechanismTable table(d, caps);
  std::vector<std::uint32_t> out(table.space().size());
  for (std::uint64_t p = 0; p < table.space().size(); ++p) {
    Allocation a = run_ttc(table.space().economy_at(p)).allocation;
    out[p] = static_cast<std::uint32_t>(table.universe().index_of(a.objects()));
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> ttc_linked_choices(const StrictDomainFamily& fam,
                                                           const Caps& caps) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const Market& m : all_submarkets(fam.grand()))
    out.push_back(ttc_choices(fam.domain_for(m), caps));
  return out;
}

std::vector<TableDiff> diff_vs_ttc(const StrictDomain& d, const std::vector<std::uint32_t>& choice,
                                   std::size_t limit) {
  std::vector<TableDiff> diffs;
  MechanismTable table(d, Caps{});
  std::vector<std::uint32_t> baseline = ttc_choices(d);
  for (std::uint64_t p = 0; p < baseline.size() && diffs.size() < limit; ++p) {
    if (choice[p] == baseline[p]) continue;
    TableDiff diff;
    diff.market = d.market;
    diff.profile_index = p;
    diff.profile = to_text(table.space().economy_at(p));
    diff.solution = to_text(table.universe().allocation_at(static_cast<int>(choice[p])));
    diff.baseline = to_text(table.universe().allocation_at(static_cast<int>(baseline[p])));
    diffs.push_back(std::move(diff));
  }
  return diffs;
}

std::vector<TableDiff> diff_vs_ttc_linked(const StrictDomainFamily& fam,
                                          const std::vector<std::vector<std::uint32_t>>& choice,
                                          std::size_t limit) {
  std::vector<TableDiff> diffs;
  std::vector<Market> markets = all_submarkets(fam.grand());
  for (size_t i = 0; i < markets.size() && diffs.size() < limit; ++i) {
    for (TableDiff& d : diff_vs_ttc(fam.domain_for(markets[i]), choice[i], limit - diffs.size()))
      diffs.push_back(std::move(d));
  }
  return diffs;
}

// --- search -------------------------------------------------------------------

namespace {

struct Searcher {
  std::vector<MechanismTable*> tables;
  Prop* prop;
  ProverOptions opt;
  std::vector<std::vector<std::vector<std::uint32_t>>> solutions;  // [solution][table][profile]
  SearchStats stats;
  bool refused = false;
  bool truncated = false;

  void record() {
    std::vector<std::vector<std::uint32_t>> sol;
    for (MechanismTable* t : tables) {
      std::vector<std::uint32_t> choice(t->space().size());
      for (std::uint64_t p = 0; p < t->space().size(); ++p)
        choice[p] = static_cast<std::uint32_t>(t->sole_candidate(p));
      sol.push_back(std::move(choice));
    }
    solutions.push_back(std::move(sol));
    if (solutions.size() >= opt.max_solutions) truncated = true;
  }

  void dfs() {
    if (refused || truncated) return;
    if (!prop->run()) {
      ++stats.backtracks;
      return;
    }
    int best_ti = -1;
    std::uint64_t best_p = 0;
    int best_count = 65;
    for (size_t ti = 0; ti < tables.size() && best_count > 2; ++ti)
      for (std::uint64_t p = 0; p < tables[ti]->space().size(); ++p) {
        int c = tables[ti]->candidate_count(p);
        if (c >= 2 && c < best_count) {
          best_count = c;
          best_ti = static_cast<int>(ti);
          best_p = p;
          if (c == 2) break;
        }
      }
    if (best_ti < 0) {
      record();
      return;
    }
    std::vector<std::vector<std::uint64_t>> saved;
    for (MechanismTable* t : tables) saved.push_back(t->masks());
    std::uint64_t cand = tables[best_ti]->mask(best_p);
    for (std::uint64_t m = cand; m; m &= m - 1) {
      int a = std::countr_zero(m);
      if (++stats.nodes > opt.branch_limit) {
        refused = true;
        return;
      }
      tables[best_ti]->set_mask(best_p, std::uint64_t{1} << a);
      dfs();
      for (size_t i = 0; i < tables.size(); ++i) tables[i]->masks() = saved[i];
      if (refused || truncated) return;
    }
  }
};

int normalized_gsp(const AxiomSet& axioms, int market_size) {
  int k = axioms.gsp_max_coalition;
  if (k < 0 || k > market_size) return market_size;
  return k;
}

void sort_and_dedup(std::vector<std::vector<std::vector<std::uint32_t>>>& sols) {
  std::sort(sols.begin(), sols.end());
  sols.erase(std::unique(sols.begin(), sols.end()), sols.end());
}

void require_pass(const CheckReport& rep, const std::string& what) {
  if (rep.verdict != Verdict::kPass)
    throw Error("prover solution failed independent re-verification: " + what);
}

}  // namespace

SearchResult search_all_mechanisms(const StrictDomain& d, const AxiomSet& axioms,
                                   const ProverOptions& opt, const Caps& caps) {
  if (axioms.consistency)
    throw Error("consistency requires the linked (variable-population) search");
  SearchResult result;
  try {
    MechanismTable table(d, caps);
    if (axioms.local_unanimity && !seed_local_unanimity(table, axioms)) {
      result.stats.complete = true;
      result.note = "seeding emptied a candidate set";
      return result;
    }
    Prop prop({&table}, axioms, {});
    Searcher searcher;
    searcher.tables = {&table};
    searcher.prop = &prop;
    searcher.opt = opt;
    searcher.dfs();
    result.refused = searcher.refused;
    result.stats = searcher.stats;
    result.stats.complete = !searcher.refused && !searcher.truncated;
    if (searcher.refused) result.note = "branch limit exceeded";
    if (searcher.truncated) result.note = "stopped after max_solutions";
    sort_and_dedup(searcher.solutions);
    for (auto& sol : searcher.solutions) result.solutions.push_back(std::move(sol[0]));
    // Independent re-verification with the axiom checkers.
    for (size_t i = 0; i < result.solutions.size(); ++i) {
      StrictMechanism mech =
          table_mechanism(d, result.solutions[i], "solution-" + std::to_string(i));
      if (axioms.local_unanimity) require_pass(check_local_unanimity(mech, d, caps), mech.name);
      if (axioms.strategy_proofness)
        require_pass(check_strategy_proofness(mech, d, caps), mech.name);
      if (axioms.gsp_max_coalition != 0)
        require_pass(check_group_strategy_proofness(mech, d, normalized_gsp(axioms, d.market.size()),
                                                    caps),
                     mech.name);
    }
  } catch (const CapExceeded& e) {
    result.refused = true;
    result.note = e.what();
    result.solutions.clear();
  }
  return result;
}

LinkedSearchResult search_linked_markets(const StrictDomainFamily& fam, const AxiomSet& axioms,
                                         const ProverOptions& opt, const Caps& caps) {
  LinkedSearchResult result;
  result.markets = all_submarkets(fam.grand());
  try {
    std::vector<std::unique_ptr<MechanismTable>> storage;
    std::vector<MechanismTable*> tables;
    std::map<std::vector<AgentId>, int> index;
    for (size_t i = 0; i < result.markets.size(); ++i) {
      storage.push_back(std::make_unique<MechanismTable>(fam.domain_for(result.markets[i]), caps));
      tables.push_back(storage.back().get());
      index[result.markets[i].agents()] = static_cast<int>(i);
    }
    if (axioms.local_unanimity)
      for (MechanismTable* t : tables)
        if (!seed_local_unanimity(*t, axioms)) {
          result.stats.complete = true;
          result.note = "seeding emptied a candidate set";
          return result;
        }
    // Consistency link edges per market.
    std::vector<std::vector<LinkEdge>> edges(tables.size());
    if (axioms.consistency) {
      for (size_t mi = 0; mi < tables.size(); ++mi) {
        const Market& market = result.markets[mi];
        int m = market.size();
        if (m < 2) continue;
        const StrictDomain& dom = tables[mi]->domain();
        for (unsigned removed = 1; removed + 1 < (1u << m); ++removed) {
          unsigned kept = ((1u << m) - 1) & ~removed;
          std::vector<AgentId> kept_agents, removed_agents;
          for (int pos = 0; pos < m; ++pos)
            (((kept >> pos) & 1) ? kept_agents : removed_agents).push_back(market.agents()[pos]);
          Market sub(kept_agents);
          LinkEdge e;
          e.sub = index.at(sub.agents());
          e.kept_mask = kept;
          const StrictDomain& sub_dom = tables[e.sub]->domain();
          e.digit_map.resize(m);
          for (int pos = 0; pos < m; ++pos) {
            if (!((kept >> pos) & 1)) continue;
            int sub_pos = sub.position_of(market.agents()[pos]);
            const auto& list = dom.per_agent[pos];
            const auto& sub_list = sub_dom.per_agent[sub_pos];
            e.digit_map[pos].resize(list.size());
            for (size_t digit = 0; digit < list.size(); ++digit) {
              StrictPreference r = restrict_preference(list[digit], sub);
              auto it = std::lower_bound(sub_list.begin(), sub_list.end(), r);
              if (it == sub_list.end() || !(*it == r))
                throw Error("domain family is not closed under restriction");
              e.digit_map[pos][digit] = static_cast<int>(it - sub_list.begin());
            }
          }
          const AllocationUniverse& uni = tables[mi]->universe();
          e.restr.resize(uni.size());
          std::vector<ObjectId> removed_sorted = removed_agents;  // endowments of removed
          for (int a = 0; a < uni.size(); ++a) {
            std::vector<ObjectId> got;
            for (int pos = 0; pos < m; ++pos)
              if ((removed >> pos) & 1) got.push_back(uni.objects_of(a)[pos]);
            std::sort(got.begin(), got.end());
            if (got != removed_sorted) {
              e.restr[a] = -1;
              continue;
            }
            std::vector<ObjectId> kept_objs;
            for (int pos = 0; pos < m; ++pos)
              if ((kept >> pos) & 1) kept_objs.push_back(uni.objects_of(a)[pos]);
            e.restr[a] = tables[e.sub]->universe().index_of(kept_objs);
          }
          edges[mi].push_back(std::move(e));
        }
      }
    }
    Prop prop(tables, axioms, std::move(edges));
    Searcher searcher;
    searcher.tables = tables;
    searcher.prop = &prop;
    searcher.opt = opt;
    searcher.dfs();
    result.refused = searcher.refused;
    result.stats = searcher.stats;
    result.stats.complete = !searcher.refused && !searcher.truncated;
    if (searcher.refused) result.note = "branch limit exceeded";
    if (searcher.truncated) result.note = "stopped after max_solutions";
    sort_and_dedup(searcher.solutions);
    result.solutions = std::move(searcher.solutions);
    for (size_t i = 0; i < result.solutions.size(); ++i) {
      StrictMechanism mech =
          linked_table_mechanism(fam, result.solutions[i], "solution-" + std::to_string(i));
      if (axioms.local_unanimity)
        require_pass(check_local_unanimity_family(mech, fam, caps), mech.name);
      if (axioms.strategy_proofness)
        require_pass(check_strategy_proofness_family(mech, fam, caps), mech.name);
      if (axioms.consistency) require_pass(check_consistency(mech, fam, caps), mech.name);
    }
  } catch (const CapExceeded& e) {
    result.refused = true;
    result.note = e.what();
    result.solutions.clear();
  }
  return result;
}

bool table_satisfies(const StrictDomain& d, const std::vector<std::uint32_t>& choice,
                     const AxiomSet& axioms, const Caps& caps) {
  if (axioms.consistency) throw Error("consistency requires linked_tables_satisfy");
  StrictMechanism mech = table_mechanism(d, choice, "candidate");
  if (axioms.local_unanimity && check_local_unanimity(mech, d, caps).verdict != Verdict::kPass)
    return false;
  if (axioms.strategy_proofness &&
      check_strategy_proofness(mech, d, caps).verdict != Verdict::kPass)
    return false;
  if (axioms.gsp_max_coalition != 0 &&
      check_group_strategy_proofness(mech, d, normalized_gsp(axioms, d.market.size()), caps)
              .verdict != Verdict::kPass)
    return false;
  return true;
}

bool linked_tables_satisfy(const StrictDomainFamily& fam,
                           const std::vector<std::vector<std::uint32_t>>& choice,
                           const AxiomSet& axioms, const Caps& caps) {
  StrictMechanism mech = linked_table_mechanism(fam, choice, "candidate");
  if (axioms.local_unanimity &&
      check_local_unanimity_family(mech, fam, caps).verdict != Verdict::kPass)
    return false;
  if (axioms.strategy_proofness &&
      check_strategy_proofness_family(mech, fam, caps).verdict != Verdict::kPass)
    return false;
  if (axioms.consistency && check_consistency(mech, fam, caps).verdict != Verdict::kPass)
    return false;
  return true;
}

ConsistencyCharacterization verify_consistency_characterization(const StrictDomainFamily& fam,
                                                                const ProverOptions& opt,
                                                                const Caps& caps) {
  ConsistencyCharacterization out;
  AxiomSet axioms;
  axioms.local_unanimity = true;
  axioms.consistency = true;
  out.search = search_linked_markets(fam, axioms, opt, caps);
  out.unique_ttc = !out.search.refused && out.search.stats.complete &&
                   out.search.solutions.size() == 1 &&
                   diff_vs_ttc_linked(fam, out.search.solutions[0], 1).empty();
  return out;
}

}  // namespace ttclab
