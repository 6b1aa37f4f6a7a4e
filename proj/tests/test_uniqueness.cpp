#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"
#include "ttclab/ttc.hpp"
#include "ttclab/uniqueness.hpp"

using namespace ttclab;

namespace {

std::vector<std::uint32_t> choices_of(const StrictMechanism& m, const StrictDomain& d) {
  MechanismTable t(d);
  std::vector<std::uint32_t> out;
  for (std::uint64_t p = 0; p < t.space().size(); ++p) {
    int idx = t.universe().index_of(m(t.space().economy_at(p)).objects());
    REQUIRE(idx >= 0);
    out.push_back(static_cast<std::uint32_t>(idx));
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> linked_choices_of(const StrictMechanism& m,
                                                          const StrictDomainFamily& fam) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const Market& mk : all_submarkets(fam.grand())) out.push_back(choices_of(m, fam.domain_for(mk)));
  return out;
}

// The four-profile worked example: agent 3's list is pinned, agents 1 and 2
// choose between two lists each.
StrictDomain mini_domain() {
  return StrictDomain(Market::grand(3),
                      {{StrictPreference({2, 1, 3}), StrictPreference({3, 2, 1})},
                       {StrictPreference({1, 2, 3}), StrictPreference({3, 1, 2})},
                       {StrictPreference({3, 1, 2})}},
                      "mini");
}

}  // namespace

TEST_CASE("allocation universe: frozen lex order and assignment masks") {
  AllocationUniverse u(Market::grand(3));
  REQUIRE(u.size() == 6);
  std::vector<std::vector<ObjectId>> expect = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3},
                                               {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
  for (int i = 0; i < 6; ++i) {
    CHECK(u.objects_of(i) == expect[i]);
    CHECK(u.index_of(expect[i]) == i);
    CHECK(u.allocation_at(i).objects() == expect[i]);
  }
  CHECK(u.index_of({1, 1, 3}) == -1);
  CHECK(u.full_mask() == 63);
  CHECK(u.assigning(0, 1) == 0b000011);  // agent 1 keeps o1
  CHECK(u.assigning(2, 3) == 0b000101);  // agent 3 keeps o3
  CHECK(u.assigning(1, 1) == 0b010100);  // agent 2 takes o1

  CHECK(AllocationUniverse(Market::grand(4)).size() == 24);
  CHECK_THROWS_AS(AllocationUniverse(Market::grand(5)), CapExceeded);
}

TEST_CASE("worked example: seeding pins the cycles, propagation finishes the job") {
  StrictDomain d = mini_domain();
  MechanismTable t(d);
  REQUIRE(t.space().size() == 4);
  for (std::uint64_t p = 0; p < 4; ++p) CHECK(t.mask(p) == t.universe().full_mask());

  REQUIRE(seed_local_unanimity(t));
  CHECK(t.mask(0) == 0b000100);  // cycles (1 2) and (3) pin everything
  CHECK(t.mask(1) == 0b000101);  // only the self-loop at 3 is forced
  CHECK(t.mask(2) == 0b000101);
  CHECK(t.mask(3) == 0b000101);
  CHECK(t.decided_count() == 1);

  REQUIRE(propagate_sp(t));
  CHECK(t.decided());
  std::vector<std::uint32_t> ttc = ttc_choices(d);
  REQUIRE(ttc == std::vector<std::uint32_t>{2, 2, 2, 2});
  for (std::uint64_t p = 0; p < 4; ++p) CHECK(t.sole_candidate(p) == static_cast<int>(ttc[p]));
}

TEST_CASE("top-one-rich seeding: the derived rationality filter earns its keep") {
  StrictDomain d = minimal_top_one_rich(Market::grand(3));
  REQUIRE(StrictProfileSpace(d).size() == 27);

  MechanismTable plain(d);
  REQUIRE(seed_local_unanimity(plain));
  CHECK(plain.decided_count() == 18);

  MechanismTable filtered(d);
  REQUIRE(seed_local_unanimity(filtered, AxiomSet{.strategy_proofness = true}));
  CHECK(filtered.decided_count() == 24);
  int two_candidates = 0;
  for (std::uint64_t p = 0; p < 27; ++p)
    if (filtered.candidate_count(p) == 2) ++two_candidates;
  CHECK(two_candidates == 3);

  REQUIRE(propagate_sp(filtered));
  CHECK(filtered.decided());
  std::vector<std::uint32_t> ttc = ttc_choices(d);
  for (std::uint64_t p = 0; p < 27; ++p)
    CHECK(filtered.sole_candidate(p) == static_cast<int>(ttc[p]));
}

TEST_CASE("propagation reaches the same fixpoint in any edge order") {
  StrictDomain d = minimal_top_two_rich(Market::grand(3));
  std::vector<std::uint64_t> reference;
  for (unsigned seed : {0u, 1u, 2u, 17u}) {
    MechanismTable t(d);
    REQUIRE(seed_local_unanimity(t, AxiomSet{.strategy_proofness = true}));
    REQUIRE(propagate_sp(t, seed));
    if (reference.empty())
      reference = t.masks();
    else
      CHECK(t.masks() == reference);
  }
}

TEST_CASE("flat search: lu + sp pins ttc on both minimal rich domains") {
  for (const StrictDomain& d : {minimal_top_two_rich(Market::grand(3)),
                                minimal_top_one_rich(Market::grand(3))}) {
    CAPTURE(d.name);
    AxiomSet ax{.local_unanimity = true, .strategy_proofness = true};
    SearchResult r = search_all_mechanisms(d, ax);
    CHECK_FALSE(r.refused);
    CHECK(r.stats.complete);
    REQUIRE(r.solutions.size() == 1);
    CHECK(r.solutions[0] == ttc_choices(d));
    CHECK(diff_vs_ttc(d, r.solutions[0]).empty());
    CHECK(table_satisfies(d, r.solutions[0], ax));
  }
}

TEST_CASE("flat search: single-dipped lu + gsp admits more than ttc") {
  StrictDomain d = single_dipped(Market::grand(3), {1, 2, 3});
  AxiomSet ax{.local_unanimity = true, .gsp_max_coalition = -1};
  SearchResult r = search_all_mechanisms(d, ax);
  CHECK_FALSE(r.refused);
  CHECK(r.stats.complete);
  REQUIRE(r.solutions.size() >= 2);

  std::vector<std::uint32_t> ttc = ttc_choices(d);
  std::vector<std::uint32_t> dipped = choices_of(single_dipped_example_mechanism(3), d);
  REQUIRE(ttc != dipped);
  CHECK(std::find(r.solutions.begin(), r.solutions.end(), ttc) != r.solutions.end());
  CHECK(std::find(r.solutions.begin(), r.solutions.end(), dipped) != r.solutions.end());
  for (const auto& s : r.solutions) CHECK(table_satisfies(d, s, ax));
  CHECK_FALSE(diff_vs_ttc(d, dipped).empty());
}

TEST_CASE("flat search: resource limits and rejected configurations") {
  StrictDomain d = all_strict(Market::grand(3));

  SearchResult truncated = search_all_mechanisms(d, AxiomSet{.local_unanimity = true},
                                                 ProverOptions{.max_solutions = 2});
  CHECK_FALSE(truncated.refused);
  CHECK_FALSE(truncated.stats.complete);
  CHECK(truncated.solutions.size() == 2);
  CHECK(truncated.note == "stopped after max_solutions");

  SearchResult starved = search_all_mechanisms(
      d, AxiomSet{.local_unanimity = true}, ProverOptions{.branch_limit = 1, .max_solutions = 4});
  CHECK(starved.refused);
  CHECK(starved.note == "branch limit exceeded");

  Caps tiny;
  tiny.max_profiles = 10;
  SearchResult capped = search_all_mechanisms(d, AxiomSet{.local_unanimity = true}, {}, tiny);
  CHECK(capped.refused);
  CHECK_FALSE(capped.note.empty());

  CHECK_THROWS_AS(search_all_mechanisms(d, AxiomSet{.consistency = true}), Error);
  CHECK_THROWS_AS(table_satisfies(d, ttc_choices(d), AxiomSet{.consistency = true}), Error);
}

TEST_CASE("linked search: lu + consistency characterizes ttc across submarkets") {
  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  AxiomSet ax{.local_unanimity = true, .consistency = true};
  LinkedSearchResult r = search_linked_markets(fam, ax);
  CHECK_FALSE(r.refused);
  CHECK(r.stats.complete);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.markets == all_submarkets(fam.grand()));
  CHECK(r.solutions[0] == ttc_linked_choices(fam));
  CHECK(diff_vs_ttc_linked(fam, r.solutions[0]).empty());

  ConsistencyCharacterization cc = verify_consistency_characterization(fam);
  CHECK(cc.unique_ttc);
  CHECK(cc.search.solutions.size() == 1);
}

TEST_CASE("linked search: dropping either axiom reopens the field") {
  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  auto ttc_tables = ttc_linked_choices(fam);
  auto no_trade_tables = linked_choices_of(no_trade_mechanism<StrictPreference>(), fam);
  auto first_step_tables = linked_choices_of(first_step_only_mechanism(), fam);

  AxiomSet both{.local_unanimity = true, .consistency = true};
  AxiomSet lu_only{.local_unanimity = true};
  AxiomSet cons_only{.consistency = true};

  CHECK(linked_tables_satisfy(fam, ttc_tables, both));

  // no-trade survives consistency alone, first-step survives local unanimity
  // alone, and each fails as soon as the other axiom returns
  CHECK(linked_tables_satisfy(fam, no_trade_tables, cons_only));
  CHECK_FALSE(linked_tables_satisfy(fam, no_trade_tables, both));
  CHECK(linked_tables_satisfy(fam, first_step_tables, lu_only));
  CHECK_FALSE(linked_tables_satisfy(fam, first_step_tables, both));

  LinkedSearchResult lu_run =
      search_linked_markets(fam, lu_only, ProverOptions{.max_solutions = 2});
  CHECK(lu_run.solutions.size() == 2);
  CHECK_FALSE(lu_run.stats.complete);

  LinkedSearchResult cons_run =
      search_linked_markets(fam, cons_only, ProverOptions{.max_solutions = 2});
  CHECK(cons_run.solutions.size() == 2);
  CHECK_FALSE(cons_run.stats.complete);
}

TEST_CASE("decided tables round-trip through the mechanism wrapper") {
  StrictDomain d = minimal_top_two_rich(Market::grand(3));
  StrictMechanism wrapped = table_mechanism(d, ttc_choices(d), "ttc-table");
  CHECK(wrapped.name == "ttc-table");
  CHECK(wrapped.mode == PopulationMode::kFixed);
  MechanismTable t(d);
  for (std::uint64_t p = 0; p < t.space().size(); ++p) {
    StrictEconomy e = t.space().economy_at(p);
    CHECK(wrapped(e) == run_ttc(e).allocation);
  }
  StrictEconomy outside = parse_strict_economy("1: o1 > o2\n2: o2 > o1\n");
  CHECK_THROWS_AS(wrapped(outside), Error);

  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  StrictMechanism linked = linked_table_mechanism(fam, ttc_linked_choices(fam), "ttc-linked");
  CHECK(linked.mode == PopulationMode::kVariable);
  StrictEconomy sub = parse_strict_economy("1: o3 > o1\n3: o1 > o3\n");
  CHECK(linked(sub) == run_ttc(sub).allocation);
  StrictEconomy grand = parse_strict_economy("1: o2 > o1 > o3\n2: o3 > o1 > o2\n3: o3 > o1 > o2\n");
  CHECK(linked(grand) == run_ttc(grand).allocation);
}

TEST_CASE("table diffs report the disagreeing profiles") {
  StrictDomain d = all_strict(Market::grand(3));
  std::vector<std::uint32_t> nt = choices_of(no_trade_mechanism<StrictPreference>(), d);
  std::vector<TableDiff> diffs = diff_vs_ttc(d, nt, 4);
  REQUIRE(diffs.size() == 4);
  CHECK(diffs[0].profile_index == 6);  // first profile where no-trade misses a swap
  StrictEconomy e = parse_strict_economy(diffs[0].profile);
  CHECK(to_text(no_trade_allocation(e.market())) == diffs[0].solution);
  CHECK(to_text(run_ttc(e).allocation) == diffs[0].baseline);
}
