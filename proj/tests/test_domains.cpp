#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "ttclab/domains.hpp"

using namespace ttclab;

namespace {

// Independent re-statement of single-peakedness: on each side of the peak,
// objects closer to the peak are preferred.
bool peaked_oracle(const StrictPreference& p, const std::vector<ObjectId>& axis) {
  auto at = [&](ObjectId o) {
    return static_cast<int>(std::find(axis.begin(), axis.end(), o) - axis.begin());
  };
  int peak = at(p.top());
  for (ObjectId a : p.order())
    for (ObjectId b : p.order()) {
      int pa = at(a), pb = at(b);
      if (pa < pb && pb <= peak && !p.prefers(b, a)) return false;
      if (peak <= pa && pa < pb && !p.prefers(a, b)) return false;
    }
  return true;
}

// Independent re-statement of single-dippedness: on each side of the dip
// (the least preferred object), objects farther from the dip are preferred.
bool dipped_oracle(const StrictPreference& p, const std::vector<ObjectId>& axis) {
  auto at = [&](ObjectId o) {
    return static_cast<int>(std::find(axis.begin(), axis.end(), o) - axis.begin());
  };
  int dip = at(p.order().back());
  for (ObjectId a : p.order())
    for (ObjectId b : p.order()) {
      int pa = at(a), pb = at(b);
      if (pa < pb && pb <= dip && !p.prefers(a, b)) return false;
      if (dip <= pa && pa < pb && !p.prefers(b, a)) return false;
    }
  return true;
}

std::vector<StrictPreference> every_order(const Market& m) {
  std::vector<ObjectId> perm = m.objects();
  std::vector<StrictPreference> out;
  do out.emplace_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<ObjectId> ascending(int n) {
  std::vector<ObjectId> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = i + 1;
  return axis;
}

}  // namespace

TEST_CASE("domain constructor sorts, dedupes, validates") {
  Market m = Market::grand(2);
  StrictPreference asc({1, 2}), desc({2, 1});
  StrictDomain d(m, {{desc, asc, desc}, {asc}}, "demo");
  CHECK(d.name == "demo");
  CHECK(d.per_agent[0] == std::vector<StrictPreference>{asc, desc});
  CHECK(d.for_agent(2) == std::vector<StrictPreference>{asc});
  CHECK_THROWS_AS(d.for_agent(3), Error);
  CHECK_THROWS_AS(StrictDomain(m, {{asc}}), Error);  // missing a list
  CHECK_THROWS_AS(StrictDomain(m, {{asc}, {StrictPreference({1, 3})}}), Error);
}

TEST_CASE("all strict orders: factorial sizes") {
  StrictDomain d3 = all_strict(Market::grand(3));
  CHECK(d3.name == "all-strict");
  for (int pos = 0; pos < 3; ++pos) CHECK(d3.per_agent[pos].size() == 6);

  StrictDomain d4 = all_strict(Market::grand(4));
  CHECK(d4.per_agent[0].size() == 24);

  // lists are exactly the sorted permutation set
  auto all = every_order(Market::grand(3));
  std::sort(all.begin(), all.end());
  CHECK(d3.per_agent[1] == all);
}

TEST_CASE("single-peaked domain matches an independent filter") {
  Market m3 = Market::grand(3);
  StrictDomain d3 = single_peaked(m3, ascending(3));
  CHECK(d3.name == "single-peaked");

  std::vector<StrictPreference> expect;
  for (const auto& p : every_order(m3))
    if (peaked_oracle(p, ascending(3))) expect.push_back(p);
  std::sort(expect.begin(), expect.end());
  CHECK(d3.per_agent[0] == expect);
  CHECK(d3.per_agent[0].size() == 4);  // 2^(n-1)

  // frozen: exactly these four orders
  std::vector<StrictPreference> frozen{
      StrictPreference({1, 2, 3}), StrictPreference({2, 1, 3}),
      StrictPreference({2, 3, 1}), StrictPreference({3, 2, 1})};
  std::sort(frozen.begin(), frozen.end());
  CHECK(d3.per_agent[2] == frozen);

  StrictDomain d4 = single_peaked(Market::grand(4), ascending(4));
  CHECK(d4.per_agent[0].size() == 8);
  for (const auto& p : d4.per_agent[0]) CHECK(peaked_oracle(p, ascending(4)));

  // a different axis changes the family: o1 > o3 > o2 is peaked on (2,1,3)
  // (both neighbours of the peak form singleton sides) but not on (1,2,3)
  StrictDomain other = single_peaked(m3, {2, 1, 3});
  CHECK(other.per_agent[0].size() == 4);
  CHECK(std::binary_search(other.per_agent[0].begin(), other.per_agent[0].end(),
                           StrictPreference({1, 3, 2})));
  CHECK_FALSE(std::binary_search(d3.per_agent[0].begin(), d3.per_agent[0].end(),
                                 StrictPreference({1, 3, 2})));

  CHECK_THROWS_AS(single_peaked(m3, {1, 2}), Error);
  CHECK_THROWS_AS(single_peaked(m3, {1, 2, 2}), Error);
}

TEST_CASE("single-dipped domain matches an independent filter") {
  Market m3 = Market::grand(3);
  StrictDomain d3 = single_dipped(m3, ascending(3));
  CHECK(d3.name == "single-dipped");

  std::vector<StrictPreference> expect;
  for (const auto& p : every_order(m3))
    if (dipped_oracle(p, ascending(3))) expect.push_back(p);
  std::sort(expect.begin(), expect.end());
  CHECK(d3.per_agent[0] == expect);

  // frozen: tops are the axis extremes, 2^(n-1) orders
  std::vector<StrictPreference> frozen{
      StrictPreference({1, 2, 3}), StrictPreference({1, 3, 2}),
      StrictPreference({3, 1, 2}), StrictPreference({3, 2, 1})};
  CHECK(d3.per_agent[0] == frozen);

  StrictDomain d4 = single_dipped(Market::grand(4), ascending(4));
  CHECK(d4.per_agent[0].size() == 8);
  for (const auto& p : d4.per_agent[0]) {
    CHECK(dipped_oracle(p, ascending(4)));
    bool extreme_top = p.top() == 1 || p.top() == 4;
    CHECK(extreme_top);
  }
}

TEST_CASE("minimal rich domains") {
  Market m = Market::grand(3);
  StrictDomain top1 = minimal_top_one_rich(m);
  CHECK(top1.name == "top1-min");
  std::vector<StrictPreference> expect1{
      StrictPreference({1, 2, 3}), StrictPreference({2, 1, 3}), StrictPreference({3, 1, 2})};
  std::sort(expect1.begin(), expect1.end());
  CHECK(top1.per_agent[0] == expect1);
  CHECK(check_top_one_richness(top1));
  CHECK_FALSE(check_top_two_richness(top1));

  StrictDomain top2 = minimal_top_two_rich(m);
  CHECK(top2.name == "top2-min");
  CHECK(top2.per_agent[0].size() == 6);  // n(n-1) = all orders at n=3
  CHECK(check_top_one_richness(top2));
  CHECK(check_top_two_richness(top2));

  StrictDomain top2_4 = minimal_top_two_rich(Market::grand(4));
  CHECK(top2_4.per_agent[0].size() == 12);
  CHECK(check_top_two_richness(top2_4));
  CHECK_FALSE(check_top_two_richness(minimal_top_one_rich(Market::grand(4))));

  // every top-two pair appears exactly once in the minimal domain
  std::set<std::pair<ObjectId, ObjectId>> pairs;
  for (const auto& p : top2_4.per_agent[0]) pairs.insert({p.order()[0], p.order()[1]});
  CHECK(pairs.size() == 12);

  // richness checks also accept the full domain
  CHECK(check_top_one_richness(all_strict(m)));
  CHECK(check_top_two_richness(all_strict(m)));
  // and reject a domain missing a top
  StrictDomain narrow(m, {{StrictPreference({1, 2, 3})}, {StrictPreference({1, 2, 3})},
                          {StrictPreference({1, 2, 3})}});
  CHECK_FALSE(check_top_one_richness(narrow));
}

TEST_CASE("ordered partitions hit the Fubini counts") {
  auto p3 = ordered_partitions({1, 2, 3});
  CHECK(p3.size() == 13);
  auto p4 = ordered_partitions({1, 2, 3, 4});
  CHECK(p4.size() == 75);

  // no duplicates
  std::set<std::vector<std::vector<ObjectId>>> uniq(p3.begin(), p3.end());
  CHECK(uniq.size() == p3.size());

  auto p1 = ordered_partitions({7});
  REQUIRE(p1.size() == 1);
  CHECK(p1[0] == std::vector<std::vector<ObjectId>>{{7}});
}

TEST_CASE("weak universal domain: all owner-admissible weak orders") {
  Market m = Market::grand(3);
  WeakDomain d = weak_universal(m);
  CHECK(d.name == "weak-universal");

  for (int pos = 0; pos < 3; ++pos) {
    AgentId owner = m.agents()[pos];
    // independent oracle: filter ordered partitions by the owner-singleton rule
    std::vector<WeakPreference> expect;
    for (const auto& tiers : ordered_partitions(m.objects())) {
      bool owner_alone = false;
      for (const auto& tier : tiers)
        if (tier.size() == 1 && tier[0] == owner) owner_alone = true;
      if (owner_alone) expect.emplace_back(owner, tiers);
    }
    std::sort(expect.begin(), expect.end());
    CHECK(d.per_agent[pos] == expect);
    CHECK(d.per_agent[pos].size() == 8);
  }

  WeakDomain d4 = weak_universal(Market::grand(4));
  for (int pos = 0; pos < 4; ++pos) CHECK(d4.per_agent[pos].size() == 44);

  // frozen list for owner 1 at n=3 (tiers in canonical text form)
  std::vector<std::string> got;
  for (const auto& p : d.per_agent[0]) got.push_back(to_text(p));
  std::vector<std::string> frozen{
      "{o1} > {o2} > {o3}", "{o1} > {o2,o3}", "{o1} > {o3} > {o2}",
      "{o2} > {o1} > {o3}", "{o2} > {o3} > {o1}", "{o2,o3} > {o1}",
      "{o3} > {o1} > {o2}", "{o3} > {o2} > {o1}"};
  std::sort(got.begin(), got.end());
  std::sort(frozen.begin(), frozen.end());
  CHECK(got == frozen);
}

TEST_CASE("domain families memoize and restrict coherently") {
  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  CHECK(fam.name() == "all-strict");
  const StrictDomain& d1 = fam.domain_for(Market({1, 3}));
  const StrictDomain& d2 = fam.domain_for(Market({1, 3}));
  CHECK(&d1 == &d2);  // memoized
  CHECK(d1.per_agent[0].size() == 2);
  CHECK_THROWS_AS(fam.domain_for(Market({1, 4})), Error);

  CHECK(check_consistent_domain(fam));
  CHECK(check_consistent_domain(single_peaked_family(Market::grand(3), ascending(3))));
  CHECK(check_consistent_domain(single_dipped_family(Market::grand(4), ascending(4))));
  CHECK(check_consistent_domain(weak_universal_family(Market::grand(3))));

  // a family whose submarkets only allow ascending orders is not closed
  StrictDomainFamily bogus(Market::grand(3), "bogus", [](const Market& m) {
    if (m.size() == 3) return all_strict(m);
    std::vector<std::vector<StrictPreference>> lists;
    for (int i = 0; i < m.size(); ++i) lists.push_back({StrictPreference(m.objects())});
    return StrictDomain(m, std::move(lists), "bogus");
  });
  CHECK_FALSE(check_consistent_domain(bogus));
}

TEST_CASE("all submarkets enumerate by size then lexicographically") {
  auto subs = all_submarkets(Market::grand(3));
  std::vector<Market> expect{Market({1}), Market({2}), Market({3}), Market({1, 2}),
                             Market({1, 3}), Market({2, 3}), Market({1, 2, 3})};
  CHECK(subs == expect);
  CHECK(all_submarkets(Market::grand(4)).size() == 15);
}

TEST_CASE("profile space indexes the cartesian product lexicographically") {
  StrictDomain d = all_strict(Market::grand(3));
  StrictProfileSpace space(d);
  CHECK(space.size() == 216);
  CHECK(space.agent_count() == 3);
  CHECK(space.domain_size(1) == 6);

  std::vector<int> digits;
  space.digits_at(0, digits);
  CHECK(digits == std::vector<int>{0, 0, 0});
  space.digits_at(215, digits);
  CHECK(digits == std::vector<int>{5, 5, 5});
  space.digits_at(38, digits);  // 38 = 1*36 + 0*6 + 2
  CHECK(digits == std::vector<int>{1, 0, 2});
  CHECK(space.index_of({1, 0, 2}) == 38);
  for (std::uint64_t idx : {0u, 1u, 37u, 100u, 215u}) {
    space.digits_at(idx, digits);
    CHECK(space.index_of(digits) == idx);
  }

  space.digits_at(38, digits);
  CHECK(space.replace_digit(38, 0, 1, 3) == 38 + 2 * 36);
  CHECK(space.replace_digit(38, 2, 2, 0) == 36);

  StrictEconomy e = space.economy_at(38);
  CHECK(e.pref_at(0) == d.per_agent[0][1]);
  CHECK(e.pref_at(1) == d.per_agent[1][0]);
  CHECK(e.pref_at(2) == d.per_agent[2][2]);
  CHECK(e == space.economy_for({1, 0, 2}));

  CHECK_THROWS_AS(StrictProfileSpace(d, 100), CapExceeded);

  WeakProfileSpace wspace(weak_universal(Market::grand(3)));
  CHECK(wspace.size() == 512);
}
