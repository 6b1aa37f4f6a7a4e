#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"

using namespace ttclab;

TEST_CASE("ttc and the foils") {
  StrictMechanism ttc = ttc_mechanism();
  CHECK(ttc.name == "ttc");
  CHECK(ttc.mode == PopulationMode::kVariable);

  StrictEconomy e = parse_strict_economy(
      "1: o2 > o1 > o3\n"
      "2: o1 > o2 > o3\n"
      "3: o1 > o2 > o3\n");
  CHECK(ttc(e) == Allocation(Market::grand(3), {2, 1, 3}));
  CHECK(no_trade_mechanism<StrictPreference>()(e) == no_trade_allocation(Market::grand(3)));

  // only the step-one cycle trades under the first-step foil
  StrictEconomy two_step = parse_strict_economy(
      "1: o2 > o1 > o3\n"
      "2: o3 > o1 > o2\n"
      "3: o3 > o1 > o2\n");
  CHECK(first_step_only_mechanism()(two_step) == no_trade_allocation(Market::grand(3)));
  CHECK(ttc(two_step) == Allocation(Market::grand(3), {2, 1, 3}));
  CHECK(first_step_only_mechanism()(e) == Allocation(Market::grand(3), {2, 1, 3}));
}

TEST_CASE("single-peaked example mechanism") {
  StrictMechanism psi = single_peaked_example_mechanism(4);
  CHECK(psi.name == "sp-example");
  CHECK(psi.mode == PopulationMode::kFixed);
  CHECK_THROWS_AS(single_peaked_example_mechanism(3), Error);

  StrictEconomy display = parse_strict_economy(
      "1: o4 > o3 > o2 > o1\n"
      "2: o1 > o2 > o3 > o4\n"
      "3: o1 > o2 > o3 > o4\n"
      "4: o4 > o3 > o2 > o1\n");
  // the exceptional branch rotates 1,2,3 against ttc
  CHECK(psi(display) == Allocation(Market::grand(4), {3, 1, 2, 4}));
  CHECK(ttc_mechanism()(display) == Allocation(Market::grand(4), {3, 2, 1, 4}));

  // outside the exceptional family it follows ttc exactly
  StrictEconomy plain = parse_strict_economy(
      "1: o2 > o1 > o3 > o4\n"
      "2: o1 > o2 > o3 > o4\n"
      "3: o3 > o2 > o4 > o1\n"
      "4: o4 > o3 > o2 > o1\n");
  CHECK(psi(plain) == ttc_mechanism()(plain));

  // refuses profiles outside its domain and submarkets
  CHECK_THROWS_AS(psi(parse_strict_economy("1: o1 > o3 > o2 > o4\n2: o1 > o2 > o3 > o4\n"
                                           "3: o1 > o2 > o3 > o4\n4: o4 > o3 > o2 > o1\n")),
                  Error);
  CHECK_THROWS_AS(psi(parse_strict_economy("1: o1 > o2\n2: o1 > o2\n")), Error);
}

TEST_CASE("single-dipped example mechanism") {
  StrictMechanism psi = single_dipped_example_mechanism(3);
  CHECK(psi.name == "sd-example");

  // 1 and n swap exactly when each tops the other's endowment
  StrictEconomy mutual = parse_strict_economy(
      "1: o3 > o2 > o1\n"
      "2: o1 > o2 > o3\n"
      "3: o1 > o2 > o3\n");
  CHECK(psi(mutual) == Allocation(Market::grand(3), {3, 2, 1}));

  StrictEconomy oneway = parse_strict_economy(
      "1: o3 > o2 > o1\n"
      "2: o1 > o2 > o3\n"
      "3: o3 > o2 > o1\n");
  CHECK(psi(oneway) == no_trade_allocation(Market::grand(3)));
  // ttc would still trade here, so the two differ
  CHECK(ttc_mechanism()(oneway) != psi(oneway));

  CHECK_THROWS_AS(psi(parse_strict_economy("1: o2 > o1 > o3\n2: o1 > o2 > o3\n3: o1 > o2 > o3\n")),
                  Error);

  StrictMechanism psi4 = single_dipped_example_mechanism(4);
  StrictEconomy mutual4 = parse_strict_economy(
      "1: o4 > o1 > o3 > o2\n"
      "2: o1 > o2 > o4 > o3\n"
      "3: o4 > o3 > o1 > o2\n"
      "4: o1 > o2 > o4 > o3\n");
  CHECK(psi4(mutual4) == Allocation(Market::grand(4), {4, 2, 3, 1}));
}

TEST_CASE("fixed tie-breaker mechanism and uniform profiles") {
  Market grand = Market::grand(3);
  TieBreakerProfile tb = uniform_tiebreak(grand, {3, 2, 1});
  CHECK(tb.order_for(1) == std::vector<ObjectId>{3, 2, 1});
  CHECK(tb.order_for(3) == std::vector<ObjectId>{3, 2, 1});

  WeakMechanism m = ttc_fixed_tiebreakers_mechanism(tb);
  CHECK(m.name == "ttc-tb");
  WeakEconomy e = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o2} > {o3}\n"
      "3: {o1} > {o2} > {o3}\n");
  CHECK(m(e) == run_ttc_fixed_tiebreakers(e, tb).allocation);
  CHECK(m(e) == Allocation(grand, {3, 2, 1}));

  // variable population: a submarket economy runs under the same orders
  WeakEconomy sub = parse_weak_economy("1: {o2} > {o1}\n2: {o1} > {o2}\n");
  CHECK(m(sub) == Allocation(Market({1, 2}), {2, 1}));
}

TEST_CASE("market patchwork dispatches on the queried market") {
  Market grand = Market::grand(3);
  StrictMechanism pw =
      market_patchwork_mechanism<StrictPreference>(grand, ttc_mechanism(),
                                                   no_trade_mechanism<StrictPreference>());
  CHECK(pw.name == "patchwork(ttc|no-trade)");
  CHECK(pw.mode == PopulationMode::kVariable);

  StrictEconomy e = parse_strict_economy("1: o2 > o1 > o3\n2: o1 > o2 > o3\n3: o3 > o1 > o2\n");
  CHECK(pw(e) == Allocation(grand, {2, 1, 3}));  // grand market: ttc

  StrictEconomy sub = parse_strict_economy("1: o2 > o1\n2: o1 > o2\n");
  CHECK(pw(sub) == no_trade_allocation(Market({1, 2})));  // elsewhere: no trade

  StrictEconomy outside(Market({4, 5}), {StrictPreference({5, 4}), StrictPreference({4, 5})});
  CHECK_THROWS_AS(pw(outside), Error);
}

TEST_CASE("sp violator: the published manipulation") {
  WeakMechanism psi = sp_violator_mechanism();
  CHECK(psi.name == "sp-violator");

  // truthful profile: agent 2's tied top keeps the profile off the
  // exceptional family, so the primary tie-breakers leave 2 with o2
  WeakEconomy truth = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1,o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  CHECK(psi(truth) == Allocation(Market::grand(3), {3, 2, 1}));

  // reporting a unique top at o1 switches the tie-breakers and wins o1,
  // which the true preference ranks strictly above o2
  WeakEconomy lie = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o2} > {o3}\n"
      "3: {o1} > {o2} > {o3}\n");
  CHECK(psi(lie) == Allocation(Market::grand(3), {2, 1, 3}));
  CHECK(truth.pref_of(2).prefers(1, 2));

  // off the exceptional family everything is plain ttc with the
  // uniform o3 > o2 > o1 orders
  WeakEconomy plain = parse_weak_economy(
      "1: {o1} > {o2,o3}\n"
      "2: {o1} > {o2} > {o3}\n"
      "3: {o2} > {o1} > {o3}\n");
  TieBreakerProfile primary = uniform_tiebreak(Market::grand(3), {3, 2, 1});
  CHECK(psi(plain) == run_ttc_fixed_tiebreakers(plain, primary).allocation);

  // submarkets fall back to the primary orders
  WeakEconomy sub = parse_weak_economy("2: {o3} > {o2}\n3: {o2} > {o3}\n");
  CHECK(psi(sub) == Allocation(Market({2, 3}), {3, 2}));
}

TEST_CASE("bossy mechanism: the published bossiness") {
  WeakMechanism psi = bossy_mechanism();
  CHECK(psi.name == "bossy");

  WeakEconomy truth = parse_weak_economy(
      "1: {o2} > {o1} > {o3}\n"
      "2: {o1} > {o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  CHECK(psi(truth) == Allocation(Market::grand(3), {2, 1, 3}));

  // agent 1 widens its top tier: own assignment stays o2 while 2 and 3 swap fates
  WeakEconomy widened = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  CHECK(psi(widened) == Allocation(Market::grand(3), {2, 3, 1}));

  // outside the exceptional family it follows its fixed tie-breakers
  WeakEconomy plain = parse_weak_economy(
      "1: {o1} > {o2} > {o3}\n"
      "2: {o2} > {o1} > {o3}\n"
      "3: {o3} > {o1} > {o2}\n");
  CHECK(psi(plain) == no_trade_allocation(Market::grand(3)));
}

TEST_CASE("catalog lookups") {
  CHECK(strict_mechanism_names() ==
        std::vector<std::string>{"ttc", "no-trade", "first-step", "sp-example", "sd-example"});
  CHECK(weak_mechanism_names() ==
        std::vector<std::string>{"ttc-tb", "no-trade", "patchwork", "sp-violator", "bossy"});

  CHECK(make_strict_mechanism("ttc", 3).name == "ttc");
  CHECK(make_strict_mechanism("sd-example", 4).name == "sd-example");
  CHECK_THROWS_AS(make_strict_mechanism("nope", 3), Error);

  Market grand = Market::grand(3);
  TieBreakerProfile tb = uniform_tiebreak(grand, {3, 2, 1});
  TieBreakerProfile tb2 = uniform_tiebreak(grand, {1, 2, 3});
  CHECK(make_weak_mechanism("sp-violator", grand, std::nullopt, std::nullopt).name ==
        "sp-violator");
  CHECK(make_weak_mechanism("ttc-tb", grand, tb, std::nullopt).name == "ttc-tb");
  CHECK(make_weak_mechanism("patchwork", grand, tb, tb2).name == "patchwork(ttc-tb|ttc-tb)");
  CHECK_THROWS_AS(make_weak_mechanism("ttc-tb", grand, std::nullopt, std::nullopt), Error);
  CHECK_THROWS_AS(make_weak_mechanism("nope", grand, tb, tb2), Error);
}
