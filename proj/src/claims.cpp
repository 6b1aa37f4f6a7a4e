#include "ttclab/claims.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ttclab/axioms.hpp"
#include "ttclab/core.hpp"
#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"
#include "ttclab/ttc.hpp"
#include "ttclab/uniqueness.hpp"

namespace ttclab {

namespace {

std::string check_line(const CheckReport& r) {
  std::ostringstream out;
  out << r.axiom << " | " << r.mechanism << " | " << r.domain << " | " << to_string(r.verdict)
      << " | profiles=" << r.profiles_examined;
  if (r.witness.has_value()) out << " | witness@" << r.witness->profile_index;
  if (!r.note.empty()) out << " | " << r.note;
  return out.str();
}

// Collects transcript lines and tracks whether every requirement held.
struct Recorder {
  ClaimResult res;

  Recorder(std::string id, std::string expected) {
    res.id = std::move(id);
    res.expected = std::move(expected);
    res.pass = true;
  }

  void note(const std::string& s) { res.lines.push_back(s); }

  void require(bool ok, const std::string& what) {
    res.lines.push_back(std::string(ok ? "ok: " : "VIOLATION: ") + what);
    if (!ok) res.pass = false;
  }

  void expect(const CheckReport& r, Verdict want) {
    bool ok = r.verdict == want;
    std::string l = check_line(r);
    if (!ok) l += " (wanted " + std::string(to_string(want)) + ")";
    require(ok, l);
  }

  ClaimResult finish() {
    int violations = 0;
    for (const auto& l : res.lines)
      if (l.rfind("VIOLATION", 0) == 0) ++violations;
    res.observed =
        res.pass ? "confirmed" : std::to_string(violations) + " requirement(s) violated";
    return res;
  }
};

std::vector<ObjectId> ascending(int n) {
  std::vector<ObjectId> axis;
  for (int i = 1; i <= n; ++i) axis.push_back(i);
  return axis;
}

std::string joined(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string deviated_text(const Witness& w) {
  auto base = parse_agent_lines(joined(w.profile));
  for (auto& [agent, body] : parse_agent_lines(joined(w.deviation)))
    for (auto& entry : base)
      if (entry.first == agent) entry.second = body;
  std::string out;
  for (auto& [agent, body] : base) out += std::to_string(agent) + ": " + body + "\n";
  return out;
}

// Reference tie-breakers for the weak-preference suite.
TieBreakerProfile suite_tb(int n) {
  std::map<AgentId, std::vector<ObjectId>> orders;
  for (int a = 1; a <= n; ++a) {
    std::vector<ObjectId> order = {3, 2, 1};
    for (int o = 4; o <= n; ++o) order.push_back(o);
    orders[a] = order;
  }
  return TieBreakerProfile(orders);
}

TieBreakerProfile suite_tb_alt(int n) {  // o2 before o3 for every agent
  std::map<AgentId, std::vector<ObjectId>> orders;
  for (int a = 1; a <= n; ++a) {
    std::vector<ObjectId> order = {2, 3, 1};
    for (int o = 4; o <= n; ++o) order.push_back(o);
    orders[a] = order;
  }
  return TieBreakerProfile(orders);
}

WeakMechanism suite_patchwork(int n) {
  Market g = Market::grand(n);
  return market_patchwork_mechanism<WeakPreference>(
      g, ttc_fixed_tiebreakers_mechanism(suite_tb(n)),
      ttc_fixed_tiebreakers_mechanism(suite_tb_alt(n)));
}

// --- claim bodies ------------------------------------------------------------

ClaimResult run_ttc_axiom_suite(const std::string& id, int n, int gsp_cap, const Caps& caps) {
  std::ostringstream expected;
  expected << "ttc passes the full axiom battery on the " << n << "-agent strict domain";
  Recorder rec(id, expected.str());
  StrictMechanism m = ttc_mechanism();
  StrictDomain d = all_strict(Market::grand(n));
  std::uint64_t space = StrictProfileSpace(d).size();

  std::vector<CheckReport> reports = {
      check_individual_rationality(m, d, caps),
      check_pareto_efficiency(m, d, caps),
      check_unanimity(m, d, caps),
      check_local_unanimity(m, d, caps, LuEngine::kDirect),
      check_local_unanimity(m, d, caps, LuEngine::kFirstStep),
      check_strategy_proofness(m, d, caps),
      check_group_strategy_proofness(m, d, gsp_cap, caps),
      check_non_bossiness(m, d, caps),
  };
  for (const CheckReport& r : reports) {
    rec.expect(r, Verdict::kPass);
    rec.require(r.profiles_examined == space,
                r.axiom + " examined all " + std::to_string(space) + " profiles");
  }
  return rec.finish();
}

ClaimResult run_first_step_equivalence(const Caps& caps) {
  Recorder rec("first-step-equivalence",
               "direct and first-step local-unanimity engines agree on every catalog pair");

  auto compare = [&](const CheckReport& a, const CheckReport& b, const std::string& label) {
    bool agree = a.verdict == b.verdict && a.profiles_examined == b.profiles_examined;
    if (agree && a.witness.has_value() && b.witness.has_value())
      agree = a.witness->profile_index == b.witness->profile_index &&
              a.witness->agents == b.witness->agents;
    else if (a.witness.has_value() != b.witness.has_value())
      agree = false;
    std::ostringstream out;
    out << label << ": direct=" << to_string(a.verdict);
    if (a.witness) out << "@" << a.witness->profile_index;
    out << " first-step=" << to_string(b.verdict);
    if (b.witness) out << "@" << b.witness->profile_index;
    rec.require(agree, out.str());
  };

  auto run_strict = [&](const StrictMechanism& m, const StrictDomain& d) {
    compare(check_local_unanimity(m, d, caps, LuEngine::kDirect),
            check_local_unanimity(m, d, caps, LuEngine::kFirstStep),
            m.name + " on " + d.name + "(n=" + std::to_string(d.market.size()) + ")");
  };
  auto run_weak = [&](const WeakMechanism& m, const WeakDomain& d) {
    compare(check_local_unanimity(m, d, caps, LuEngine::kDirect),
            check_local_unanimity(m, d, caps, LuEngine::kFirstStep),
            m.name + " on " + d.name + "(n=" + std::to_string(d.market.size()) + ")");
  };

  for (int n : {3, 4}) {
    Market g = Market::grand(n);
    std::vector<StrictDomain> domains = {all_strict(g), single_peaked(g, ascending(n)),
                                         single_dipped(g, ascending(n)), minimal_top_one_rich(g),
                                         minimal_top_two_rich(g)};
    for (const StrictDomain& d : domains)
      for (const StrictMechanism& m :
           {ttc_mechanism(), no_trade_mechanism<StrictPreference>(), first_step_only_mechanism()})
        run_strict(m, d);
    run_strict(single_dipped_example_mechanism(n), single_dipped(g, ascending(n)));
  }
  run_strict(single_peaked_example_mechanism(4), single_peaked(Market::grand(4), ascending(4)));

  {
    Market g = Market::grand(3);
    WeakDomain d = weak_universal(g);
    for (const WeakMechanism& m :
         {ttc_fixed_tiebreakers_mechanism(suite_tb(3)), no_trade_mechanism<WeakPreference>(),
          suite_patchwork(3), sp_violator_mechanism(), bossy_mechanism()})
      run_weak(m, d);
  }
  {
    Market g = Market::grand(4);
    WeakDomain d = weak_universal(g);
    for (const WeakMechanism& m :
         {ttc_fixed_tiebreakers_mechanism(suite_tb(4)), no_trade_mechanism<WeakPreference>(),
          suite_patchwork(4)})
      run_weak(m, d);
  }
  return rec.finish();
}

ClaimResult run_single_peaked_example(const Caps& caps) {
  Recorder rec("single-peaked-example",
               "the single-peaked exception mechanism differs from ttc on the display profile, "
               "keeps local unanimity and strategy-proofness, and loses group strategy-proofness");
  StrictMechanism psi = single_peaked_example_mechanism(4);
  StrictDomain d = single_peaked(Market::grand(4), ascending(4));

  StrictEconomy display = parse_strict_economy(
      "1: o4 > o3 > o2 > o1\n"
      "2: o1 > o2 > o3 > o4\n"
      "3: o1 > o2 > o3 > o4\n"
      "4: o4 > o3 > o2 > o1\n");
  Allocation got = psi(display);
  Allocation ttc = run_ttc(display).allocation;
  rec.require(to_text(got) == "1:o3 2:o1 3:o2 4:o4",
              "display profile: mechanism plays the three-cycle, " + to_text(got));
  rec.require(to_text(ttc) == "1:o3 2:o2 3:o1 4:o4",
              "display profile: ttc swaps only 1 and 3, " + to_text(ttc));
  rec.require(!(got == ttc), "the two allocations differ");

  rec.expect(check_local_unanimity(psi, d, caps), Verdict::kPass);
  rec.expect(check_strategy_proofness(psi, d, caps), Verdict::kPass);

  CheckReport gsp = check_group_strategy_proofness(psi, d, 0, caps);
  rec.expect(gsp, Verdict::kFail);
  if (gsp.witness.has_value()) {
    const Witness& w = *gsp.witness;
    StrictEconomy truth = parse_strict_economy(joined(w.profile));
    StrictEconomy lie = parse_strict_economy(deviated_text(w));
    rec.require(to_text(psi(truth)) == w.before, "witness replays under truthful reports");
    rec.require(to_text(psi(lie)) == w.after, "witness replays under the joint misreport");
    Allocation before = parse_allocation(w.before, truth.market());
    Allocation after = parse_allocation(w.after, truth.market());
    bool weak = true, strict = false;
    for (AgentId a : w.agents) {
      weak = weak && truth.pref_of(a).weakly_prefers(after.of(a), before.of(a));
      strict = strict || truth.pref_of(a).prefers(after.of(a), before.of(a));
    }
    rec.require(weak && strict, "the coalition all weakly gain and someone strictly gains");
  }
  return rec.finish();
}

ClaimResult run_single_dipped_example(const Caps& caps) {
  Recorder rec("single-dipped-example",
               "the single-dipped swap mechanism differs from ttc yet passes local unanimity "
               "and group strategy-proofness at n=3 (full coalitions) and n=4 (pairs)");
  for (int n : {3, 4}) {
    StrictMechanism psi = single_dipped_example_mechanism(n);
    StrictDomain d = single_dipped(Market::grand(n), ascending(n));
    rec.expect(check_local_unanimity(psi, d, caps), Verdict::kPass);
    rec.expect(check_group_strategy_proofness(psi, d, n == 3 ? 0 : 2, caps), Verdict::kPass);
    CheckReport diff = check_welfare_equivalence(psi, ttc_mechanism(), d, caps);
    rec.expect(diff, Verdict::kFail);
  }
  return rec.finish();
}

ClaimResult run_prover_unique(const std::string& id, const StrictDomain& d, const Caps& caps) {
  Recorder rec(id, "local unanimity + strategy-proofness admit exactly ttc on " + d.name);
  AxiomSet ax{.local_unanimity = true, .strategy_proofness = true};
  SearchResult r = search_all_mechanisms(d, ax, {}, caps);
  rec.require(!r.refused, "search ran to completion" + (r.note.empty() ? "" : " (" + r.note + ")"));
  rec.require(r.stats.complete, "search tree exhausted");
  rec.require(r.solutions.size() == 1,
              "solution count = " + std::to_string(r.solutions.size()) + " (want 1)");
  if (r.solutions.size() == 1) {
    rec.require(r.solutions[0] == ttc_choices(d, caps), "the unique solution is ttc");
    rec.require(diff_vs_ttc(d, r.solutions[0]).empty(), "diff vs ttc: empty");
  }
  std::ostringstream stats;
  stats << "nodes=" << r.stats.nodes << " backtracks=" << r.stats.backtracks;
  rec.note(stats.str());
  return rec.finish();
}

ClaimResult run_single_dipped_multiplicity(const Caps& caps) {
  Recorder rec("single-dipped-multiplicity",
               "on the single-dipped domain, local unanimity + group strategy-proofness admit "
               "at least two mechanisms, including ttc and the swap mechanism");
  StrictDomain d = single_dipped(Market::grand(3), ascending(3));
  AxiomSet ax{.local_unanimity = true, .gsp_max_coalition = -1};
  SearchResult r = search_all_mechanisms(d, ax, {}, caps);
  rec.require(!r.refused && r.stats.complete, "search exhausted the tree");
  rec.require(r.solutions.size() >= 2,
              "solution count = " + std::to_string(r.solutions.size()) + " (want >= 2)");
  std::vector<std::uint32_t> ttc = ttc_choices(d, caps);
  MechanismTable t(d, caps);
  std::vector<std::uint32_t> swap;
  StrictMechanism psi = single_dipped_example_mechanism(3);
  for (std::uint64_t p = 0; p < t.space().size(); ++p)
    swap.push_back(static_cast<std::uint32_t>(t.universe().index_of(psi(t.space().economy_at(p)).objects())));
  rec.require(ttc != swap, "ttc and the swap mechanism differ as tables");
  rec.require(std::find(r.solutions.begin(), r.solutions.end(), ttc) != r.solutions.end(),
              "ttc appears among the solutions");
  rec.require(std::find(r.solutions.begin(), r.solutions.end(), swap) != r.solutions.end(),
              "the swap mechanism appears among the solutions");
  return rec.finish();
}

ClaimResult run_consistency_unique(const Caps& caps) {
  Recorder rec("consistency-unique",
               "local unanimity + consistency across all submarkets admit exactly ttc");
  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  ConsistencyCharacterization cc = verify_consistency_characterization(fam, {}, caps);
  rec.require(!cc.search.refused, "linked search ran to completion");
  rec.require(cc.search.stats.complete, "search tree exhausted");
  rec.require(cc.search.solutions.size() == 1,
              "solution count = " + std::to_string(cc.search.solutions.size()) + " (want 1)");
  rec.require(cc.unique_ttc, "the unique solution coincides with ttc on every market");
  std::ostringstream stats;
  stats << "markets=" << cc.search.markets.size() << " nodes=" << cc.search.stats.nodes;
  rec.note(stats.str());
  return rec.finish();
}

std::vector<std::vector<std::uint32_t>> linked_choices(const StrictMechanism& m,
                                                       const StrictDomainFamily& fam,
                                                       const Caps& caps) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const Market& mk : all_submarkets(fam.grand())) {
    MechanismTable t(fam.domain_for(mk), caps);
    std::vector<std::uint32_t> col;
    for (std::uint64_t p = 0; p < t.space().size(); ++p)
      col.push_back(static_cast<std::uint32_t>(t.universe().index_of(m(t.space().economy_at(p)).objects())));
    out.push_back(std::move(col));
  }
  return out;
}

ClaimResult run_axiom_drop(const std::string& id, bool keep_lu, const Caps& caps) {
  std::string kept = keep_lu ? "local unanimity" : "consistency";
  std::string foil = keep_lu ? "first-step" : "no-trade";
  Recorder rec(id, "keeping only " + kept + " admits multiple mechanisms, including " + foil);
  StrictDomainFamily fam = all_strict_family(Market::grand(3));
  AxiomSet ax;
  ax.local_unanimity = keep_lu;
  ax.consistency = !keep_lu;
  AxiomSet both{.local_unanimity = true, .consistency = true};

  LinkedSearchResult r = search_linked_markets(fam, ax, ProverOptions{.max_solutions = 2}, caps);
  rec.require(!r.refused, "linked search ran");
  rec.require(r.solutions.size() == 2, "at least two solutions found before the cutoff");
  rec.require(!r.stats.complete, "enumeration was cut off, more solutions exist");

  StrictMechanism foil_mech =
      keep_lu ? first_step_only_mechanism() : no_trade_mechanism<StrictPreference>();
  auto foil_tables = linked_choices(foil_mech, fam, caps);
  rec.require(linked_tables_satisfy(fam, foil_tables, ax, caps),
              foil + " satisfies the kept axiom, so it is among the solutions");
  rec.require(!linked_tables_satisfy(fam, foil_tables, both, caps),
              foil + " fails once the dropped axiom returns");
  return rec.finish();
}

ClaimResult run_tiebreak_suite(const Caps& caps) {
  Recorder rec("tiebreak-ttc-suite",
               "ttc with the suite tie-breakers passes local unanimity, consistency, "
               "strategy-proofness, and non-bossiness on the weak domain");
  WeakMechanism m = ttc_fixed_tiebreakers_mechanism(suite_tb(3));
  WeakDomainFamily fam = weak_universal_family(Market::grand(3));
  rec.expect(check_local_unanimity_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_strategy_proofness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_non_bossiness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_consistency(m, fam, caps), Verdict::kPass);
  return rec.finish();
}

ClaimResult run_no_trade_weak(const Caps& caps) {
  Recorder rec("no-trade-weak",
               "the no-trade mechanism fails exactly local unanimity on the weak domain");
  WeakMechanism m = no_trade_mechanism<WeakPreference>();
  WeakDomainFamily fam = weak_universal_family(Market::grand(3));
  rec.expect(check_local_unanimity_family(m, fam, caps), Verdict::kFail);
  rec.expect(check_strategy_proofness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_non_bossiness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_consistency(m, fam, caps), Verdict::kPass);
  return rec.finish();
}

ClaimResult run_patchwork_consistency(const Caps& caps) {
  Recorder rec("patchwork-consistency",
               "the grand-market patch passes consistency at n=3 (proper submarkets admit no "
               "ties, so both patches agree there) and fails consistency at n=4");
  Market g3 = Market::grand(3);
  WeakMechanism pw3 = suite_patchwork(3);
  WeakDomainFamily fam3 = weak_universal_family(g3);

  // the construction's premise holds: the two tie-breakers disagree on a
  // grand economy with a tie
  WeakEconomy tied = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o2} > {o3}\n"
      "3: {o1} > {o2} > {o3}\n");
  Allocation lhs = run_ttc_fixed_tiebreakers(tied, suite_tb(3)).allocation;
  Allocation rhs = run_ttc_fixed_tiebreakers(tied, suite_tb_alt(3)).allocation;
  rec.require(to_text(lhs) == "1:o3 2:o2 3:o1" && to_text(rhs) == "1:o2 2:o1 3:o3",
              "the two tie-breakers separate agents 1's tied tops on the grand market");

  rec.expect(check_local_unanimity_family(pw3, fam3, caps), Verdict::kPass);
  rec.expect(check_strategy_proofness_family(pw3, fam3, caps), Verdict::kPass);
  rec.expect(check_non_bossiness_family(pw3, fam3, caps), Verdict::kPass);
  rec.expect(check_consistency(pw3, fam3, caps), Verdict::kPass);
  rec.note("note: at n=3 every proper submarket has two or fewer objects, where the "
           "endowment-singleton rule leaves no ties to break; the off-grand patch therefore "
           "coincides with the grand tie-breaking and consistency cannot fail");

  // at n=4 a three-agent submarket can carry a tie, and the patch shows
  WeakMechanism pw4 = suite_patchwork(4);
  WeakEconomy grand4 = parse_weak_economy(
      "1: {o2,o3} > {o1} > {o4}\n"
      "2: {o1} > {o2} > {o3} > {o4}\n"
      "3: {o1} > {o3} > {o2} > {o4}\n"
      "4: {o4} > {o1} > {o2} > {o3}\n");
  Allocation full = pw4(grand4);
  rec.require(to_text(full) == "1:o3 2:o2 3:o1 4:o4",
              "n=4 grand economy resolves by the grand tie-breakers: " + to_text(full));
  rec.require(full.of(4) == 4, "agent 4 keeps their endowment, so {4} is removable");
  WeakEconomy reduced = reduce_economy(grand4, Market({1, 2, 3}));
  Allocation after = pw4(reduced);
  rec.require(to_text(after) == "1:o2 2:o1 3:o3",
              "the reduced economy resolves by the alternate tie-breakers: " + to_text(after));
  rec.require(after.of(1) != full.of(1),
              "agent 1's assignment changes after the removal: consistency fails at n=4");
  return rec.finish();
}

ClaimResult run_sp_violator(const Caps& caps) {
  Recorder rec("sp-violator",
               "the tie-breaker switch mechanism fails exactly strategy-proofness, with the "
               "documented manipulation");
  WeakMechanism m = sp_violator_mechanism();
  WeakDomainFamily fam = weak_universal_family(Market::grand(3));
  rec.expect(check_local_unanimity_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_non_bossiness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_consistency(m, fam, caps), Verdict::kPass);

  CheckReport sp = check_strategy_proofness(m, weak_universal(Market::grand(3)), caps);
  rec.expect(sp, Verdict::kFail);

  // the documented manipulation: with {o1,o3} tied on top, agent 2 is served
  // by the grand tie-breakers; narrowing the report to o1 alone flips the
  // profile into the patched region and agent 2 walks away with o1
  WeakEconomy truth = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1,o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  Allocation honest = m(truth);
  rec.require(to_text(honest) == "1:o3 2:o2 3:o1",
              "truthful outcome assigns o2 to agent 2: " + to_text(honest));
  WeakEconomy lie = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o2} > {o3}\n"
      "3: {o1} > {o2} > {o3}\n");
  Allocation gamed = m(lie);
  rec.require(to_text(gamed) == "1:o2 2:o1 3:o3",
              "misreporting o1 as the only top yields o1: " + to_text(gamed));
  rec.require(truth.pref_of(2).prefers(gamed.of(2), honest.of(2)),
              "agent 2 strictly prefers the gamed assignment under the true preference");
  return rec.finish();
}

ClaimResult run_bossy(const Caps& caps) {
  Recorder rec("bossy",
               "the frozen-cycle mechanism fails exactly non-bossiness, with the documented "
               "witness");
  WeakMechanism m = bossy_mechanism();
  WeakDomainFamily fam = weak_universal_family(Market::grand(3));
  rec.expect(check_local_unanimity_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_strategy_proofness_family(m, fam, caps), Verdict::kPass);
  rec.expect(check_consistency(m, fam, caps), Verdict::kPass);

  CheckReport nb = check_non_bossiness(m, weak_universal(Market::grand(3)), caps);
  rec.expect(nb, Verdict::kFail);

  WeakEconomy narrow = parse_weak_economy(
      "1: {o2} > {o1} > {o3}\n"
      "2: {o1} > {o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  Allocation swap = m(narrow);
  rec.require(to_text(swap) == "1:o2 2:o1 3:o3",
              "with o2 alone on top, agents 1 and 2 swap: " + to_text(swap));
  WeakEconomy widened = parse_weak_economy(
      "1: {o2,o3} > {o1}\n"
      "2: {o1} > {o3} > {o2}\n"
      "3: {o1} > {o2} > {o3}\n");
  Allocation cycle = m(widened);
  rec.require(to_text(cycle) == "1:o2 2:o3 3:o1",
              "widening agent 1's top tier triggers the frozen cycle: " + to_text(cycle));
  rec.require(swap.of(1) == cycle.of(1) && !(swap == cycle),
              "agent 1's own assignment is unchanged while the allocation moves");
  return rec.finish();
}

ClaimResult run_ir_audit(const Caps& caps) {
  Recorder rec("ir-implication-audit",
               "no catalog mechanism on a top-one-rich strict domain passes local unanimity "
               "and strategy-proofness while failing individual rationality");
  auto audit_one = [&](const StrictMechanism& m, const StrictDomain& d) {
    IrImplicationAudit a = audit_lu_sp_implies_ir(m, d, caps);
    std::ostringstream out;
    out << m.name << " on " << d.name << "(n=" << d.market.size()
        << "): lu=" << to_string(a.local_unanimity.verdict)
        << " sp=" << to_string(a.strategy_proofness.verdict)
        << " ir=" << to_string(a.individual_rationality.verdict);
    rec.require(a.implication_holds, out.str());
  };
  for (int n : {3, 4}) {
    Market g = Market::grand(n);
    std::vector<StrictDomain> domains = {all_strict(g), single_peaked(g, ascending(n)),
                                         minimal_top_one_rich(g), minimal_top_two_rich(g)};
    for (const StrictDomain& d : domains) {
      rec.require(check_top_one_richness(d),
                  d.name + "(n=" + std::to_string(n) + ") is top-one-rich");
      for (const StrictMechanism& m : {ttc_mechanism(), no_trade_mechanism<StrictPreference>(),
                                       first_step_only_mechanism()})
        audit_one(m, d);
    }
  }
  audit_one(single_peaked_example_mechanism(4), single_peaked(Market::grand(4), ascending(4)));
  rec.require(!check_top_one_richness(single_dipped(Market::grand(3), ascending(3))),
              "the single-dipped domain is not top-one-rich and sits outside the audit");
  return rec.finish();
}

ClaimResult run_weak_pareto_audit(const Caps& caps) {
  Recorder rec("weak-pareto-implication-audit",
               "no catalog mechanism on the weak domain passes local unanimity, "
               "strategy-proofness, and non-bossiness while failing weak Pareto efficiency");
  auto audit_one = [&](const WeakMechanism& m, const WeakDomain& d) {
    WeakParetoImplicationAudit a = audit_lu_sp_nb_implies_weak_pareto(m, d, caps);
    std::ostringstream out;
    out << m.name << " on " << d.name << "(n=" << d.market.size()
        << "): lu=" << to_string(a.local_unanimity.verdict)
        << " sp=" << to_string(a.strategy_proofness.verdict)
        << " nb=" << to_string(a.non_bossiness.verdict)
        << " weak-pareto=" << to_string(a.weak_pareto.verdict);
    rec.require(a.implication_holds, out.str());
  };
  {
    WeakDomain d = weak_universal(Market::grand(3));
    for (const WeakMechanism& m :
         {ttc_fixed_tiebreakers_mechanism(suite_tb(3)), no_trade_mechanism<WeakPreference>(),
          suite_patchwork(3), sp_violator_mechanism(), bossy_mechanism()})
      audit_one(m, d);
  }
  {
    WeakDomain d = weak_universal(Market::grand(4));
    for (const WeakMechanism& m :
         {ttc_fixed_tiebreakers_mechanism(suite_tb(4)), no_trade_mechanism<WeakPreference>(),
          suite_patchwork(4)})
      audit_one(m, d);
  }
  return rec.finish();
}

ClaimResult run_walkthrough(const Caps& caps) {
  Recorder rec("walkthrough-derivation",
               "the four-profile worked example: seeding pins 3:o3 everywhere and decides the "
               "double-top profile, then strategy-proofness edges force the 1-2 swap everywhere");
  StrictDomain d(Market::grand(3),
                 {{StrictPreference({2, 1, 3}), StrictPreference({3, 2, 1})},
                  {StrictPreference({1, 2, 3}), StrictPreference({3, 1, 2})},
                  {StrictPreference({3, 1, 2})}},
                 "worked-example");
  MechanismTable t(d, caps);
  rec.require(t.space().size() == 4, "four profiles in the mini space");
  rec.require(seed_local_unanimity(t), "seeding kept every profile satisfiable");
  rec.require(t.masks() == std::vector<std::uint64_t>{0b100, 0b101, 0b101, 0b101},
              "seed golden: profile 0 fully decided by its cycles, the rest pin only 3:o3");

  // replay the two strategy-proofness arguments by hand (profile indices:
  // 0 = both primed, 1 = agent 2 unprimed, 2 = agent 1 unprimed, 3 = both)
  const AllocationUniverse& u = t.universe();
  Allocation stay = u.allocation_at(0), swap = u.allocation_at(2);
  StrictPreference succ1({3, 2, 1});  // agent 1's unprimed list
  rec.require(succ1.prefers(swap.of(1), stay.of(1)),
              "at the unprimed-1 profile, deviating to the primed report reaches the pinned "
              "swap and wins o2 over o1, so 1:o1 candidates die");
  StrictPreference succ2({3, 1, 2});  // agent 2's unprimed list
  rec.require(succ2.prefers(swap.of(2), stay.of(2)),
              "symmetrically agent 2 wins o1 over o2, so 2:o2 candidates die");

  rec.require(propagate_sp(t), "propagation kept every profile satisfiable");
  rec.require(t.masks() == std::vector<std::uint64_t>{0b100, 0b100, 0b100, 0b100},
              "fixpoint golden: every profile decided to the 1-2 swap with 3 at home");
  std::vector<std::uint32_t> ttc = ttc_choices(d, caps);
  bool all_ttc = t.decided();
  for (std::uint64_t p = 0; p < 4 && all_ttc; ++p)
    all_ttc = t.sole_candidate(p) == static_cast<int>(ttc[p]);
  rec.require(all_ttc, "the derived table coincides with ttc on all four profiles");
  return rec.finish();
}

}  // namespace

const std::vector<Claim>& claim_registry() {
  static const std::vector<Claim> registry = {
      {"ttc-axioms-three", "ttc passes the full axiom battery at n=3",
       [](const Caps& c) { return run_ttc_axiom_suite("ttc-axioms-three", 3, 0, c); }},
      {"ttc-axioms-four", "ttc passes the full axiom battery at n=4 (pair coalitions)",
       [](const Caps& c) { return run_ttc_axiom_suite("ttc-axioms-four", 4, 2, c); }},
      {"first-step-equivalence", "both local-unanimity engines agree across the catalog",
       run_first_step_equivalence},
      {"single-peaked-example", "single-peaked exception mechanism: sp holds, gsp fails",
       run_single_peaked_example},
      {"single-dipped-example", "single-dipped swap mechanism: gsp holds, differs from ttc",
       run_single_dipped_example},
      {"top-two-unique", "lu + sp pin ttc on the minimal top-two-rich domain",
       [](const Caps& c) {
         return run_prover_unique("top-two-unique", minimal_top_two_rich(Market::grand(3)), c);
       }},
      {"top-one-unique", "lu + sp pin ttc on the minimal top-one-rich domain",
       [](const Caps& c) {
         return run_prover_unique("top-one-unique", minimal_top_one_rich(Market::grand(3)), c);
       }},
      {"single-dipped-multiplicity", "lu + gsp admit non-ttc mechanisms on single-dipped",
       run_single_dipped_multiplicity},
      {"consistency-unique", "lu + consistency pin ttc across linked markets",
       run_consistency_unique},
      {"lu-only-multiplicity", "dropping consistency reopens the field",
       [](const Caps& c) { return run_axiom_drop("lu-only-multiplicity", true, c); }},
      {"consistency-only-multiplicity", "dropping local unanimity reopens the field",
       [](const Caps& c) { return run_axiom_drop("consistency-only-multiplicity", false, c); }},
      {"tiebreak-ttc-suite", "ttc with fixed tie-breakers passes the weak battery",
       run_tiebreak_suite},
      {"no-trade-weak", "no-trade fails exactly local unanimity on the weak domain",
       run_no_trade_weak},
      {"patchwork-consistency", "the grand-market patch and the n=3 impossibility",
       run_patchwork_consistency},
      {"sp-violator", "tie-breaker switch fails exactly strategy-proofness", run_sp_violator},
      {"bossy", "frozen cycle fails exactly non-bossiness", run_bossy},
      {"ir-implication-audit", "lu + sp imply individual rationality on top-one-rich domains",
       run_ir_audit},
      {"weak-pareto-implication-audit",
       "lu + sp + non-bossiness imply weak Pareto efficiency on the weak domain",
       run_weak_pareto_audit},
      {"walkthrough-derivation", "the four-profile propagation walkthrough", run_walkthrough},
  };
  return registry;
}

const Claim* find_claim(const std::string& id) {
  for (const Claim& c : claim_registry())
    if (c.id == id) return &c;
  return nullptr;
}

}  // namespace ttclab
