// ttclab: run | verify | prove | reproduce
//
// Exit codes: 0 expected verdict, 1 unexpected verdict, 2 refusal (a resource
// cap stopped the check), 3 configuration or parse error.

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttclab/axioms.hpp"
#include "ttclab/claims.hpp"
#include "ttclab/core.hpp"
#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"
#include "ttclab/ttc.hpp"
#include "ttclab/uniqueness.hpp"

using nlohmann::ordered_json;
using namespace ttclab;

namespace {

constexpr int kSchemaVersion = 1;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Caps caps_from(int threads) {
  Caps caps;
  caps.threads = threads;
  if (const char* env = std::getenv("TTCLAB_CAP_PROFILES")) {
    try {
      caps.max_profiles = std::stoull(env);
    } catch (const std::exception&) {
      throw Error("TTCLAB_CAP_PROFILES is not a number: " + std::string(env));
    }
  }
  return caps;
}

std::vector<ObjectId> parse_order(const std::string& text, int n) {
  if (text.empty()) {
    std::vector<ObjectId> axis;
    for (int i = 1; i <= n; ++i) axis.push_back(i);
    return axis;
  }
  std::vector<ObjectId> axis;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string trimmed;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (!trimmed.empty() && trimmed[0] == 'o') trimmed.erase(0, 1);
    try {
      axis.push_back(std::stoi(trimmed));
    } catch (const std::exception&) {
      throw Error("--order entries look like o3,o1,o2: got '" + item + "'");
    }
  }
  return axis;
}

// --- domain construction -----------------------------------------------------

const std::vector<std::string> kStrictDomains = {"all-strict", "single-peaked", "single-dipped",
                                                 "top1-min", "top2-min"};

bool is_weak_domain(const std::string& name) { return name == "weak-universal"; }

StrictDomain build_strict_domain(const std::string& name, int n, const std::vector<ObjectId>& order) {
  Market g = Market::grand(n);
  if (name == "all-strict") return all_strict(g);
  if (name == "single-peaked") return single_peaked(g, order);
  if (name == "single-dipped") return single_dipped(g, order);
  if (name == "top1-min") return minimal_top_one_rich(g);
  if (name == "top2-min") return minimal_top_two_rich(g);
  throw Error("unknown domain: " + name +
              " (expected all-strict, single-peaked, single-dipped, top1-min, top2-min, "
              "weak-universal)");
}

StrictDomainFamily build_strict_family(const std::string& name, int n,
                                       const std::vector<ObjectId>& order) {
  Market g = Market::grand(n);
  if (name == "all-strict") return all_strict_family(g);
  if (name == "single-peaked") return single_peaked_family(g, order);
  if (name == "single-dipped") return single_dipped_family(g, order);
  throw Error("consistency needs a restriction-closed family: all-strict, single-peaked, "
              "single-dipped, or weak-universal");
}

// --- mechanism construction --------------------------------------------------

StrictMechanism build_strict_mechanism(const std::string& name, int n) {
  if (name.rfind("patchwork:", 0) == 0) {
    std::string rest = name.substr(10);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw Error("strict patchwork spelling: patchwork:<on-grand>:<elsewhere>");
    StrictMechanism grand_mech = make_strict_mechanism(rest.substr(0, colon), n);
    StrictMechanism elsewhere = make_strict_mechanism(rest.substr(colon + 1), n);
    return market_patchwork_mechanism<StrictPreference>(Market::grand(n), std::move(grand_mech),
                                                        std::move(elsewhere));
  }
  return make_strict_mechanism(name, n);
}

WeakMechanism build_weak_mechanism(const std::string& name, int n, const std::string& tiebreak,
                                   const std::string& tiebreak_rest) {
  if ((name == "ttc-tb" || name == "patchwork") && tiebreak.empty())
    throw Error(name + " needs --tiebreak FILE");
  if (name == "patchwork" && tiebreak_rest.empty())
    throw Error("patchwork needs --tiebreak-rest FILE for proper submarkets");
  if ((name == "sp-violator" || name == "bossy") && n != 3)
    throw Error(name + " is defined on the 3-agent grand market; use --n 3");
  std::optional<TieBreakerProfile> tb, tb_rest;
  if (!tiebreak.empty()) tb = parse_tiebreakers(slurp(tiebreak));
  if (!tiebreak_rest.empty()) tb_rest = parse_tiebreakers(slurp(tiebreak_rest));
  return make_weak_mechanism(name, Market::grand(n), tb, tb_rest);
}

// --- report rendering --------------------------------------------------------

ordered_json witness_json(const Witness& w) {
  ordered_json j;
  j["description"] = w.description;
  j["profile_index"] = w.profile_index;
  j["market"] = w.market.agents();
  j["agents"] = w.agents;
  j["profile"] = w.profile;
  if (!w.deviation.empty()) j["deviation"] = w.deviation;
  j["before"] = w.before;
  j["after"] = w.after;
  return j;
}

ordered_json report_json(const CheckReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["axiom"] = r.axiom;
  j["mechanism"] = r.mechanism;
  j["domain"] = r.domain;
  j["verdict"] = to_string(r.verdict);
  j["profiles_examined"] = r.profiles_examined;
  if (r.witness.has_value()) j["witness"] = witness_json(*r.witness);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void print_report_text(const CheckReport& r) {
  std::cout << "axiom: " << r.axiom << "\n"
            << "mechanism: " << r.mechanism << "\n"
            << "domain: " << r.domain << "\n"
            << "verdict: " << to_string(r.verdict) << "\n"
            << "profiles_examined: " << r.profiles_examined << "\n";
  if (r.witness.has_value()) {
    const Witness& w = *r.witness;
    std::cout << "witness:\n"
              << "  profile_index: " << w.profile_index << "\n"
              << "  description: " << w.description << "\n";
    std::cout << "  agents:";
    for (AgentId a : w.agents) std::cout << " " << a;
    std::cout << "\n  profile:\n";
    for (const auto& l : w.profile) std::cout << "    " << l << "\n";
    if (!w.deviation.empty()) {
      std::cout << "  deviation:\n";
      for (const auto& l : w.deviation) std::cout << "    " << l << "\n";
    }
    if (!w.before.empty()) std::cout << "  before: " << w.before << "\n";
    if (!w.after.empty()) std::cout << "  after:  " << w.after << "\n";
  }
  if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
}

int verdict_exit(const CheckReport& r, const std::string& expect) {
  if (to_string(r.verdict) == expect) return 0;
  return r.verdict == Verdict::kRefused ? 2 : 1;
}

// --- verify ------------------------------------------------------------------

struct AxiomRequest {
  std::string token;   // ir | pareto | weak-pareto | unanimity | lu | sp | gsp | nb | consistency
  int coalition = 0;   // gsp only: 0 = whole market
};

AxiomRequest parse_axiom(std::string text, int coalition_flag) {
  AxiomRequest req;
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    req.coalition = std::stoi(text.substr(colon + 1));
    text = text.substr(0, colon);
  } else {
    req.coalition = coalition_flag;
  }
  req.token = text;
  return req;
}

template <class Pref>
CheckReport dispatch_check(const AxiomRequest& req, const Mechanism<Pref>& m,
                           const Domain<Pref>& d, const Caps& caps, LuEngine engine) {
  if (req.token == "ir") return check_individual_rationality(m, d, caps);
  if (req.token == "pareto") return check_pareto_efficiency(m, d, caps);
  if (req.token == "weak-pareto") return check_weak_pareto_efficiency(m, d, caps);
  if (req.token == "unanimity") return check_unanimity(m, d, caps);
  if (req.token == "lu") return check_local_unanimity(m, d, caps, engine);
  if (req.token == "sp") return check_strategy_proofness(m, d, caps);
  if (req.token == "gsp") return check_group_strategy_proofness(m, d, req.coalition, caps);
  if (req.token == "nb") return check_non_bossiness(m, d, caps);
  throw Error("unknown axiom: " + req.token +
              " (expected ir, pareto, weak-pareto, unanimity, lu, sp, gsp[:k], nb, consistency)");
}

// --- prove -------------------------------------------------------------------

AxiomSet parse_axiom_set(const std::string& list) {
  AxiomSet ax;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "lu") {
      ax.local_unanimity = true;
    } else if (item == "sp") {
      ax.strategy_proofness = true;
    } else if (item == "gsp") {
      ax.gsp_max_coalition = -1;
    } else if (item.rfind("gsp:", 0) == 0) {
      ax.gsp_max_coalition = std::stoi(item.substr(4));
    } else if (item == "consistency") {
      ax.consistency = true;
    } else {
      throw Error("unknown axiom in --axioms: " + item +
                  " (expected lu, sp, gsp[:k], consistency)");
    }
  }
  return ax;
}

std::string plural(std::uint64_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttclab: exhaustive verification for housing-market mechanisms"};
  app.require_subcommand(1);

  // run ------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run ttc on one economy and print the trace");
  std::string run_economy, run_tiebreak;
  bool run_json = false;
  cmd_run->add_option("--economy", run_economy, "economy file, one agent per line")->required();
  cmd_run->add_option("--tiebreak", run_tiebreak, "tie-breaker file (weak economies)");
  cmd_run->add_flag("--json", run_json, "emit a json report");

  // verify ---------------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "exhaustively check one axiom");
  std::string v_mech, v_domain, v_axiom, v_order, v_tiebreak, v_tiebreak_rest;
  std::string v_expect = "pass", v_engine = "both", v_mode = "set";
  int v_n = 3, v_coalition = 0, v_threads = 1;
  bool v_json = false, v_timings = false;
  cmd_verify->add_option("--mechanism", v_mech, "mechanism name")->required();
  cmd_verify->add_option("--domain", v_domain, "domain name")->required();
  cmd_verify->add_option("--axiom", v_axiom, "axiom to check (gsp:k allowed)")->required();
  cmd_verify->add_option("--n", v_n, "number of agents (default 3)");
  cmd_verify->add_option("--order", v_order, "reference object order o1,o2,... (peaked/dipped)");
  cmd_verify->add_option("--tiebreak", v_tiebreak, "tie-breaker file (weak mechanisms)");
  cmd_verify->add_option("--tiebreak-rest", v_tiebreak_rest,
                         "tie-breaker file for proper submarkets (patchwork)");
  cmd_verify->add_option("--coalition-max", v_coalition, "gsp coalition bound (0 = whole market)");
  cmd_verify->add_option("--engine", v_engine, "local-unanimity engine: direct|first-step|both");
  cmd_verify->add_option("--consistency-mode", v_mode, "removability mode: set|fixed-point");
  cmd_verify->add_option("--expect", v_expect, "expected verdict: pass|fail|refused");
  cmd_verify->add_option("--threads", v_threads, "worker threads for profile scans");
  cmd_verify->add_flag("--json", v_json, "emit a json report");
  cmd_verify->add_flag("--timings", v_timings, "include wall-clock time (breaks byte-identity)");

  // prove ----------------------------------------------------------------
  auto* cmd_prove = app.add_subcommand("prove", "enumerate all mechanisms satisfying an axiom set");
  std::string p_domain, p_axioms, p_order;
  int p_n = 3, p_threads = 1;
  std::uint64_t p_branch = ProverOptions{}.branch_limit, p_max_solutions = ProverOptions{}.max_solutions;
  bool p_json = false;
  cmd_prove->add_option("--domain", p_domain, "strict domain name")->required();
  cmd_prove->add_option("--axioms", p_axioms, "comma list: lu,sp,gsp[:k],consistency")->required();
  cmd_prove->add_option("--n", p_n, "number of agents (default 3)");
  cmd_prove->add_option("--order", p_order, "reference object order (peaked/dipped)");
  cmd_prove->add_option("--branch-limit", p_branch, "search nodes before refusal");
  cmd_prove->add_option("--max-solutions", p_max_solutions, "enumeration cutoff");
  cmd_prove->add_option("--threads", p_threads, "worker threads");
  cmd_prove->add_flag("--json", p_json, "emit a json report");

  // reproduce -------------------------------------------------------------
  auto* cmd_repro = app.add_subcommand("reproduce", "re-derive a documented claim end to end");
  std::string r_id;
  int r_threads = 1;
  bool r_json = false, r_list = false;
  cmd_repro->add_option("claim", r_id, "claim id (see --list)");
  cmd_repro->add_flag("--list", r_list, "list claim ids and exit");
  cmd_repro->add_option("--threads", r_threads, "worker threads");
  cmd_repro->add_flag("--json", r_json, "emit a json report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    // --- run -------------------------------------------------------------
    if (cmd_run->parsed()) {
      std::string text = slurp(run_economy);
      TtcTrace trace = [&] {
        if (economy_text_is_weak(text)) {
          if (run_tiebreak.empty())
            throw Error("this economy has ties; provide --tiebreak FILE");
          return run_ttc_fixed_tiebreakers(parse_weak_economy(text),
                                           parse_tiebreakers(slurp(run_tiebreak)));
        }
        if (!run_tiebreak.empty())
          throw Error("--tiebreak only applies to weak economies");
        return run_ttc(parse_strict_economy(text));
      }();
      if (run_json) {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "run";
        ordered_json steps = ordered_json::array();
        for (const TtcStep& s : trace.steps) {
          ordered_json cycles = ordered_json::array();
          for (const Cycle& c : s.cycles) cycles.push_back(c.agents);
          steps.push_back(cycles);
        }
        j["steps"] = steps;
        j["allocation"] = to_text(trace.allocation);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << to_text(trace);
      }
      return 0;
    }

    // --- verify ----------------------------------------------------------
    if (cmd_verify->parsed()) {
      Caps caps = caps_from(v_threads);
      AxiomRequest req = parse_axiom(v_axiom, v_coalition);
      LuEngine engine = LuEngine::kBoth;
      if (v_engine == "direct") engine = LuEngine::kDirect;
      else if (v_engine == "first-step") engine = LuEngine::kFirstStep;
      else if (v_engine != "both") throw Error("--engine must be direct, first-step, or both");
      ConsistencyMode mode = ConsistencyMode::kSetRemoval;
      if (v_mode == "fixed-point") mode = ConsistencyMode::kFixedPointRemoval;
      else if (v_mode != "set") throw Error("--consistency-mode must be set or fixed-point");
      if (v_expect != "pass" && v_expect != "fail" && v_expect != "refused")
        throw Error("--expect must be pass, fail, or refused");

      auto t0 = std::chrono::steady_clock::now();
      CheckReport rep;
      if (is_weak_domain(v_domain)) {
        WeakMechanism m = build_weak_mechanism(v_mech, v_n, v_tiebreak, v_tiebreak_rest);
        if (req.token == "consistency")
          rep = check_consistency(m, weak_universal_family(Market::grand(v_n)), caps, mode);
        else
          rep = dispatch_check(req, m, weak_universal(Market::grand(v_n)), caps, engine);
      } else {
        std::vector<ObjectId> order = parse_order(v_order, v_n);
        StrictMechanism m = build_strict_mechanism(v_mech, v_n);
        if (req.token == "consistency")
          rep = check_consistency(m, build_strict_family(v_domain, v_n, order), caps, mode);
        else
          rep = dispatch_check(req, m, build_strict_domain(v_domain, v_n, order), caps, engine);
      }
      auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);

      if (v_json) {
        ordered_json j = report_json(rep);
        if (v_timings) j["wall_time_ms"] = ms.count();
        std::cout << j.dump(2) << "\n";
      } else {
        print_report_text(rep);
        if (v_timings) std::cout << "wall_time_ms: " << ms.count() << "\n";
      }
      return verdict_exit(rep, v_expect);
    }

    // --- prove -----------------------------------------------------------
    if (cmd_prove->parsed()) {
      Caps caps = caps_from(p_threads);
      if (is_weak_domain(p_domain))
        throw Error("the prover handles strict domains only");
      AxiomSet ax = parse_axiom_set(p_axioms);
      ProverOptions opt;
      opt.branch_limit = p_branch;
      opt.max_solutions = p_max_solutions;
      std::vector<ObjectId> order = parse_order(p_order, p_n);

      bool refused = false;
      std::string note;
      std::uint64_t solutions = 0, nodes = 0, backtracks = 0;
      bool complete = false;
      std::size_t diffs = 0;
      if (ax.consistency) {
        StrictDomainFamily fam = build_strict_family(p_domain, p_n, order);
        LinkedSearchResult r = search_linked_markets(fam, ax, opt, caps);
        refused = r.refused;
        note = r.note;
        solutions = r.solutions.size();
        nodes = r.stats.nodes;
        backtracks = r.stats.backtracks;
        complete = r.stats.complete;
        if (solutions == 1) diffs = diff_vs_ttc_linked(fam, r.solutions[0]).size();
      } else {
        StrictDomain d = build_strict_domain(p_domain, p_n, order);
        SearchResult r = search_all_mechanisms(d, ax, opt, caps);
        refused = r.refused;
        note = r.note;
        solutions = r.solutions.size();
        nodes = r.stats.nodes;
        backtracks = r.stats.backtracks;
        complete = r.stats.complete;
        if (solutions == 1) diffs = diff_vs_ttc(d, r.solutions[0]).size();
      }

      if (p_json) {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "prove";
        j["domain"] = p_domain + "(n=" + std::to_string(p_n) + ")";
        j["axioms"] = p_axioms;
        j["refused"] = refused;
        if (!note.empty()) j["note"] = note;
        j["solutions"] = solutions;
        j["complete"] = complete;
        if (solutions == 1) j["diff_vs_ttc"] = diffs;
        j["nodes"] = nodes;
        j["backtracks"] = backtracks;
        std::cout << j.dump(2) << "\n";
      } else if (refused) {
        std::cout << "refused: " << note << "\n";
      } else {
        std::cout << plural(solutions, "solution");
        if (solutions == 1)
          std::cout << "; diff vs TTC: " << (diffs == 0 ? "empty" : plural(diffs, "profile"));
        if (!complete) std::cout << " (enumeration cut off: " << note << ")";
        std::cout << "\n";
      }
      return refused ? 2 : 0;
    }

    // --- reproduce ---------------------------------------------------------
    if (cmd_repro->parsed()) {
      if (r_list) {
        for (const Claim& c : claim_registry()) std::cout << c.id << ": " << c.title << "\n";
        return 0;
      }
      if (r_id.empty()) throw Error("pass a claim id or --list");
      const Claim* claim = find_claim(r_id);
      if (claim == nullptr) {
        std::ostringstream known;
        for (const Claim& c : claim_registry()) known << "\n  " << c.id;
        throw Error("unknown claim: " + r_id + "; known claims:" + known.str());
      }
      ClaimResult res = claim->run(caps_from(r_threads));
      if (r_json) {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "reproduce";
        j["id"] = res.id;
        j["title"] = claim->title;
        j["expected"] = res.expected;
        j["observed"] = res.observed;
        j["pass"] = res.pass;
        j["lines"] = res.lines;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "claim: " << res.id << "\n"
                  << "title: " << claim->title << "\n"
                  << "expected: " << res.expected << "\n";
        for (const std::string& l : res.lines) std::cout << "  " << l << "\n";
        std::cout << "observed: " << res.observed << "\n"
                  << (res.pass ? "PASS" : "FAIL") << "\n";
      }
      return res.pass ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
