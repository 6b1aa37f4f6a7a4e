#include "ttclab/axioms.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ttclab {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kRefused: return "refused";
  }
  return "?";
}

namespace {

// --- scan machinery --------------------------------------------------------

// Smallest index whose predicate fires, scanned in chunks so the answer (and
// therefore every witness) is independent of the thread count.
template <class Test>
std::optional<std::uint64_t> first_fail(std::uint64_t count, int threads, const Test& test) {
  if (threads <= 1 || count < 4096) {
    for (std::uint64_t i = 0; i < count; ++i)
      if (test(i)) return i;
    return std::nullopt;
  }
  const std::uint64_t chunk =
      std::clamp<std::uint64_t>(count / (static_cast<std::uint64_t>(threads) * 32), 256, 65536);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{count};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    try {
      while (true) {
        std::uint64_t begin = next.fetch_add(chunk);
        if (begin >= count || begin >= best.load(std::memory_order_relaxed)) return;
        std::uint64_t end = std::min(begin + chunk, count);
        for (std::uint64_t i = begin; i < end; ++i) {
          if (i >= best.load(std::memory_order_relaxed)) break;
          if (test(i)) {
            std::uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
            break;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  std::uint64_t found = best.load();
  if (found == count) return std::nullopt;
  return found;
}

// Ranks (strict) or tier indices (weak) for every domain preference, indexed
// by [agent position][domain digit][object id]. Lower is better.
template <class Pref>
struct RankMatrix {
  explicit RankMatrix(const Domain<Pref>& d) {
    int max_id = d.market.agents().back();
    rows.resize(d.per_agent.size());
    for (size_t pos = 0; pos < d.per_agent.size(); ++pos) {
      rows[pos].resize(d.per_agent[pos].size());
      for (size_t digit = 0; digit < d.per_agent[pos].size(); ++digit) {
        auto& row = rows[pos][digit];
        row.assign(max_id + 1, -1);
        const Pref& p = d.per_agent[pos][digit];
        for (ObjectId o : d.market.objects()) {
          if constexpr (std::is_same_v<Pref, WeakPreference>)
            row[o] = static_cast<std::int8_t>(p.tier_of(o));
          else
            row[o] = static_cast<std::int8_t>(p.rank_of(o));
        }
      }
    }
  }
  const std::int8_t* row(int pos, int digit) const { return rows[pos][digit].data(); }
  std::vector<std::vector<std::vector<std::int8_t>>> rows;
};

struct EvalTable {
  int m = 0;
  std::vector<std::uint8_t> obj;
  const std::uint8_t* row(std::uint64_t p) const { return obj.data() + p * m; }
};

template <class Pref>
EvalTable build_table(const Mechanism<Pref>& mech, const ProfileSpace<Pref>& space,
                      const Caps& caps, std::uint64_t& evals_used) {
  evals_used += space.size();
  if (evals_used > caps.max_eval_calls)
    throw CapExceeded("mechanism evaluation budget exceeded");
  EvalTable table;
  table.m = space.agent_count();
  table.obj.resize(space.size() * table.m);
  auto fill = [&](std::uint64_t i) {
    Allocation a = mech(space.economy_at(i));
    for (int pos = 0; pos < table.m; ++pos)
      table.obj[i * table.m + pos] = static_cast<std::uint8_t>(a.objects()[pos]);
    return false;  // never "fails": reuses the chunked scan for the build
  };
  first_fail(space.size(), caps.threads, fill);
  return table;
}

template <class Pref>
std::vector<std::string> economy_lines_text(const Economy<Pref>& e) {
  std::vector<std::string> lines;
  for (int pos = 0; pos < e.market().size(); ++pos) {
    std::ostringstream out;
    out << e.market().agents()[pos] << ": " << to_text(e.prefs()[pos]);
    lines.push_back(out.str());
  }
  return lines;
}

std::string agents_text(const std::vector<AgentId>& agents) {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < agents.size(); ++i) {
    if (i) out << ',';
    out << agents[i];
  }
  out << '}';
  return out.str();
}

std::string alloc_text(const Market& m, const std::uint8_t* row) {
  std::vector<ObjectId> objects(row, row + m.size());
  return to_text(Allocation(m, std::move(objects)));
}

template <class Pref>
CheckReport make_report(std::string axiom, const Mechanism<Pref>& mech, const Domain<Pref>& d) {
  CheckReport rep;
  rep.axiom = std::move(axiom);
  rep.mechanism = mech.name;
  rep.domain = d.name + "(n=" + std::to_string(d.market.size()) + ")";
  return rep;
}

thread_local std::vector<int> tls_digits;

// Shared state for one single-market check.
template <class Pref>
struct Ctx {
  Ctx(const Mechanism<Pref>& mech, const Domain<Pref>& d, const Caps& caps,
      std::uint64_t& evals_used)
      : space(d, caps.max_profiles), ranks(d), table(build_table(mech, space, caps, evals_used)) {}
  ProfileSpace<Pref> space;
  RankMatrix<Pref> ranks;
  EvalTable table;
};

// Wraps the scan-and-witness pattern: `test` is the hot predicate, `describe`
// turns the smallest failing profile into a witness.
template <class Test, class Describe>
void run_scan(CheckReport& rep, std::uint64_t count, const Caps& caps, const Test& test,
              const Describe& describe) {
  std::optional<std::uint64_t> hit = first_fail(count, caps.threads, test);
  if (!hit) {
    rep.verdict = Verdict::kPass;
    rep.profiles_examined = count;
    return;
  }
  rep.verdict = Verdict::kFail;
  rep.profiles_examined = *hit + 1;
  rep.witness = describe(*hit);
}

// --- local unanimity engines ------------------------------------------------

// Unique favourite of each agent position under the profile's digits, or -1.
template <class Pref>
void unique_tops(const ProfileSpace<Pref>& space, const std::vector<int>& digits,
                 std::vector<int>& tops) {
  tops.resize(digits.size());
  for (size_t pos = 0; pos < digits.size(); ++pos) {
    const Pref& p = space.pref(static_cast<int>(pos), digits[pos]);
    auto t = unique_top(p);
    tops[pos] = t ? *t : -1;
  }
}

// Direct-from-definition engine: enumerate agent subsets in ascending bitmask
// order and test for a unanimously best suballocation.
struct LuViolation {
  std::vector<int> member_positions;
  std::vector<ObjectId> tops;
};

template <class Pref>
std::optional<LuViolation> lu_direct_violation(const ProfileSpace<Pref>& space,
                                               const Market& market,
                                               const std::vector<int>& digits,
                                               const std::uint8_t* alloc) {
  thread_local std::vector<int> tops;
  unique_tops(space, digits, tops);
  int m = market.size();
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::uint64_t top_mask = 0, obj_mask = 0;
    bool defined = true;
    for (int pos = 0; pos < m && defined; ++pos) {
      if (!((mask >> pos) & 1)) continue;
      if (tops[pos] < 0) {
        defined = false;
        break;
      }
      top_mask |= std::uint64_t{1} << tops[pos];
      obj_mask |= std::uint64_t{1} << market.agents()[pos];
    }
    if (!defined || top_mask != obj_mask) continue;
    // Unanimously best suballocation exists for this subset; enforce it.
    for (int pos = 0; pos < m; ++pos) {
      if (!((mask >> pos) & 1)) continue;
      if (alloc[pos] != tops[pos]) {
        LuViolation v;
        for (int q = 0; q < m; ++q)
          if ((mask >> q) & 1) {
            v.member_positions.push_back(q);
            v.tops.push_back(tops[q]);
          }
        return v;
      }
    }
  }
  return std::nullopt;
}

// First-step engine: cycles of the favourite-pointing graph must trade.
template <class Pref>
std::optional<LuViolation> lu_first_step_violation(const Economy<Pref>& economy,
                                                   const Market& market,
                                                   const std::uint8_t* alloc) {
  for (const Cycle& c : first_step_cycles(economy)) {
    for (size_t k = 0; k < c.agents.size(); ++k) {
      AgentId a = c.agents[k];
      ObjectId target = c.agents[(k + 1) % c.agents.size()];
      if (alloc[market.position_of(a)] != target) {
        LuViolation v;
        for (AgentId member : c.agents) {
          v.member_positions.push_back(market.position_of(member));
          v.tops.push_back(c.agents[0]);  // placeholder, rebuilt below
        }
        v.tops.clear();
        for (size_t j = 0; j < c.agents.size(); ++j)
          v.tops.push_back(c.agents[(j + 1) % c.agents.size()]);
        std::vector<std::pair<int, ObjectId>> paired;
        for (size_t j = 0; j < v.member_positions.size(); ++j)
          paired.emplace_back(v.member_positions[j], v.tops[j]);
        std::sort(paired.begin(), paired.end());
        for (size_t j = 0; j < paired.size(); ++j) {
          v.member_positions[j] = paired[j].first;
          v.tops[j] = paired[j].second;
        }
        return v;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

// --- single-market checkers -------------------------------------------------

template <class Pref>
CheckReport check_individual_rationality(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                         const Caps& caps) {
  CheckReport rep = make_report("individual-rationality", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    const Market& market = d.market;
    int m = market.size();
    auto violating_agent = [&](std::uint64_t p) -> int {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      const std::uint8_t* row = ctx.table.row(p);
      for (int pos = 0; pos < m; ++pos) {
        const std::int8_t* r = ctx.ranks.row(pos, tls_digits[pos]);
        if (r[row[pos]] > r[market.agents()[pos]]) return pos;
      }
      return -1;
    };
    run_scan(
        rep, ctx.space.size(), caps, [&](std::uint64_t p) { return violating_agent(p) >= 0; },
        [&](std::uint64_t p) {
          int pos = violating_agent(p);
          auto economy = ctx.space.economy_at(p);
          Witness w;
          w.market = market;
          w.profile_index = p;
          w.profile = economy_lines_text(economy);
          w.agents = {market.agents()[pos]};
          w.before = alloc_text(market, ctx.table.row(p));
          w.after = to_text(no_trade_allocation(market));
          std::ostringstream out;
          out << "agent " << market.agents()[pos] << " strictly prefers keeping o"
              << market.agents()[pos] << " to the assigned o" << int(ctx.table.row(p)[pos]);
          w.description = out.str();
          return w;
        });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

namespace {

template <class Pref>
CheckReport check_pareto_impl(const Mechanism<Pref>& mech, const Domain<Pref>& d, const Caps& caps,
                              bool weak) {
  CheckReport rep = make_report(weak ? "weak-pareto-efficiency" : "pareto-efficiency", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    const Market& market = d.market;
    auto alloc_at = [&](std::uint64_t p) {
      const std::uint8_t* row = ctx.table.row(p);
      return Allocation(market, std::vector<ObjectId>(row, row + market.size()));
    };
    auto test = [&](std::uint64_t p) {
      auto economy = ctx.space.economy_at(p);
      Allocation a = alloc_at(p);
      return weak ? !is_weak_pareto_efficient(a, economy, caps.pareto_market_cap)
                  : !is_pareto_efficient(a, economy, caps.pareto_market_cap);
    };
    run_scan(rep, ctx.space.size(), caps, test, [&](std::uint64_t p) {
      auto economy = ctx.space.economy_at(p);
      Witness w;
      w.market = market;
      w.profile_index = p;
      w.profile = economy_lines_text(economy);
      w.before = alloc_text(market, ctx.table.row(p));
      // Recover the dominating allocation for the witness text.
      std::vector<ObjectId> rival = market.objects();
      Allocation mine = alloc_at(p);
      do {
        bool all_ok = true, any_strict = false;
        for (int pos = 0; pos < market.size() && all_ok; ++pos) {
          const Pref& pref = economy.pref_at(pos);
          if (weak)
            all_ok = pref.prefers(rival[pos], mine.objects()[pos]);
          else {
            all_ok = pref.weakly_prefers(rival[pos], mine.objects()[pos]);
            any_strict = any_strict || pref.prefers(rival[pos], mine.objects()[pos]);
          }
        }
        if (all_ok && (weak || any_strict)) break;
      } while (std::next_permutation(rival.begin(), rival.end()));
      w.after = to_text(Allocation(market, rival));
      w.description = weak ? "every agent strictly prefers the rival allocation"
                           : "the rival allocation weakly improves everyone, strictly someone";
      return w;
    });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

}  // namespace

template <class Pref>
CheckReport check_pareto_efficiency(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                    const Caps& caps) {
  return check_pareto_impl(mech, d, caps, false);
}

template <class Pref>
CheckReport check_weak_pareto_efficiency(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                         const Caps& caps) {
  return check_pareto_impl(mech, d, caps, true);
}

template <class Pref>
CheckReport check_unanimity(const Mechanism<Pref>& mech, const Domain<Pref>& d, const Caps& caps) {
  CheckReport rep = make_report("unanimity", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    const Market& market = d.market;
    int m = market.size();
    auto required = [&](std::uint64_t p, std::vector<int>& tops) -> bool {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      unique_tops(ctx.space, tls_digits, tops);
      std::uint64_t top_mask = 0, obj_mask = 0;
      for (int pos = 0; pos < m; ++pos) {
        if (tops[pos] < 0) return false;
        top_mask |= std::uint64_t{1} << tops[pos];
        obj_mask |= std::uint64_t{1} << market.agents()[pos];
      }
      return top_mask == obj_mask;
    };
    auto test = [&](std::uint64_t p) {
      thread_local std::vector<int> tops;
      if (!required(p, tops)) return false;
      const std::uint8_t* row = ctx.table.row(p);
      for (int pos = 0; pos < m; ++pos)
        if (row[pos] != tops[pos]) return true;
      return false;
    };
    run_scan(rep, ctx.space.size(), caps, test, [&](std::uint64_t p) {
      std::vector<int> tops;
      required(p, tops);
      auto economy = ctx.space.economy_at(p);
      Witness w;
      w.market = market;
      w.profile_index = p;
      w.profile = economy_lines_text(economy);
      w.before = alloc_text(market, ctx.table.row(p));
      w.after = to_text(Allocation(market, std::vector<ObjectId>(tops.begin(), tops.end())));
      w.description = "a unanimously best allocation exists but was not selected";
      return w;
    });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

template <class Pref>
CheckReport check_local_unanimity(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                  const Caps& caps, LuEngine engine) {
  CheckReport rep = make_report("local-unanimity", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    const Market& market = d.market;
    int m = market.size();
    auto direct_test = [&](std::uint64_t p) {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      return lu_direct_violation(ctx.space, market, tls_digits, ctx.table.row(p)).has_value();
    };
    auto first_step_test = [&](std::uint64_t p) {
      return lu_first_step_violation(ctx.space.economy_at(p), market, ctx.table.row(p)).has_value();
    };
    auto describe = [&](std::uint64_t p) {
      std::vector<int> digits(m);
      ctx.space.digits_at(p, digits);
      auto economy = ctx.space.economy_at(p);
      auto v = engine == LuEngine::kFirstStep
                   ? lu_first_step_violation(economy, market, ctx.table.row(p))
                   : lu_direct_violation(ctx.space, market, digits, ctx.table.row(p));
      Witness w;
      w.market = market;
      w.profile_index = p;
      w.profile = economy_lines_text(economy);
      w.before = alloc_text(market, ctx.table.row(p));
      for (size_t k = 0; k < v->member_positions.size(); ++k)
        w.agents.push_back(market.agents()[v->member_positions[k]]);
      std::ostringstream out;
      out << "agents " << agents_text(w.agents)
          << " form a unanimously best suballocation that the mechanism denies:";
      for (size_t k = 0; k < w.agents.size(); ++k)
        out << ' ' << w.agents[k] << "->o" << v->tops[k];
      w.description = out.str();
      return w;
    };
    if (engine == LuEngine::kBoth) {
      auto hit_a = first_fail(ctx.space.size(), caps.threads, direct_test);
      auto hit_b = first_fail(ctx.space.size(), caps.threads, first_step_test);
      if (hit_a != hit_b)
        throw Error("local unanimity engines disagree; this is a checker bug");
      run_scan(rep, ctx.space.size(), caps, direct_test, describe);
    } else {
      run_scan(rep, ctx.space.size(), caps,
               engine == LuEngine::kDirect ? std::function<bool(std::uint64_t)>(direct_test)
                                           : std::function<bool(std::uint64_t)>(first_step_test),
               describe);
    }
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

template <class Pref>
CheckReport check_strategy_proofness(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                     const Caps& caps) {
  CheckReport rep = make_report("strategy-proofness", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    int m = d.market.size();
    struct Hit {
      int pos;
      int digit;
    };
    auto find_hit = [&](std::uint64_t p) -> std::optional<Hit> {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      const std::uint8_t* row = ctx.table.row(p);
      for (int pos = 0; pos < m; ++pos) {
        const std::int8_t* truth = ctx.ranks.row(pos, tls_digits[pos]);
        int mine = truth[row[pos]];
        int k = ctx.space.domain_size(pos);
        for (int alt = 0; alt < k; ++alt) {
          if (alt == tls_digits[pos]) continue;
          std::uint64_t p2 = ctx.space.replace_digit(p, pos, tls_digits[pos], alt);
          if (truth[ctx.table.row(p2)[pos]] < mine) return Hit{pos, alt};
        }
      }
      return std::nullopt;
    };
    run_scan(
        rep, ctx.space.size(), caps, [&](std::uint64_t p) { return find_hit(p).has_value(); },
        [&](std::uint64_t p) {
          auto hit = find_hit(p);
          std::vector<int> digits(m);
          ctx.space.digits_at(p, digits);
          auto economy = ctx.space.economy_at(p);
          std::uint64_t p2 = ctx.space.replace_digit(p, hit->pos, digits[hit->pos], hit->digit);
          AgentId agent = d.market.agents()[hit->pos];
          Witness w;
          w.market = d.market;
          w.profile_index = p;
          w.profile = economy_lines_text(economy);
          w.agents = {agent};
          w.digits = {hit->digit};
          std::ostringstream dev;
          dev << agent << ": " << to_text(ctx.space.pref(hit->pos, hit->digit));
          w.deviation = {dev.str()};
          w.before = alloc_text(d.market, ctx.table.row(p));
          w.after = alloc_text(d.market, ctx.table.row(p2));
          std::ostringstream out;
          out << "agent " << agent << " gains by reporting a false preference";
          w.description = out.str();
          return w;
        });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

template <class Pref>
CheckReport check_group_strategy_proofness(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                           int max_coalition, const Caps& caps) {
  int m = d.market.size();
  if (max_coalition <= 0 || max_coalition > m) max_coalition = m;
  CheckReport rep =
      make_report("group-strategy-proofness(" + std::to_string(max_coalition) + ")", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    struct Hit {
      std::vector<int> positions;
      std::vector<int> reports;
    };
    // Coalitions by size then lexicographic members; joint reports in
    // ascending mixed-radix order. First hit is therefore scan-minimal.
    auto find_hit = [&](std::uint64_t p) -> std::optional<Hit> {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      const std::uint8_t* row = ctx.table.row(p);
      std::vector<int> combo;
      std::vector<int> reports;
      for (int size = 1; size <= max_coalition; ++size) {
        combo.assign(size, 0);
        for (int i = 0; i < size; ++i) combo[i] = i;
        while (true) {
          reports.assign(size, 0);
          while (true) {
            std::uint64_t p2 = p;
            for (int i = 0; i < size; ++i)
              p2 = ctx.space.replace_digit(p2, combo[i], tls_digits[combo[i]], reports[i]);
            if (p2 != p) {
              const std::uint8_t* row2 = ctx.table.row(p2);
              bool weak = true, strict = false;
              for (int i = 0; i < size && weak; ++i) {
                int pos = combo[i];
                const std::int8_t* truth = ctx.ranks.row(pos, tls_digits[pos]);
                int now = truth[row2[pos]], was = truth[row[pos]];
                if (now > was) weak = false;
                if (now < was) strict = true;
              }
              if (weak && strict) return Hit{combo, reports};
            }
            int i = size - 1;
            while (i >= 0 && reports[i] + 1 >= ctx.space.domain_size(combo[i])) {
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
      return std::nullopt;
    };
    run_scan(
        rep, ctx.space.size(), caps, [&](std::uint64_t p) { return find_hit(p).has_value(); },
        [&](std::uint64_t p) {
          auto hit = find_hit(p);
          std::vector<int> digits(m);
          ctx.space.digits_at(p, digits);
          auto economy = ctx.space.economy_at(p);
          std::uint64_t p2 = p;
          for (size_t i = 0; i < hit->positions.size(); ++i)
            p2 = ctx.space.replace_digit(p2, hit->positions[i], digits[hit->positions[i]],
                                         hit->reports[i]);
          Witness w;
          w.market = d.market;
          w.profile_index = p;
          w.profile = economy_lines_text(economy);
          for (size_t i = 0; i < hit->positions.size(); ++i) {
            AgentId agent = d.market.agents()[hit->positions[i]];
            w.agents.push_back(agent);
            w.digits.push_back(hit->reports[i]);
            std::ostringstream dev;
            dev << agent << ": " << to_text(ctx.space.pref(hit->positions[i], hit->reports[i]));
            w.deviation.push_back(dev.str());
          }
          w.before = alloc_text(d.market, ctx.table.row(p));
          w.after = alloc_text(d.market, ctx.table.row(p2));
          w.description = "coalition " + agents_text(w.agents) +
                          " misreports jointly; all weakly gain, someone strictly";
          return w;
        });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

template <class Pref>
CheckReport check_non_bossiness(const Mechanism<Pref>& mech, const Domain<Pref>& d,
                                const Caps& caps) {
  CheckReport rep = make_report("non-bossiness", mech, d);
  try {
    std::uint64_t evals = 0;
    Ctx<Pref> ctx(mech, d, caps, evals);
    int m = d.market.size();
    struct Hit {
      int pos;
      int digit;
    };
    auto find_hit = [&](std::uint64_t p) -> std::optional<Hit> {
      tls_digits.resize(m);
      ctx.space.digits_at(p, tls_digits);
      const std::uint8_t* row = ctx.table.row(p);
      for (int pos = 0; pos < m; ++pos) {
        int k = ctx.space.domain_size(pos);
        for (int alt = 0; alt < k; ++alt) {
          if (alt == tls_digits[pos]) continue;
          std::uint64_t p2 = ctx.space.replace_digit(p, pos, tls_digits[pos], alt);
          const std::uint8_t* row2 = ctx.table.row(p2);
          if (row2[pos] != row[pos]) continue;  // own assignment changed: not bossiness
          for (int q = 0; q < m; ++q)
            if (row2[q] != row[q]) return Hit{pos, alt};
        }
      }
      return std::nullopt;
    };
    run_scan(
        rep, ctx.space.size(), caps, [&](std::uint64_t p) { return find_hit(p).has_value(); },
        [&](std::uint64_t p) {
          auto hit = find_hit(p);
          std::vector<int> digits(m);
          ctx.space.digits_at(p, digits);
          auto economy = ctx.space.economy_at(p);
          std::uint64_t p2 = ctx.space.replace_digit(p, hit->pos, digits[hit->pos], hit->digit);
          AgentId agent = d.market.agents()[hit->pos];
          Witness w;
          w.market = d.market;
          w.profile_index = p;
          w.profile = economy_lines_text(economy);
          w.agents = {agent};
          w.digits = {hit->digit};
          std::ostringstream dev;
          dev << agent << ": " << to_text(ctx.space.pref(hit->pos, hit->digit));
          w.deviation = {dev.str()};
          w.before = alloc_text(d.market, ctx.table.row(p));
          w.after = alloc_text(d.market, ctx.table.row(p2));
          std::ostringstream out;
          out << "agent " << agent
              << " changes others' assignments without changing their own";
          w.description = out.str();
          return w;
        });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

template <class Pref>
CheckReport check_welfare_equivalence(const Mechanism<Pref>& a, const Mechanism<Pref>& b,
                                      const Domain<Pref>& d, const Caps& caps) {
  CheckReport rep = make_report("welfare-equivalence", a, d);
  rep.mechanism = a.name + " vs " + b.name;
  try {
    std::uint64_t evals = 0;
    ProfileSpace<Pref> space(d, caps.max_profiles);
    RankMatrix<Pref> ranks(d);
    EvalTable ta = build_table(a, space, caps, evals);
    EvalTable tb = build_table(b, space, caps, evals);
    int m = d.market.size();
    auto violating_agent = [&](std::uint64_t p) -> int {
      tls_digits.resize(m);
      space.digits_at(p, tls_digits);
      const std::uint8_t* ra = ta.row(p);
      const std::uint8_t* rb = tb.row(p);
      for (int pos = 0; pos < m; ++pos) {
        const std::int8_t* r = ranks.row(pos, tls_digits[pos]);
        if (r[ra[pos]] != r[rb[pos]]) return pos;
      }
      return -1;
    };
    run_scan(
        rep, space.size(), caps, [&](std::uint64_t p) { return violating_agent(p) >= 0; },
        [&](std::uint64_t p) {
          int pos = violating_agent(p);
          auto economy = space.economy_at(p);
          Witness w;
          w.market = d.market;
          w.profile_index = p;
          w.profile = economy_lines_text(economy);
          w.agents = {d.market.agents()[pos]};
          w.before = alloc_text(d.market, ta.row(p));
          w.after = alloc_text(d.market, tb.row(p));
          std::ostringstream out;
          out << "agent " << d.market.agents()[pos] << " is not indifferent between the outcomes";
          w.description = out.str();
          return w;
        });
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

// --- family checks ----------------------------------------------------------

namespace {

template <class Pref, class Single>
CheckReport over_family(const Mechanism<Pref>& mech, const DomainFamily<Pref>& fam,
                        const std::string& axiom, const Single& single) {
  if (mech.mode != PopulationMode::kVariable)
    throw Error("family check requires a variable-population mechanism");
  CheckReport rep;
  rep.axiom = axiom;
  rep.mechanism = mech.name;
  rep.domain = fam.name() + "(family n=" + std::to_string(fam.grand().size()) + ")";
  for (const Market& m : all_submarkets(fam.grand())) {
    CheckReport r = single(fam.domain_for(m));
    rep.profiles_examined += r.profiles_examined;
    if (r.verdict != Verdict::kPass) {
      rep.verdict = r.verdict;
      rep.witness = std::move(r.witness);
      rep.note = std::move(r.note);
      return rep;
    }
  }
  rep.verdict = Verdict::kPass;
  return rep;
}

}  // namespace

template <class Pref>
CheckReport check_local_unanimity_family(const Mechanism<Pref>& mech,
                                         const DomainFamily<Pref>& fam, const Caps& caps,
                                         LuEngine engine) {
  return over_family(mech, fam, "local-unanimity", [&](const Domain<Pref>& d) {
    return check_local_unanimity(mech, d, caps, engine);
  });
}

template <class Pref>
CheckReport check_strategy_proofness_family(const Mechanism<Pref>& mech,
                                            const DomainFamily<Pref>& fam, const Caps& caps) {
  return over_family(mech, fam, "strategy-proofness", [&](const Domain<Pref>& d) {
    return check_strategy_proofness(mech, d, caps);
  });
}

template <class Pref>
CheckReport check_non_bossiness_family(const Mechanism<Pref>& mech, const DomainFamily<Pref>& fam,
                                       const Caps& caps) {
  return over_family(mech, fam, "non-bossiness",
                     [&](const Domain<Pref>& d) { return check_non_bossiness(mech, d, caps); });
}

template <class Pref>
CheckReport check_welfare_equivalence_family(const Mechanism<Pref>& a, const Mechanism<Pref>& b,
                                             const DomainFamily<Pref>& fam, const Caps& caps) {
  CheckReport rep = over_family(a, fam, "welfare-equivalence", [&](const Domain<Pref>& d) {
    return check_welfare_equivalence(a, b, d, caps);
  });
  rep.mechanism = a.name + " vs " + b.name;
  return rep;
}

template <class Pref>
CheckReport check_consistency(const Mechanism<Pref>& mech, const DomainFamily<Pref>& fam,
                              const Caps& caps, ConsistencyMode mode) {
  if (mech.mode != PopulationMode::kVariable)
    throw Error("consistency requires a variable-population mechanism");
  CheckReport rep;
  rep.axiom = "consistency";
  rep.mechanism = mech.name;
  rep.domain = fam.name() + "(family n=" + std::to_string(fam.grand().size()) + ")";
  try {
    if (fam.grand().agents().back() > 63) throw CapExceeded("consistency: grand set too large");
    std::uint64_t evals = 0;
    std::vector<Market> markets = all_submarkets(fam.grand());
    // Spaces and evaluation tables for every market, smallest first.
    std::map<std::vector<AgentId>, std::pair<ProfileSpace<Pref>, EvalTable>> per_market;
    for (const Market& m : markets) {
      ProfileSpace<Pref> space(fam.domain_for(m), caps.max_profiles);
      EvalTable table = build_table(mech, space, caps, evals);
      per_market.emplace(m.agents(), std::make_pair(std::move(space), std::move(table)));
    }
    for (const Market& market : markets) {
      if (market.size() < 2) {
        rep.profiles_examined += per_market.at(market.agents()).first.size();
        continue;
      }
      auto& [space, table] = per_market.at(market.agents());
      int m = market.size();
      const Domain<Pref>& dom = space.domain();
      // Restriction digit maps per kept-set bitmask: sub_digit[mask][pos][digit].
      std::vector<std::vector<std::vector<int>>> sub_digit(1u << m);
      std::vector<std::uint64_t> endow_mask(1u << m, 0);
      for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
        std::vector<AgentId> kept;
        for (int pos = 0; pos < m; ++pos)
          if ((mask >> pos) & 1) kept.push_back(market.agents()[pos]);
        Market sub(kept);
        const Domain<Pref>& sub_dom = fam.domain_for(sub);
        sub_digit[mask].resize(m);
        for (int pos = 0; pos < m; ++pos) {
          if (!((mask >> pos) & 1)) continue;
          int sub_pos = sub.position_of(market.agents()[pos]);
          const auto& list = dom.per_agent[pos];
          const auto& sub_list = sub_dom.per_agent[sub_pos];
          sub_digit[mask][pos].resize(list.size());
          for (size_t digit = 0; digit < list.size(); ++digit) {
            Pref r = restrict_preference(list[digit], sub);
            auto it = std::lower_bound(sub_list.begin(), sub_list.end(), r);
            if (it == sub_list.end() || !(*it == r))
              throw Error("domain family is not closed under restriction");
            sub_digit[mask][pos][digit] = static_cast<int>(it - sub_list.begin());
          }
        }
      }
      for (int pos = 0; pos < m; ++pos)
        for (unsigned mask = 1; mask < (1u << m); ++mask)
          if ((mask >> pos) & 1)
            endow_mask[mask] |= std::uint64_t{1} << market.agents()[pos];

      struct Hit {
        unsigned removed_mask;
        int sub_pos;
      };
      auto find_hit = [&](std::uint64_t p) -> std::optional<Hit> {
        tls_digits.resize(m);
        space.digits_at(p, tls_digits);
        const std::uint8_t* row = table.row(p);
        for (unsigned removed = 1; removed + 1 < (1u << m); ++removed) {
          bool removable;
          if (mode == ConsistencyMode::kFixedPointRemoval) {
            removable = true;
            for (int pos = 0; pos < m && removable; ++pos)
              if ((removed >> pos) & 1) removable = row[pos] == market.agents()[pos];
          } else {
            std::uint64_t assigned = 0;
            for (int pos = 0; pos < m; ++pos)
              if ((removed >> pos) & 1) assigned |= std::uint64_t{1} << row[pos];
            removable = assigned == endow_mask[removed];
          }
          if (!removable) continue;
          unsigned kept = ((1u << m) - 1) & ~removed;
          auto& [sub_space, sub_table] = per_market.at([&] {
            std::vector<AgentId> ids;
            for (int pos = 0; pos < m; ++pos)
              if ((kept >> pos) & 1) ids.push_back(market.agents()[pos]);
            return ids;
          }());
          thread_local std::vector<int> sub_digits;
          sub_digits.clear();
          for (int pos = 0; pos < m; ++pos)
            if ((kept >> pos) & 1) sub_digits.push_back(sub_digit[kept][pos][tls_digits[pos]]);
          const std::uint8_t* sub_row = sub_table.row(sub_space.index_of(sub_digits));
          int sub_pos = 0;
          for (int pos = 0; pos < m; ++pos) {
            if (!((kept >> pos) & 1)) continue;
            if (sub_row[sub_pos] != row[pos]) return Hit{removed, sub_pos};
            ++sub_pos;
          }
        }
        return std::nullopt;
      };
      auto hit = first_fail(space.size(), caps.threads, [&](std::uint64_t p) {
        return find_hit(p).has_value();
      });
      if (!hit) {
        rep.profiles_examined += space.size();
        continue;
      }
      std::uint64_t p = *hit;
      auto h = find_hit(p);
      rep.profiles_examined += p + 1;
      rep.verdict = Verdict::kFail;
      auto economy = space.economy_at(p);
      std::vector<AgentId> removed_agents, kept_agents;
      for (int pos = 0; pos < m; ++pos)
        (((h->removed_mask >> pos) & 1) ? removed_agents : kept_agents)
            .push_back(market.agents()[pos]);
      Market sub(kept_agents);
      auto& [sub_space, sub_table] = per_market.at(sub.agents());
      std::vector<int> digits(m);
      space.digits_at(p, digits);
      std::vector<int> sub_digits;
      unsigned kept = ((1u << m) - 1) & ~h->removed_mask;
      for (int pos = 0; pos < m; ++pos)
        if ((kept >> pos) & 1) sub_digits.push_back(sub_digit[kept][pos][digits[pos]]);
      Witness w;
      w.market = market;
      w.profile_index = p;
      w.profile = economy_lines_text(economy);
      w.agents = removed_agents;
      w.deviation = economy_lines_text(reduce_economy(economy, sub));
      w.before = alloc_text(market, table.row(p));
      w.after = alloc_text(sub, sub_table.row(sub_space.index_of(sub_digits)));
      std::ostringstream out;
      out << "removing agents " << agents_text(removed_agents)
          << " changes agent " << sub.agents()[h->sub_pos] << "'s assignment in the reduced economy";
      w.description = out.str();
      rep.witness = std::move(w);
      return rep;
    }
    rep.verdict = Verdict::kPass;
  } catch (const CapExceeded& e) {
    rep.verdict = Verdict::kRefused;
    rep.note = e.what();
  }
  return rep;
}

IrImplicationAudit audit_lu_sp_implies_ir(const StrictMechanism& m, const StrictDomain& d,
                                          const Caps& caps) {
  IrImplicationAudit audit;
  audit.local_unanimity = check_local_unanimity(m, d, caps);
  audit.strategy_proofness = check_strategy_proofness(m, d, caps);
  audit.individual_rationality = check_individual_rationality(m, d, caps);
  bool premise = audit.local_unanimity.verdict == Verdict::kPass &&
                 audit.strategy_proofness.verdict == Verdict::kPass;
  audit.implication_holds =
      !premise || audit.individual_rationality.verdict == Verdict::kPass;
  return audit;
}

WeakParetoImplicationAudit audit_lu_sp_nb_implies_weak_pareto(const WeakMechanism& m,
                                                              const WeakDomain& d,
                                                              const Caps& caps) {
  WeakParetoImplicationAudit audit;
  audit.local_unanimity = check_local_unanimity(m, d, caps);
  audit.strategy_proofness = check_strategy_proofness(m, d, caps);
  audit.non_bossiness = check_non_bossiness(m, d, caps);
  audit.weak_pareto = check_weak_pareto_efficiency(m, d, caps);
  bool premise = audit.local_unanimity.verdict == Verdict::kPass &&
                 audit.strategy_proofness.verdict == Verdict::kPass &&
                 audit.non_bossiness.verdict == Verdict::kPass;
  audit.implication_holds = !premise || audit.weak_pareto.verdict == Verdict::kPass;
  return audit;
}

// --- explicit instantiations ------------------------------------------------

#define TTCLAB_INSTANTIATE(Pref)                                                                  \
  template CheckReport check_individual_rationality(const Mechanism<Pref>&, const Domain<Pref>&, \
                                                    const Caps&);                                 \
  template CheckReport check_pareto_efficiency(const Mechanism<Pref>&, const Domain<Pref>&,      \
                                               const Caps&);                                     \
  template CheckReport check_weak_pareto_efficiency(const Mechanism<Pref>&, const Domain<Pref>&, \
                                                    const Caps&);                                 \
  template CheckReport check_unanimity(const Mechanism<Pref>&, const Domain<Pref>&, const Caps&); \
  template CheckReport check_local_unanimity(const Mechanism<Pref>&, const Domain<Pref>&,        \
                                             const Caps&, LuEngine);                             \
  template CheckReport check_strategy_proofness(const Mechanism<Pref>&, const Domain<Pref>&,     \
                                                const Caps&);                                    \
  template CheckReport check_group_strategy_proofness(const Mechanism<Pref>&,                    \
                                                      const Domain<Pref>&, int, const Caps&);    \
  template CheckReport check_non_bossiness(const Mechanism<Pref>&, const Domain<Pref>&,          \
                                           const Caps&);                                         \
  template CheckReport check_welfare_equivalence(const Mechanism<Pref>&, const Mechanism<Pref>&, \
                                                 const Domain<Pref>&, const Caps&);              \
  template CheckReport check_local_unanimity_family(const Mechanism<Pref>&,                      \
                                                    const DomainFamily<Pref>&, const Caps&,      \
                                                    LuEngine);                                   \
  template CheckReport check_strategy_proofness_family(const Mechanism<Pref>&,                   \
                                                       const DomainFamily<Pref>&, const Caps&);  \
  template CheckReport check_non_bossiness_family(const Mechanism<Pref>&,                        \
                                                  const DomainFamily<Pref>&, const Caps&);       \
  template CheckReport check_welfare_equivalence_family(                                         \
      const Mechanism<Pref>&, const Mechanism<Pref>&, const DomainFamily<Pref>&, const Caps&);   \
  template CheckReport check_consistency(const Mechanism<Pref>&, const DomainFamily<Pref>&,      \
                                         const Caps&, ConsistencyMode);

TTCLAB_INSTANTIATE(StrictPreference)
TTCLAB_INSTANTIATE(WeakPreference)

#undef TTCLAB_INSTANTIATE

}  // namespace ttclab
