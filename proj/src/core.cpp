#include "ttclab/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace ttclab {

namespace {

constexpr int kMaxId = 120;  // keeps int8 rank tables safe

std::vector<std::int8_t> make_rank_table(const std::vector<ObjectId>& ids, int& max_id) {
  max_id = 0;
  for (ObjectId o : ids) {
    if (o < 1 || o > kMaxId) throw Error("object id out of range");
    max_id = std::max(max_id, o);
  }
  return std::vector<std::int8_t>(static_cast<size_t>(max_id) + 1, -1);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

int parse_int(std::string_view s, const char* what) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return value;
}

ObjectId parse_object(std::string_view s) {
  s = trim(s);
  if (s.size() < 2 || s.front() != 'o') throw ParseError("expected object like 'o3', got '" + std::string(s) + "'");
  return parse_int(s.substr(1), "object id");
}

}  // namespace

Market::Market(std::vector<AgentId> agents) : agents_(std::move(agents)) {
  if (agents_.empty()) throw Error("market must be nonempty");
  std::sort(agents_.begin(), agents_.end());
  for (size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i] < 1 || agents_[i] > kMaxId) throw Error("agent id out of range");
    if (i > 0 && agents_[i] == agents_[i - 1]) throw Error("duplicate agent in market");
  }
}

Market Market::grand(int n) {
  if (n < 1) throw Error("market must be nonempty");
  std::vector<AgentId> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i + 1;
  return Market(std::move(ids));
}

bool Market::contains(AgentId a) const {
  return std::binary_search(agents_.begin(), agents_.end(), a);
}

int Market::position_of(AgentId a) const {
  auto it = std::lower_bound(agents_.begin(), agents_.end(), a);
  if (it == agents_.end() || *it != a) return -1;
  return static_cast<int>(it - agents_.begin());
}

bool Market::is_subset_of(const Market& other) const {
  return std::includes(other.agents_.begin(), other.agents_.end(), agents_.begin(), agents_.end());
}

Market Market::without(const std::vector<AgentId>& removed) const {
  std::vector<AgentId> rem = removed;
  std::sort(rem.begin(), rem.end());
  std::vector<AgentId> keep;
  std::set_difference(agents_.begin(), agents_.end(), rem.begin(), rem.end(),
                      std::back_inserter(keep));
  return Market(std::move(keep));  // throws if everything was removed
}

StrictPreference::StrictPreference(std::vector<ObjectId> order) : order_(std::move(order)) {
  if (order_.empty()) throw Error("preference over empty object set");
  int max_id = 0;
  rank_ = make_rank_table(order_, max_id);
  for (size_t r = 0; r < order_.size(); ++r) {
    if (rank_[order_[r]] != -1) throw Error("object listed twice in preference");
    rank_[order_[r]] = static_cast<std::int8_t>(r);
  }
}

bool StrictPreference::ranks(ObjectId o) const {
  return o >= 1 && o < static_cast<int>(rank_.size()) && rank_[o] != -1;
}

int StrictPreference::rank_of(ObjectId o) const {
  if (!ranks(o)) throw Error("object not ranked by preference");
  return rank_[o];
}

WeakPreference::WeakPreference(AgentId owner, std::vector<std::vector<ObjectId>> tiers)
    : owner_(owner), tiers_(std::move(tiers)) {
  if (tiers_.empty()) throw Error("preference over empty object set");
  std::vector<ObjectId> all;
  for (auto& tier : tiers_) {
    if (tier.empty()) throw Error("empty indifference tier");
    std::sort(tier.begin(), tier.end());
    all.insert(all.end(), tier.begin(), tier.end());
  }
  int max_id = 0;
  tier_index_ = make_rank_table(all, max_id);
  for (size_t t = 0; t < tiers_.size(); ++t)
    for (ObjectId o : tiers_[t]) {
      if (tier_index_[o] != -1) throw Error("object listed twice in preference");
      tier_index_[o] = static_cast<std::int8_t>(t);
    }
  if (owner_ < 1 || owner_ > kMaxId || !ranks(owner_))
    throw Error("weak preference must rank the owner's endowment");
  if (tiers_[tier_index_[owner_]].size() != 1)
    throw Error("owner's endowment may not be tied with another object");
}

int WeakPreference::object_count() const {
  int n = 0;
  for (const auto& tier : tiers_) n += static_cast<int>(tier.size());
  return n;
}

std::optional<ObjectId> WeakPreference::unique_top() const {
  if (tiers_.front().size() == 1) return tiers_.front().front();
  return std::nullopt;
}

bool WeakPreference::ranks(ObjectId o) const {
  return o >= 1 && o < static_cast<int>(tier_index_.size()) && tier_index_[o] != -1;
}

int WeakPreference::tier_of(ObjectId o) const {
  if (!ranks(o)) throw Error("object not ranked by preference");
  return tier_index_[o];
}

Allocation::Allocation(Market m, std::vector<ObjectId> objects_by_position)
    : market_(std::move(m)), objects_(std::move(objects_by_position)) {
  if (static_cast<int>(objects_.size()) != market_.size())
    throw Error("allocation size does not match market");
  std::vector<ObjectId> sorted = objects_;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != market_.objects()) throw Error("allocation is not a bijection onto the endowments");
}

ObjectId Allocation::of(AgentId a) const {
  int pos = market_.position_of(a);
  if (pos < 0) throw Error("allocation: agent not in market");
  return objects_[pos];
}

template <class Pref>
void Economy<Pref>::validate() const {
  if (static_cast<int>(prefs_.size()) != market_.size())
    throw Error("economy: one preference per agent required");
  for (int pos = 0; pos < market_.size(); ++pos) {
    const Pref& p = prefs_[pos];
    if constexpr (std::is_same_v<Pref, WeakPreference>) {
      if (p.owner() != market_.agents()[pos]) throw Error("economy: preference owner mismatch");
      if (p.object_count() != market_.size()) throw Error("economy: preference must rank exactly the market's objects");
    } else {
      if (p.size() != market_.size()) throw Error("economy: preference must rank exactly the market's objects");
    }
    for (ObjectId o : market_.objects())
      if (!p.ranks(o)) throw Error("economy: preference must rank exactly the market's objects");
  }
}

template void Economy<StrictPreference>::validate() const;
template void Economy<WeakPreference>::validate() const;

ObjectId top(const StrictPreference& p) { return p.top(); }
std::optional<ObjectId> unique_top(const StrictPreference& p) { return p.unique_top(); }
std::optional<ObjectId> unique_top(const WeakPreference& p) { return p.unique_top(); }

StrictPreference restrict_preference(const StrictPreference& p, const Market& submarket) {
  std::vector<ObjectId> kept;
  for (ObjectId o : p.order())
    if (submarket.contains(o)) kept.push_back(o);
  if (static_cast<int>(kept.size()) != submarket.size())
    throw Error("restriction: preference does not cover the submarket");
  return StrictPreference(std::move(kept));
}

WeakPreference restrict_preference(const WeakPreference& p, const Market& submarket) {
  std::vector<std::vector<ObjectId>> kept;
  int covered = 0;
  for (const auto& tier : p.tiers()) {
    std::vector<ObjectId> t;
    for (ObjectId o : tier)
      if (submarket.contains(o)) t.push_back(o);
    covered += static_cast<int>(t.size());
    if (!t.empty()) kept.push_back(std::move(t));
  }
  if (covered != submarket.size()) throw Error("restriction: preference does not cover the submarket");
  return WeakPreference(p.owner(), std::move(kept));
}

template <class Pref>
Economy<Pref> reduce_economy(const Economy<Pref>& e, const Market& submarket) {
  if (!submarket.is_subset_of(e.market())) throw Error("reduction: submarket not contained in market");
  std::vector<Pref> prefs;
  prefs.reserve(submarket.size());
  for (AgentId a : submarket.agents()) prefs.push_back(restrict_preference(e.pref_of(a), submarket));
  return Economy<Pref>(submarket, std::move(prefs));
}

Allocation no_trade_allocation(const Market& m) { return Allocation(m, m.objects()); }

template <class Pref>
bool is_individually_rational(const Allocation& a, const Economy<Pref>& e) {
  const Market& m = e.market();
  for (int pos = 0; pos < m.size(); ++pos)
    if (!e.pref_at(pos).weakly_prefers(a.objects()[pos], m.agents()[pos])) return false;
  return true;
}

namespace {

enum class Dominance { kWeak, kStrict };

// Does some rival allocation dominate `a`? kWeak: everyone weakly better and
// someone strictly. kStrict: everyone strictly better.
template <class Pref>
bool is_dominated(const Allocation& a, const Economy<Pref>& e, Dominance mode, int market_cap) {
  const Market& m = e.market();
  if (m.size() > market_cap) throw CapExceeded("pareto check: market exceeds enumeration cap");
  std::vector<ObjectId> rival = m.objects();  // sorted: permutation start
  do {
    bool any_strict = false;
    bool ok = true;
    for (int pos = 0; pos < m.size() && ok; ++pos) {
      const Pref& p = e.pref_at(pos);
      ObjectId mine = a.objects()[pos];
      if (mode == Dominance::kStrict) {
        ok = p.prefers(rival[pos], mine);
      } else {
        ok = p.weakly_prefers(rival[pos], mine);
        any_strict = any_strict || p.prefers(rival[pos], mine);
      }
    }
    if (ok && (mode == Dominance::kStrict || any_strict)) return true;
  } while (std::next_permutation(rival.begin(), rival.end()));
  return false;
}

}  // namespace

template <class Pref>
bool is_pareto_efficient(const Allocation& a, const Economy<Pref>& e, int market_cap) {
  return !is_dominated(a, e, Dominance::kWeak, market_cap);
}

template <class Pref>
bool is_weak_pareto_efficient(const Allocation& a, const Economy<Pref>& e, int market_cap) {
  return !is_dominated(a, e, Dominance::kStrict, market_cap);
}

template <class Pref>
bool is_unanimously_best(const Allocation& sub, const Economy<Pref>& e, const Market& J) {
  if (!J.is_subset_of(e.market())) throw Error("unanimously best: J not contained in market");
  if (!(sub.market() == J)) throw Error("unanimously best: suballocation must be over J");
  for (AgentId i : J.agents()) {
    auto t = unique_top(e.pref_of(i));
    if (!t || sub.of(i) != *t) return false;
  }
  return true;
}

template Economy<StrictPreference> reduce_economy(const Economy<StrictPreference>&, const Market&);
template Economy<WeakPreference> reduce_economy(const Economy<WeakPreference>&, const Market&);
template bool is_individually_rational(const Allocation&, const Economy<StrictPreference>&);
template bool is_individually_rational(const Allocation&, const Economy<WeakPreference>&);
template bool is_pareto_efficient(const Allocation&, const Economy<StrictPreference>&, int);
template bool is_pareto_efficient(const Allocation&, const Economy<WeakPreference>&, int);
template bool is_weak_pareto_efficient(const Allocation&, const Economy<StrictPreference>&, int);
template bool is_weak_pareto_efficient(const Allocation&, const Economy<WeakPreference>&, int);
template bool is_unanimously_best(const Allocation&, const Economy<StrictPreference>&, const Market&);
template bool is_unanimously_best(const Allocation&, const Economy<WeakPreference>&, const Market&);

// --- text encoding ---------------------------------------------------------

std::string to_text(const StrictPreference& p) {
  std::ostringstream out;
  for (size_t i = 0; i < p.order().size(); ++i) {
    if (i) out << " > ";
    out << 'o' << p.order()[i];
  }
  return out.str();
}

std::string to_text(const WeakPreference& p) {
  std::ostringstream out;
  for (size_t t = 0; t < p.tiers().size(); ++t) {
    if (t) out << " > ";
    out << '{';
    for (size_t i = 0; i < p.tiers()[t].size(); ++i) {
      if (i) out << ',';
      out << 'o' << p.tiers()[t][i];
    }
    out << '}';
  }
  return out.str();
}

std::string to_text(const Allocation& a) {
  std::ostringstream out;
  for (int pos = 0; pos < a.market().size(); ++pos) {
    if (pos) out << ' ';
    out << a.market().agents()[pos] << ":o" << a.objects()[pos];
  }
  return out.str();
}

namespace {

// Yields (agent, body) pairs for nonempty non-comment lines.
std::vector<std::pair<AgentId, std::string_view>> economy_lines(std::string_view text) {
  std::vector<std::pair<AgentId, std::string_view>> out;
  for (std::string_view raw : split(text, '\n')) {
    if (size_t hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'agent: preference' line");
    AgentId agent = parse_int(line.substr(0, colon), "agent id");
    out.emplace_back(agent, trim(line.substr(colon + 1)));
  }
  if (out.empty()) throw ParseError("no agent lines found");
  std::sort(out.begin(), out.end());
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i].first == out[i - 1].first) throw ParseError("duplicate agent line");
  return out;
}

}  // namespace

std::string to_text(const StrictEconomy& e) {
  std::ostringstream out;
  for (int pos = 0; pos < e.market().size(); ++pos)
    out << e.market().agents()[pos] << ": " << to_text(e.prefs()[pos]) << '\n';
  return out.str();
}

std::string to_text(const WeakEconomy& e) {
  std::ostringstream out;
  for (int pos = 0; pos < e.market().size(); ++pos)
    out << e.market().agents()[pos] << ": " << to_text(e.prefs()[pos]) << '\n';
  return out.str();
}

bool economy_text_is_weak(std::string_view text) {
  return text.find('{') != std::string_view::npos;
}

std::vector<std::pair<AgentId, std::string>> parse_agent_lines(std::string_view text) {
  std::vector<std::pair<AgentId, std::string>> out;
  for (auto [agent, body] : economy_lines(text)) out.emplace_back(agent, std::string(body));
  return out;
}

StrictPreference parse_strict_preference(std::string_view body) {
  std::vector<ObjectId> order;
  for (std::string_view tok : split(body, '>')) order.push_back(parse_object(tok));
  return StrictPreference(std::move(order));
}

WeakPreference parse_weak_preference(AgentId owner, std::string_view body) {
  std::vector<std::vector<ObjectId>> tiers;
  for (std::string_view tok : split(body, '>')) {
    tok = trim(tok);
    std::vector<ObjectId> tier;
    if (!tok.empty() && tok.front() == '{') {
      if (tok.back() != '}') throw ParseError("unterminated tier brace");
      for (std::string_view obj : split(tok.substr(1, tok.size() - 2), ','))
        tier.push_back(parse_object(obj));
    } else {
      tier.push_back(parse_object(tok));
    }
    tiers.push_back(std::move(tier));
  }
  return WeakPreference(owner, std::move(tiers));
}

StrictEconomy parse_strict_economy(std::string_view text) {
  std::vector<AgentId> agents;
  std::vector<StrictPreference> prefs;
  for (auto [agent, body] : economy_lines(text)) {
    agents.push_back(agent);
    prefs.push_back(parse_strict_preference(body));
  }
  return StrictEconomy(Market(std::move(agents)), std::move(prefs));
}

WeakEconomy parse_weak_economy(std::string_view text) {
  std::vector<AgentId> agents;
  std::vector<WeakPreference> prefs;
  for (auto [agent, body] : economy_lines(text)) {
    agents.push_back(agent);
    prefs.push_back(parse_weak_preference(agent, body));
  }
  return WeakEconomy(Market(std::move(agents)), std::move(prefs));
}

Allocation parse_allocation(std::string_view line, const Market& m) {
  std::vector<ObjectId> objects(m.size(), 0);
  std::istringstream in{std::string(trim(line))};
  std::string tok;
  int seen = 0;
  while (in >> tok) {
    size_t colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'agent:object' token");
    AgentId a = parse_int(std::string_view(tok).substr(0, colon), "agent id");
    int pos = m.position_of(a);
    if (pos < 0) throw ParseError("allocation names an agent outside the market");
    objects[pos] = parse_object(std::string_view(tok).substr(colon + 1));
    ++seen;
  }
  if (seen != m.size()) throw ParseError("allocation must name every agent exactly once");
  return Allocation(m, std::move(objects));
}

}  // namespace ttclab
