#pragma once
// Core model for Shapley-Scarf housing markets: agents, endowed objects,
// strict/weak preference orders, allocations, and the basic efficiency and
// rationality predicates everything else builds on.
//
// Conventions: agents and objects are 1-based ints; object k is agent k's
// endowment, so a market's object set reuses its agent index set.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ttclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
// Thrown when a requested computation exceeds an enumeration budget. Callers
// surface this as an explicit "refused" verdict, never a silent wrong answer.
struct CapExceeded : Error {
  using Error::Error;
};

using AgentId = int;
using ObjectId = int;

class Market {
 public:
  explicit Market(std::vector<AgentId> agents);
  static Market grand(int n);

  int size() const { return static_cast<int>(agents_.size()); }
  const std::vector<AgentId>& agents() const { return agents_; }
  // Objects share the agent index set (object i = endowment of agent i).
  const std::vector<ObjectId>& objects() const { return agents_; }
  bool contains(AgentId a) const;
  int position_of(AgentId a) const;  // -1 if absent
  bool is_subset_of(const Market& other) const;
  Market without(const std::vector<AgentId>& removed) const;

  friend bool operator==(const Market&, const Market&) = default;
  friend auto operator<=>(const Market&, const Market&) = default;

 private:
  std::vector<AgentId> agents_;  // sorted, unique, nonempty
};

// Linear order over a finite object set, best first.
class StrictPreference {
 public:
  explicit StrictPreference(std::vector<ObjectId> order);

  const std::vector<ObjectId>& order() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }
  ObjectId top() const { return order_.front(); }
  std::optional<ObjectId> unique_top() const { return order_.front(); }
  bool ranks(ObjectId o) const;
  int rank_of(ObjectId o) const;  // 0 is best
  bool prefers(ObjectId a, ObjectId b) const { return rank_of(a) < rank_of(b); }
  bool weakly_prefers(ObjectId a, ObjectId b) const { return rank_of(a) <= rank_of(b); }
  bool indifferent(ObjectId a, ObjectId b) const { return a == b; }

  friend bool operator==(const StrictPreference& x, const StrictPreference& y) {
    return x.order_ == y.order_;
  }
  friend auto operator<=>(const StrictPreference& x, const StrictPreference& y) {
    return x.order_ <=> y.order_;
  }

 private:
  std::vector<ObjectId> order_;
  std::vector<std::int8_t> rank_;  // indexed by object id, -1 = absent
};

// Complete transitive order given as indifference tiers, best tier first.
// The owner's endowment must sit alone in its tier (never tied), which is the
// admissibility rule every weak-preference domain here obeys.
class WeakPreference {
 public:
  WeakPreference(AgentId owner, std::vector<std::vector<ObjectId>> tiers);

  AgentId owner() const { return owner_; }
  const std::vector<std::vector<ObjectId>>& tiers() const { return tiers_; }
  int object_count() const;
  std::optional<ObjectId> unique_top() const;
  bool ranks(ObjectId o) const;
  int tier_of(ObjectId o) const;
  bool prefers(ObjectId a, ObjectId b) const { return tier_of(a) < tier_of(b); }
  bool weakly_prefers(ObjectId a, ObjectId b) const { return tier_of(a) <= tier_of(b); }
  bool indifferent(ObjectId a, ObjectId b) const { return tier_of(a) == tier_of(b); }

  friend bool operator==(const WeakPreference& x, const WeakPreference& y) {
    return x.owner_ == y.owner_ && x.tiers_ == y.tiers_;
  }
  friend auto operator<=>(const WeakPreference& x, const WeakPreference& y) {
    if (auto c = x.owner_ <=> y.owner_; c != 0) return c;
    return x.tiers_ <=> y.tiers_;
  }

 private:
  AgentId owner_;
  std::vector<std::vector<ObjectId>> tiers_;  // each tier sorted ascending
  std::vector<std::int8_t> tier_index_;       // indexed by object id, -1 = absent
};

// Bijection from a market's agents onto its endowment set.
struct Allocation {
  Allocation(Market m, std::vector<ObjectId> objects_by_position);

  const Market& market() const { return market_; }
  const std::vector<ObjectId>& objects() const { return objects_; }
  ObjectId of(AgentId a) const;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  Market market_;
  std::vector<ObjectId> objects_;  // aligned with market_.agents()
};

struct unchecked_t {};
inline constexpr unchecked_t unchecked{};

template <class Pref>
class Economy {
 public:
  Economy(Market m, std::vector<Pref> prefs) : market_(std::move(m)), prefs_(std::move(prefs)) {
    validate();
  }
  // Fast path for enumerators whose preferences were validated at domain
  // construction time.
  Economy(Market m, std::vector<Pref> prefs, unchecked_t)
      : market_(std::move(m)), prefs_(std::move(prefs)) {}

  const Market& market() const { return market_; }
  const std::vector<Pref>& prefs() const { return prefs_; }
  const Pref& pref_of(AgentId a) const {
    int pos = market_.position_of(a);
    if (pos < 0) throw Error("economy: agent not in market");
    return prefs_[pos];
  }
  const Pref& pref_at(int position) const { return prefs_[position]; }

  friend bool operator==(const Economy&, const Economy&) = default;

 private:
  void validate() const;

  Market market_;
  std::vector<Pref> prefs_;  // aligned with market_.agents()
};

using StrictEconomy = Economy<StrictPreference>;
using WeakEconomy = Economy<WeakPreference>;

ObjectId top(const StrictPreference& p);
std::optional<ObjectId> unique_top(const StrictPreference& p);
std::optional<ObjectId> unique_top(const WeakPreference& p);

// Restriction of an order to a submarket's object set (drops absent objects,
// keeps relative ranking). The submarket must be nonempty and covered.
StrictPreference restrict_preference(const StrictPreference& p, const Market& submarket);
WeakPreference restrict_preference(const WeakPreference& p, const Market& submarket);

template <class Pref>
Economy<Pref> reduce_economy(const Economy<Pref>& e, const Market& submarket);

Allocation no_trade_allocation(const Market& m);

template <class Pref>
bool is_individually_rational(const Allocation& a, const Economy<Pref>& e);

// Exact checks by enumeration of all |market|! allocations; markets larger
// than `market_cap` are refused via CapExceeded.
template <class Pref>
bool is_pareto_efficient(const Allocation& a, const Economy<Pref>& e, int market_cap = 7);
template <class Pref>
bool is_weak_pareto_efficient(const Allocation& a, const Economy<Pref>& e, int market_cap = 7);

// True iff `sub` gives every member of J its unique most-preferred object
// among the *whole* economy's object set. J must be a nonempty subset of the
// economy's market and `sub` an allocation over J.
template <class Pref>
bool is_unanimously_best(const Allocation& sub, const Economy<Pref>& e, const Market& J);

// --- canonical text encoding ---------------------------------------------
// One line per agent:  "1: o3 > o1 > o2"   (strict)
//                      "1: {o2,o3} > {o1}" (weak; singleton braces optional)
// Allocations render as "1:o2 2:o1 3:o3". '#' starts a comment line.

std::string to_text(const StrictPreference& p);
std::string to_text(const WeakPreference& p);
std::string to_text(const Allocation& a);
std::string to_text(const StrictEconomy& e);
std::string to_text(const WeakEconomy& e);

bool economy_text_is_weak(std::string_view text);
StrictEconomy parse_strict_economy(std::string_view text);
WeakEconomy parse_weak_economy(std::string_view text);
Allocation parse_allocation(std::string_view line, const Market& m);

// Lower-level pieces of the same grammar, for fixtures that are not full
// economies (tie-breaker files, witness replay).
std::vector<std::pair<AgentId, std::string>> parse_agent_lines(std::string_view text);
StrictPreference parse_strict_preference(std::string_view body);
WeakPreference parse_weak_preference(AgentId owner, std::string_view body);

}  // namespace ttclab
