#pragma once
// Preference domains: canonical per-agent preference lists over a market,
// restricted-domain generators (single-peaked, single-dipped, minimal rich,
// weak universal), families of domains across submarkets, and lexicographic
// profile enumeration.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ttclab/caps.hpp"
#include "ttclab/core.hpp"

namespace ttclab {

template <class Pref>
struct Domain {
  Domain(Market m, std::vector<std::vector<Pref>> lists, std::string label = "");

  Market market;
  std::string name;
  std::vector<std::vector<Pref>> per_agent;  // aligned with market.agents(), each sorted+deduped

  const std::vector<Pref>& for_agent(AgentId a) const {
    int pos = market.position_of(a);
    if (pos < 0) throw Error("domain: agent not in market");
    return per_agent[pos];
  }
};

using StrictDomain = Domain<StrictPreference>;
using WeakDomain = Domain<WeakPreference>;

// Reference order parameters (the societal axis) are permutations of the
// market's object set; ascending object id is the conventional default.

bool is_single_peaked(const StrictPreference& p, const std::vector<ObjectId>& axis);
bool is_single_dipped(const StrictPreference& p, const std::vector<ObjectId>& axis);

StrictDomain all_strict(const Market& m);
StrictDomain single_peaked(const Market& m, const std::vector<ObjectId>& axis);
StrictDomain single_dipped(const Market& m, const std::vector<ObjectId>& axis);
StrictDomain minimal_top_one_rich(const Market& m);
StrictDomain minimal_top_two_rich(const Market& m);
WeakDomain weak_universal(const Market& m);

bool check_top_one_richness(const StrictDomain& d);
bool check_top_two_richness(const StrictDomain& d);

// All weak orders (ordered partitions) over a set of objects; the building
// block of the weak universal domain, exposed for oracle-style counting.
std::vector<std::vector<std::vector<ObjectId>>> ordered_partitions(const std::vector<ObjectId>& objects);

// A domain for every submarket of a grand set, generated on demand.
template <class Pref>
class DomainFamily {
 public:
  DomainFamily(Market grand_market, std::string label,
               std::function<Domain<Pref>(const Market&)> generator)
      : grand_(std::move(grand_market)), name_(std::move(label)), gen_(std::move(generator)) {}

  const Market& grand() const { return grand_; }
  const std::string& name() const { return name_; }

  const Domain<Pref>& domain_for(const Market& m) const {
    if (!m.is_subset_of(grand_)) throw Error("domain family: market outside the grand set");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(m.agents());
    if (it == memo_.end())
      it = memo_.emplace(m.agents(), std::make_unique<Domain<Pref>>(gen_(m))).first;
    return *it->second;
  }

 private:
  Market grand_;
  std::string name_;
  std::function<Domain<Pref>(const Market&)> gen_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<AgentId>, std::unique_ptr<Domain<Pref>>> memo_;
};

using StrictDomainFamily = DomainFamily<StrictPreference>;
using WeakDomainFamily = DomainFamily<WeakPreference>;

StrictDomainFamily all_strict_family(const Market& grand);
StrictDomainFamily single_peaked_family(const Market& grand, const std::vector<ObjectId>& axis);
StrictDomainFamily single_dipped_family(const Market& grand, const std::vector<ObjectId>& axis);
WeakDomainFamily weak_universal_family(const Market& grand);

// Every nonempty submarket of `grand`, ordered by size then lexicographically.
std::vector<Market> all_submarkets(const Market& grand);

// True iff restrictions stay inside the family: for every market, member
// preference, and nonempty submarket, the restricted preference is listed in
// the submarket's domain.
template <class Pref>
bool check_consistent_domain(const DomainFamily<Pref>& family);

// Cartesian product of per-agent domains in lexicographic order (first agent
// most significant). Construction refuses spaces larger than `max_profiles`.
template <class Pref>
class ProfileSpace {
 public:
  explicit ProfileSpace(const Domain<Pref>& d, std::uint64_t max_profiles = Caps{}.max_profiles);

  std::uint64_t size() const { return size_; }
  int agent_count() const { return static_cast<int>(strides_.size()); }
  int domain_size(int pos) const { return static_cast<int>(dom_->per_agent[pos].size()); }
  const Domain<Pref>& domain() const { return *dom_; }

  void digits_at(std::uint64_t idx, std::vector<int>& digits) const;
  std::uint64_t index_of(const std::vector<int>& digits) const;
  std::uint64_t replace_digit(std::uint64_t idx, int pos, int old_digit, int new_digit) const {
    return idx + (static_cast<std::uint64_t>(new_digit) - static_cast<std::uint64_t>(old_digit)) * strides_[pos];
  }
  const Pref& pref(int pos, int digit) const { return dom_->per_agent[pos][digit]; }

  Economy<Pref> economy_at(std::uint64_t idx) const;
  Economy<Pref> economy_for(const std::vector<int>& digits) const;

 private:
  const Domain<Pref>* dom_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_;
};

using StrictProfileSpace = ProfileSpace<StrictPreference>;
using WeakProfileSpace = ProfileSpace<WeakPreference>;

}  // namespace ttclab
