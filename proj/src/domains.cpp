#include "ttclab/domains.hpp"

#include <algorithm>

namespace ttclab {

namespace {

void validate_axis(const Market& m, const std::vector<ObjectId>& axis) {
  std::vector<ObjectId> sorted = axis;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != m.objects()) throw Error("axis must be a permutation of the market's objects");
}

std::vector<int> axis_positions(const std::vector<ObjectId>& axis) {
  int max_id = 0;
  for (ObjectId o : axis) max_id = std::max(max_id, o);
  std::vector<int> pos(static_cast<size_t>(max_id) + 1, -1);
  for (size_t i = 0; i < axis.size(); ++i) pos[axis[i]] = static_cast<int>(i);
  return pos;
}

}  // namespace

template <class Pref>
Domain<Pref>::Domain(Market m, std::vector<std::vector<Pref>> lists, std::string label)
    : market(std::move(m)), name(std::move(label)), per_agent(std::move(lists)) {
  if (static_cast<int>(per_agent.size()) != market.size())
    throw Error("domain: one preference list per agent required");
  for (int pos = 0; pos < market.size(); ++pos) {
    auto& list = per_agent[pos];
    if (list.empty()) throw Error("domain: empty preference list");
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (const Pref& p : list) {
      if constexpr (std::is_same_v<Pref, WeakPreference>) {
        if (p.owner() != market.agents()[pos]) throw Error("domain: preference owner mismatch");
        if (p.object_count() != market.size()) throw Error("domain: preference must cover the market");
      } else {
        if (p.size() != market.size()) throw Error("domain: preference must cover the market");
      }
      for (ObjectId o : market.objects())
        if (!p.ranks(o)) throw Error("domain: preference must cover the market");
    }
  }
}

template struct Domain<StrictPreference>;
template struct Domain<WeakPreference>;

bool is_single_peaked(const StrictPreference& p, const std::vector<ObjectId>& axis) {
  std::vector<int> pos = axis_positions(axis);
  int peak = pos[p.top()];
  for (ObjectId a : p.order())
    for (ObjectId b : p.order()) {
      if (a == b || a == p.top() || b == p.top()) continue;
      // b strictly between a and the peak forces b above a.
      if ((pos[a] < pos[b] && pos[b] < peak) || (peak < pos[b] && pos[b] < pos[a]))
        if (!p.prefers(b, a)) return false;
    }
  return true;
}

bool is_single_dipped(const StrictPreference& p, const std::vector<ObjectId>& axis) {
  std::vector<int> pos = axis_positions(axis);
  ObjectId dip = p.order().back();
  for (ObjectId a : p.order())
    for (ObjectId b : p.order()) {
      if (a == b || a == dip || b == dip) continue;
      // b strictly between a and the dip forces a above b.
      if ((pos[a] < pos[b] && pos[b] < pos[dip]) || (pos[dip] < pos[b] && pos[b] < pos[a]))
        if (!p.prefers(a, b)) return false;
    }
  return true;
}

namespace {

std::vector<StrictPreference> all_orders(const Market& m) {
  std::vector<ObjectId> perm = m.objects();
  std::vector<StrictPreference> out;
  do out.emplace_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

StrictDomain replicate(const Market& m, std::vector<StrictPreference> list, std::string name) {
  std::vector<std::vector<StrictPreference>> lists(m.size(), list);
  return StrictDomain(m, std::move(lists), std::move(name));
}

}  // namespace

StrictDomain all_strict(const Market& m) {
  return replicate(m, all_orders(m), "all-strict");
}

StrictDomain single_peaked(const Market& m, const std::vector<ObjectId>& axis) {
  validate_axis(m, axis);
  std::vector<StrictPreference> kept;
  for (auto& p : all_orders(m))
    if (is_single_peaked(p, axis)) kept.push_back(std::move(p));
  return replicate(m, std::move(kept), "single-peaked");
}

StrictDomain single_dipped(const Market& m, const std::vector<ObjectId>& axis) {
  validate_axis(m, axis);
  std::vector<StrictPreference> kept;
  for (auto& p : all_orders(m))
    if (is_single_dipped(p, axis)) kept.push_back(std::move(p));
  return replicate(m, std::move(kept), "single-dipped");
}

StrictDomain minimal_top_one_rich(const Market& m) {
  std::vector<StrictPreference> list;
  for (ObjectId o : m.objects()) {
    std::vector<ObjectId> order{o};
    for (ObjectId rest : m.objects())
      if (rest != o) order.push_back(rest);
    list.emplace_back(std::move(order));
  }
  return replicate(m, std::move(list), "top1-min");
}

StrictDomain minimal_top_two_rich(const Market& m) {
  if (m.size() < 2) throw Error("top-two domain needs at least two objects");
  std::vector<StrictPreference> list;
  for (ObjectId first : m.objects())
    for (ObjectId second : m.objects()) {
      if (second == first) continue;
      std::vector<ObjectId> order{first, second};
      for (ObjectId rest : m.objects())
        if (rest != first && rest != second) order.push_back(rest);
      list.emplace_back(std::move(order));
    }
  return replicate(m, std::move(list), "top2-min");
}

std::vector<std::vector<std::vector<ObjectId>>> ordered_partitions(const std::vector<ObjectId>& objects) {
  std::vector<std::vector<std::vector<ObjectId>>> out;
  int n = static_cast<int>(objects.size());
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<std::vector<ObjectId>> current;
  // Pick the first tier as a nonempty subset (bitmask), recurse on the rest.
  auto rec = [&](auto&& self, const std::vector<ObjectId>& remaining) -> void {
    if (remaining.empty()) {
      out.push_back(current);
      return;
    }
    int k = static_cast<int>(remaining.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<ObjectId> tier, rest;
      for (int i = 0; i < k; ++i)
        ((mask >> i) & 1 ? tier : rest).push_back(remaining[i]);
      current.push_back(std::move(tier));
      self(self, rest);
      current.pop_back();
    }
  };
  rec(rec, objects);
  return out;
}

WeakDomain weak_universal(const Market& m) {
  auto partitions = ordered_partitions(m.objects());
  std::vector<std::vector<WeakPreference>> lists;
  lists.reserve(m.size());
  for (AgentId a : m.agents()) {
    std::vector<WeakPreference> list;
    for (const auto& tiers : partitions) {
      // Owner's endowment must sit alone in its tier.
      bool ok = true;
      for (const auto& tier : tiers)
        if (tier.size() > 1 && std::find(tier.begin(), tier.end(), a) != tier.end()) ok = false;
      if (ok) list.emplace_back(a, tiers);
    }
    lists.push_back(std::move(list));
  }
  return WeakDomain(m, std::move(lists), "weak-universal");
}

bool check_top_one_richness(const StrictDomain& d) {
  for (const auto& list : d.per_agent)
    for (ObjectId o : d.market.objects()) {
      bool found = false;
      for (const auto& p : list)
        if (p.top() == o) found = true;
      if (!found) return false;
    }
  return true;
}

bool check_top_two_richness(const StrictDomain& d) {
  for (const auto& list : d.per_agent)
    for (ObjectId first : d.market.objects())
      for (ObjectId second : d.market.objects()) {
        if (first == second) continue;
        bool found = false;
        for (const auto& p : list)
          if (p.order()[0] == first && p.order()[1] == second) found = true;
        if (!found) return false;
      }
  return true;
}

StrictDomainFamily all_strict_family(const Market& grand) {
  return StrictDomainFamily(grand, "all-strict", [](const Market& m) { return all_strict(m); });
}

StrictDomainFamily single_peaked_family(const Market& grand, const std::vector<ObjectId>& axis) {
  validate_axis(grand, axis);
  return StrictDomainFamily(grand, "single-peaked", [axis](const Market& m) {
    std::vector<ObjectId> sub_axis;
    for (ObjectId o : axis)
      if (m.contains(o)) sub_axis.push_back(o);
    return single_peaked(m, sub_axis);
  });
}

StrictDomainFamily single_dipped_family(const Market& grand, const std::vector<ObjectId>& axis) {
  validate_axis(grand, axis);
  return StrictDomainFamily(grand, "single-dipped", [axis](const Market& m) {
    std::vector<ObjectId> sub_axis;
    for (ObjectId o : axis)
      if (m.contains(o)) sub_axis.push_back(o);
    return single_dipped(m, sub_axis);
  });
}

WeakDomainFamily weak_universal_family(const Market& grand) {
  return WeakDomainFamily(grand, "weak-universal", [](const Market& m) { return weak_universal(m); });
}

std::vector<Market> all_submarkets(const Market& grand) {
  int n = grand.size();
  std::vector<Market> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<AgentId> agents;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) agents.push_back(grand.agents()[i]);
    out.emplace_back(std::move(agents));
  }
  std::sort(out.begin(), out.end(), [](const Market& a, const Market& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.agents() < b.agents();
  });
  return out;
}

template <class Pref>
bool check_consistent_domain(const DomainFamily<Pref>& family) {
  for (const Market& m : all_submarkets(family.grand())) {
    const Domain<Pref>& dom = family.domain_for(m);
    for (const Market& sub : all_submarkets(m)) {
      if (sub == m) continue;
      const Domain<Pref>& sub_dom = family.domain_for(sub);
      for (AgentId a : sub.agents()) {
        const auto& sub_list = sub_dom.per_agent[sub.position_of(a)];
        for (const Pref& p : dom.per_agent[m.position_of(a)]) {
          Pref r = restrict_preference(p, sub);
          if (!std::binary_search(sub_list.begin(), sub_list.end(), r)) return false;
        }
      }
    }
  }
  return true;
}

template bool check_consistent_domain(const DomainFamily<StrictPreference>&);
template bool check_consistent_domain(const DomainFamily<WeakPreference>&);

template <class Pref>
ProfileSpace<Pref>::ProfileSpace(const Domain<Pref>& d, std::uint64_t max_profiles) : dom_(&d) {
  int n = d.market.size();
  strides_.assign(n, 1);
  size_ = 1;
  for (int pos = n - 1; pos >= 0; --pos) {
    strides_[pos] = size_;
    std::uint64_t k = d.per_agent[pos].size();
    if (size_ > max_profiles / k) throw CapExceeded("profile space exceeds the profile cap");
    size_ *= k;
  }
  if (size_ > max_profiles) throw CapExceeded("profile space exceeds the profile cap");
}

template <class Pref>
void ProfileSpace<Pref>::digits_at(std::uint64_t idx, std::vector<int>& digits) const {
  digits.resize(strides_.size());
  for (size_t pos = 0; pos < strides_.size(); ++pos) {
    digits[pos] = static_cast<int>(idx / strides_[pos]);
    idx %= strides_[pos];
  }
}

template <class Pref>
std::uint64_t ProfileSpace<Pref>::index_of(const std::vector<int>& digits) const {
  std::uint64_t idx = 0;
  for (size_t pos = 0; pos < strides_.size(); ++pos) idx += digits[pos] * strides_[pos];
  return idx;
}

template <class Pref>
Economy<Pref> ProfileSpace<Pref>::economy_at(std::uint64_t idx) const {
  std::vector<int> digits;
  digits_at(idx, digits);
  return economy_for(digits);
}

template <class Pref>
Economy<Pref> ProfileSpace<Pref>::economy_for(const std::vector<int>& digits) const {
  std::vector<Pref> prefs;
  prefs.reserve(digits.size());
  for (size_t pos = 0; pos < digits.size(); ++pos) prefs.push_back(dom_->per_agent[pos][digits[pos]]);
  return Economy<Pref>(dom_->market, std::move(prefs), unchecked);
}

template class ProfileSpace<StrictPreference>;
template class ProfileSpace<WeakPreference>;

}  // namespace ttclab
