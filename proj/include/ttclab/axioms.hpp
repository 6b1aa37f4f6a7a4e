#pragma once
// Exhaustive axiom checkers. Every check enumerates its full profile space
// (within caps), returns a deterministic first-violation witness in a fixed
// scan order, and refuses (rather than degrades) when a budget is exceeded.

#include <cstdint>
#include <optional>
#include <string>

#include "ttclab/caps.hpp"
#include "ttclab/core.hpp"
#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"

namespace ttclab {

enum class Verdict { kPass, kFail, kRefused };
std::string_view to_string(Verdict v);

// Enough to replay the violation with two mechanism evaluations: the profile
// lines give the true economy, the deviation lines the changed reports.
struct Witness {
  Market market = Market::grand(1);
  std::string description;
  std::vector<std::string> profile;    // canonical "agent: preference" lines
  std::vector<std::string> deviation;  // changed lines, empty for one-profile axioms
  std::string before;                  // allocation at the true profile
  std::string after;                   // allocation after deviation / rival allocation

  std::uint64_t profile_index = 0;     // in the market's lexicographic space
  std::vector<AgentId> agents;         // deviating coalition / violating set
  std::vector<int> digits;             // reported preference indices for `agents`
};

struct CheckReport {
  std::string axiom;
  std::string mechanism;
  std::string domain;
  Verdict verdict = Verdict::kPass;
  std::optional<Witness> witness;
  std::uint64_t profiles_examined = 0;
  std::string note;
};

enum class LuEngine { kDirect, kFirstStep, kBoth };
enum class ConsistencyMode { kSetRemoval, kFixedPointRemoval };

template <class Pref>
CheckReport check_individual_rationality(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                         const Caps& caps = {});
template <class Pref>
CheckReport check_pareto_efficiency(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                    const Caps& caps = {});
template <class Pref>
CheckReport check_weak_pareto_efficiency(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                         const Caps& caps = {});
template <class Pref>
CheckReport check_unanimity(const Mechanism<Pref>& m, const Domain<Pref>& d, const Caps& caps = {});

// Two independent engines: kDirect enumerates agent subsets and tests
// unanimously-best suballocations from the definition; kFirstStep inspects
// cycles of the favourite-pointing graph. kBoth runs both and insists they
// agree profile-for-profile.
template <class Pref>
CheckReport check_local_unanimity(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                  const Caps& caps = {}, LuEngine engine = LuEngine::kBoth);

template <class Pref>
CheckReport check_strategy_proofness(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                     const Caps& caps = {});

// Coalitions up to `max_coalition` members (0 = whole market); a deviation
// counts when every member is weakly better off and someone strictly.
template <class Pref>
CheckReport check_group_strategy_proofness(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                           int max_coalition = 0, const Caps& caps = {});

template <class Pref>
CheckReport check_non_bossiness(const Mechanism<Pref>& m, const Domain<Pref>& d,
                                const Caps& caps = {});

template <class Pref>
CheckReport check_welfare_equivalence(const Mechanism<Pref>& a, const Mechanism<Pref>& b,
                                      const Domain<Pref>& d, const Caps& caps = {});

// Variable-population checks: the same axiom enforced over every submarket of
// the family's grand set.
template <class Pref>
CheckReport check_local_unanimity_family(const Mechanism<Pref>& m, const DomainFamily<Pref>& fam,
                                         const Caps& caps = {}, LuEngine engine = LuEngine::kBoth);
template <class Pref>
CheckReport check_strategy_proofness_family(const Mechanism<Pref>& m,
                                            const DomainFamily<Pref>& fam, const Caps& caps = {});
template <class Pref>
CheckReport check_non_bossiness_family(const Mechanism<Pref>& m, const DomainFamily<Pref>& fam,
                                       const Caps& caps = {});
template <class Pref>
CheckReport check_welfare_equivalence_family(const Mechanism<Pref>& a, const Mechanism<Pref>& b,
                                             const DomainFamily<Pref>& fam, const Caps& caps = {});

// Removing a set of agents whose assignments form exactly their endowment set
// (kSetRemoval) must leave the remaining agents' assignments unchanged in the
// reduced economy. kFixedPointRemoval only removes agents keeping their own
// endowment. The family must be closed under restriction.
template <class Pref>
CheckReport check_consistency(const Mechanism<Pref>& m, const DomainFamily<Pref>& fam,
                              const Caps& caps = {},
                              ConsistencyMode mode = ConsistencyMode::kSetRemoval);

// Implication audits over a (mechanism, domain) pair: record the premise and
// conclusion verdicts and whether the implication held.
struct IrImplicationAudit {
  CheckReport local_unanimity, strategy_proofness, individual_rationality;
  bool implication_holds = false;
};
IrImplicationAudit audit_lu_sp_implies_ir(const StrictMechanism& m, const StrictDomain& d,
                                          const Caps& caps = {});

struct WeakParetoImplicationAudit {
  CheckReport local_unanimity, strategy_proofness, non_bossiness, weak_pareto;
  bool implication_holds = false;
};
WeakParetoImplicationAudit audit_lu_sp_nb_implies_weak_pareto(const WeakMechanism& m,
                                                              const WeakDomain& d,
                                                              const Caps& caps = {});

}  // namespace ttclab
