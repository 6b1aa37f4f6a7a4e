#pragma once
// Desk-scale characterization prover: axioms become constraints over the full
// profile -> allocation table and a propagate/backtrack search enumerates every
// mechanism satisfying them. Strict preferences only.

#include <cstdint>
#include <string>
#include <vector>

#include "ttclab/axioms.hpp"
#include "ttclab/caps.hpp"
#include "ttclab/domains.hpp"
#include "ttclab/mechanisms.hpp"

namespace ttclab {

// All |market|! allocations in lexicographic order of their object vectors.
// Candidate sets are bitmasks over these indices, which caps markets at 4
// agents (4! = 24 <= 64 bits); larger markets are refused.
class AllocationUniverse {
 public:
  explicit AllocationUniverse(const Market& market);

  const Market& market() const { return market_; }
  int size() const { return static_cast<int>(allocs_.size()); }
  const std::vector<ObjectId>& objects_of(int idx) const { return allocs_[idx]; }
  Allocation allocation_at(int idx) const;
  int index_of(const std::vector<ObjectId>& objects) const;  // -1 if absent
  std::uint64_t full_mask() const { return full_mask_; }
  // Allocations assigning object `o` to the agent at `pos`.
  std::uint64_t assigning(int pos, ObjectId o) const;

 private:
  Market market_;
  std::vector<std::vector<ObjectId>> allocs_;
  std::vector<std::vector<std::uint64_t>> assign_mask_;  // [pos][object id]
  std::uint64_t full_mask_ = 0;
};

// Candidate-allocation sets for every profile of one finite domain. The
// domain must outlive the table.
class MechanismTable {
 public:
  explicit MechanismTable(const StrictDomain& d, const Caps& caps = {});

  const StrictDomain& domain() const { return *dom_; }
  const StrictProfileSpace& space() const { return space_; }
  const AllocationUniverse& universe() const { return universe_; }

  std::uint64_t mask(std::uint64_t p) const { return masks_[p]; }
  void set_mask(std::uint64_t p, std::uint64_t mask) { masks_[p] = mask; }
  int candidate_count(std::uint64_t p) const;
  bool is_singleton(std::uint64_t p) const { return candidate_count(p) == 1; }
  int sole_candidate(std::uint64_t p) const;  // requires singleton
  std::uint64_t decided_count() const;
  bool decided() const { return decided_count() == space_.size(); }
  const std::vector<std::uint64_t>& masks() const { return masks_; }
  std::vector<std::uint64_t>& masks() { return masks_; }

  // Rank the agent at `pos` (reporting `digit`) gives to allocation `a`.
  int offer_rank(int pos, int digit, int a) const { return offer_rank_[pos][digit][a]; }

 private:
  const StrictDomain* dom_;
  StrictProfileSpace space_;
  AllocationUniverse universe_;
  std::vector<std::vector<std::vector<std::int8_t>>> offer_rank_;
  std::vector<std::uint64_t> masks_;
};

struct AxiomSet {
  bool local_unanimity = false;
  bool strategy_proofness = false;
  int gsp_max_coalition = 0;  // 0 = off, -1 = whole market, else cap
  bool consistency = false;   // linked (variable-population) searches only
};

// Filter every profile's candidates to allocations that honour the first-step
// trading cycles. When strategy-proofness constraints are active and the
// domain is top-one-rich, individually irrational candidates are also dropped
// (a derived filter: on such domains those axioms force individual
// rationality). Returns false iff some candidate set empties.
bool seed_local_unanimity(MechanismTable& table, const AxiomSet& axioms = {});

// Two-sided arc consistency over unilateral-deviation edges, iterated to a
// fixpoint: a candidate dies when deviating (or reporting truthfully) would
// be strictly better against every remaining candidate on the other side.
// `shuffle_seed` != 0 permutes the edge processing order (the fixpoint must
// not change; tests assert confluence). Returns false iff a set empties.
bool propagate_sp(MechanismTable& table, unsigned shuffle_seed = 0);

struct ProverOptions {
  std::uint64_t branch_limit = 1'000'000;  // search nodes before refusal
  std::uint64_t max_solutions = 1024;      // enumeration cutoff (complete=false beyond)
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t backtracks = 0;
  bool complete = false;  // true iff the whole tree was exhausted
};

struct SearchResult {
  bool refused = false;  // branch limit hit
  std::string note;
  // Each solution: chosen allocation index per profile, sorted lexicographically.
  std::vector<std::vector<std::uint32_t>> solutions;
  SearchStats stats;
};

// Complete backtracking with propagation after every decision; branches on
// the smallest undecided candidate set (ties by profile index). Solutions are
// re-verified with the axiom checkers before being returned; a failure there
// is a prover bug and throws. `consistency` is rejected here (linked only).
SearchResult search_all_mechanisms(const StrictDomain& d, const AxiomSet& axioms,
                                   const ProverOptions& opt = {}, const Caps& caps = {});

// Variable-population search: one table per submarket of the family's grand
// set, linked by the reduced-economy condition (removing a set of agents
// whose assignments equal their endowments as a set must not change anyone
// else's assignment). Markets follow all_submarkets order.
struct LinkedSearchResult {
  bool refused = false;
  std::string note;
  std::vector<Market> markets;
  std::vector<std::vector<std::vector<std::uint32_t>>> solutions;  // [solution][market][profile]
  SearchStats stats;
};
LinkedSearchResult search_linked_markets(const StrictDomainFamily& fam, const AxiomSet& axioms,
                                         const ProverOptions& opt = {}, const Caps& caps = {});

// True iff the fully decided table given by `choice` satisfies the axiom set
// (membership tests for known mechanisms; independent of the search).
bool table_satisfies(const StrictDomain& d, const std::vector<std::uint32_t>& choice,
                     const AxiomSet& axioms, const Caps& caps = {});
bool linked_tables_satisfy(const StrictDomainFamily& fam,
                           const std::vector<std::vector<std::uint32_t>>& choice,
                           const AxiomSet& axioms, const Caps& caps = {});

// The table TTC induces on the domain / family (also the diff baseline).
std::vector<std::uint32_t> ttc_choices(const StrictDomain& d, const Caps& caps = {});
std::vector<std::vector<std::uint32_t>> ttc_linked_choices(const StrictDomainFamily& fam,
                                                           const Caps& caps = {});

// Wrap a decided table as a mechanism (fixed population).
StrictMechanism table_mechanism(const StrictDomain& d, std::vector<std::uint32_t> choice,
                                std::string name);
// Wrap per-market decided tables as a variable-population mechanism.
StrictMechanism linked_table_mechanism(const StrictDomainFamily& fam,
                                       std::vector<std::vector<std::uint32_t>> choice,
                                       std::string name);

struct TableDiff {
  Market market = Market::grand(1);
  std::uint64_t profile_index = 0;
  std::string profile;     // economy text
  std::string solution;    // allocation text
  std::string baseline;    // TTC allocation text
};
std::vector<TableDiff> diff_vs_ttc(const StrictDomain& d, const std::vector<std::uint32_t>& choice,
                                   std::size_t limit = 16);
std::vector<TableDiff> diff_vs_ttc_linked(const StrictDomainFamily& fam,
                                          const std::vector<std::vector<std::uint32_t>>& choice,
                                          std::size_t limit = 16);

// Characterization instance behind the `prove` command: local unanimity plus
// consistency over a restriction-closed family must pin down exactly TTC.
struct ConsistencyCharacterization {
  LinkedSearchResult search;
  bool unique_ttc = false;  // exactly one solution and it diffs empty vs TTC
};
ConsistencyCharacterization verify_consistency_characterization(const StrictDomainFamily& fam,
                                                                const ProverOptions& opt = {},
                                                                const Caps& caps = {});

}  // namespace ttclab
