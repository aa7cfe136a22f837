#pragma once

// Explicit-state decision procedures for perpetual and terminating exploration
// under the adversarial scheduler, plus unsolvability certificates and
// universality audits.
//
// Coverage bookkeeping: the checkers explore pairs (system state, visited
// node set). Initially occupied nodes count as visited. For the perpetual
// checker the visited set resets to the currently occupied nodes immediately
// after reaching the full node set; a failure is a reachable quiescent state
// that leaves nodes unoccupied, or a fair lasso whose cycle never resets.
// For the terminating checker the visited set only grows; a failure is a
// reachable quiescent state with incomplete coverage, or any fair lasso.
//
// Fairness contract: a lasso cycle is unfair — and excluded as a
// counterexample — exactly when some robot is enabled or mid-cycle at every
// state of the cycle yet performs no action within it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringx/semantics.hpp"

namespace ringx {

struct StateLimitExceeded : std::runtime_error {
  explicit StateLimitExceeded(std::uint64_t frontier_)
      : std::runtime_error("state limit exceeded (frontier " +
                           std::to_string(frontier_) + ")"),
        frontier(frontier_) {}
  std::uint64_t frontier;
};

enum class Objective : std::uint8_t { Perpetual, Terminating };
Objective parse_objective(const std::string& name);
const char* objective_name(Objective o);

struct CheckOptions {
  std::uint64_t state_limit = 10'000'000;
  SymMode sym_mode = SymMode::Independent;
};

struct Verdict {
  enum class Outcome : std::uint8_t { Holds, Fails };
  enum class WitnessKind : std::uint8_t { None, Lasso, Terminal };

  Outcome outcome = Outcome::Holds;
  WitnessKind witness_kind = WitnessKind::None;
  Trace witness;             // stem then cycle for lassos; full path otherwise
  std::size_t cycle_begin = 0;  // state index where the lasso cycle starts
  std::vector<int> uncovered;   // terminal witnesses: nodes never covered
  std::uint64_t state_count = 0;
  std::uint64_t edge_count = 0;

  bool holds() const { return outcome == Outcome::Holds; }
};

Verdict check_perpetual_exploration(const SystemState& initial,
                                    const Algorithm& algorithm,
                                    const CheckOptions& options = {});
Verdict check_terminating_exploration(const SystemState& initial,
                                      const Algorithm& algorithm,
                                      const CheckOptions& options = {});

Verdict check_objective(const SystemState& initial, const Algorithm& algorithm,
                        Objective objective, const CheckOptions& options = {});

// Replays a Fails witness through apply_choice: every intermediate state must
// reproduce, and a lasso cycle must return to its entry state.
bool replay_witness(const Algorithm& algorithm, const Verdict& verdict,
                    SymMode sym_mode = SymMode::Independent);

// Liveness side of the terminating check recomputed by the coarser criterion:
// some reachable cycle contains a configuration-changing edge. Used as a
// cross-check oracle against the fair-lasso search.
bool has_changing_cycle(const SystemState& initial, const Algorithm& algorithm,
                        const CheckOptions& options = {});

// Direct fair-lasso hunt over the terminating-style reachable graph.
bool has_fair_cycle(const SystemState& initial, const Algorithm& algorithm,
                    const CheckOptions& options = {});

// --- certificates -----------------------------------------------------------------

struct TerritorySet {
  // (occupied node, adjacent partner node) pairs.
  std::vector<std::pair<int, int>> territories;
};

// Lemma-style confinement witness: every occupied node is monochromatic, no
// two occupied nodes are adjacent, and the chosen territories are pairwise at
// distance >= 2. Exhaustive over orientation assignments.
std::optional<TerritorySet> find_independent_territory_set(
    const Configuration& config);

struct Certificate {
  enum class Kind : std::uint8_t {
    Territory,        // confinement by an independent territory set
    PairSameColor,    // k=2, adjacent robots of equal color
    SameColorTower,   // >= 2 robots of one color on one node (k=3, k=4)
    DistanceClass,    // k=3, longest robot distance >= 4 or == 3
    TowerDistance2,   // k=3, a tower with the third robot at distance 2
    SymmetricXYX,     // k=3, consecutive X Y X colors
    SymmetricClass,   // k=4, contains a symmetric unsolvable pattern
  };
  Kind kind;
  std::string detail;
  std::optional<TerritorySet> territory;
  int longest_distance = 0;
};

const char* certificate_kind_name(Certificate::Kind k);

// First matching certificate in fixed priority order, with each entry's
// applicability (scheduler model, robot count, ring-size threshold) checked.
std::optional<Certificate> classify_configuration(const Configuration& config,
                                                  Model model,
                                                  Objective objective);

// --- enumeration and audits ----------------------------------------------------------

enum class PlacementFilter : std::uint8_t {
  All,           // every placement, towers allowed
  NoTowers,      // at most one robot per node
  AdjacentOnly,  // robots on consecutive distinct nodes
};

// All canonical classes of k colored robots on n nodes, deterministic order.
std::vector<Configuration> enumerate_initial_configurations(
    int n, int k, const Palette& palette,
    PlacementFilter filter = PlacementFilter::All);

struct AuditOptions {
  CheckOptions check;
  PlacementFilter filter = PlacementFilter::All;
  int threads = 1;
};

struct AuditEntry {
  enum class Status : std::uint8_t {
    AlgorithmSolves,
    CertifiedUnsolvable,
    Discrepancy,
    LimitExceeded,
  };
  Configuration config;
  Status status;
  std::optional<Certificate> certificate;
  std::optional<Verdict> verdict;
  std::uint64_t state_count = 0;
  double wall_ms = 0.0;
};

const char* audit_status_name(AuditEntry::Status s);

struct UniversalityReport {
  std::string algorithm_name;
  Model model;
  Objective objective;
  std::vector<AuditEntry> entries;

  int count(AuditEntry::Status s) const;
  bool zero_discrepancy() const {
    return count(AuditEntry::Status::Discrepancy) == 0;
  }
};

UniversalityReport universality_audit(const Algorithm& algorithm, Model model,
                                      Objective objective,
                                      const std::vector<int>& ring_sizes,
                                      int k, const AuditOptions& options = {});

// --- canonical reachable graph ---------------------------------------------------------

// Ring-canonical quotient of the reachable state space with choice-labeled
// edges; choices are rendered relative to each canonical representative.
struct ReachableGraph {
  std::vector<SystemState> states;
  std::vector<std::vector<std::pair<std::string, std::uint32_t>>> edges;
  std::uint64_t edge_count = 0;
};

ReachableGraph build_reachable_graph(const SystemState& initial,
                                     const Algorithm& algorithm,
                                     std::uint64_t bound,
                                     SymMode sym_mode = SymMode::Independent);

// Ring-canonical form of a full system state (reflection flips pending
// directions); exposed for equivalence tests.
SystemState canonical_state(const SystemState& state);

}  // namespace ringx
