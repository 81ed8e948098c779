#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bushy/bushy_core.hpp"
#include "bushy/growth_family.hpp"
#include "bushy/toy_computation.hpp"

namespace bushy {

struct DncBudgets {
  /// Loop iterations; 0 means 64 * depth + 256.
  Stage loop_budget = 0;
  /// Functional and phi runs at loop stage s get s * steps_per_stage steps.
  std::uint64_t steps_per_stage = 64;
  /// Bigness is searched this many levels above the stem.
  std::size_t search_depth = 1;
  std::size_t width_cap = 64;
};

enum class AttentionRule { kDelays, kThreshold };

struct BoundedRequirement {
  Functional gamma;
  std::int64_t d = 0;
  /// Least |sigma| at which the requirement may be attended (default i + 1).
  std::optional<std::size_t> first_attention;
};

struct BoundedConfig {
  FamilyOptions family;
  std::vector<BoundedRequirement> roster;
  std::size_t depth = 24;
  DncBudgets budgets;
  AttentionRule rule = AttentionRule::kDelays;
  /// If non-empty, replaces the random caps n_i.
  std::vector<Natural> cap_override;
};

struct UnboundedRequirement {
  Functional gamma;
  ToyProgram phi;
  std::int64_t d = 0;
  std::size_t first_attention = 0;
};

struct UnboundedConfig {
  unsigned m = 3;
  std::vector<UnboundedRequirement> roster;
  std::size_t depth = 12;
  DncBudgets budgets;
  /// Replaces n(i,1) for the listed i.
  std::map<std::size_t, Natural> n1_override;
  /// Replaces n(i,2,b) for the listed (i, b).
  std::map<std::pair<std::size_t, std::uint64_t>, Natural> n2_override;
};

/// Cantor pairing (x+y)(x+y+1)/2 + y.
Natural pair(const Natural& x, const Natural& y);
/// <i,a,b> = pair(pair(i, a), b).
Natural triple(std::uint64_t i, std::uint64_t a, std::uint64_t b);

enum class AssumptionKind {
  kSmall,         // S = {tau in T : |Gamma^tau| >= theta(k)} is g_k-small above sigma
  kPhiUndefined,  // phi(r + d) diverges
  kPhiSmall,      // S = {tau : |Gamma^tau| >= v} is 2^v G_list-small above sigma
};

struct Assumption {
  std::size_t id = 0;
  std::size_t req = 0;
  AssumptionKind kind = AssumptionKind::kSmall;
  OmegaString sigma;
  Stage made_at = 0;
  std::optional<Stage> refuted_at;
  /// kSmall: theta(|sigma|); kPhiSmall: v = phi(r + d).
  Natural threshold;
  /// Unbounded: the description bound r in force when the assumption was made.
  Natural r;
  /// kPhiSmall: the assumption list at creation, which fixes its function.
  std::vector<std::size_t> list;
};

struct Draw {
  std::size_t depth = 0;
  Natural bound;
  Natural value;
  /// Restricted draws: index of the chosen child, uniform below `bound`.
  std::optional<std::uint64_t> choice;
  /// Index into RunTrace::activations when the draw follows a witness tree.
  std::optional<std::size_t> activation;
  /// Unbounded free draws: the assumption list defining G.
  std::vector<std::size_t> list;
};

struct Activation {
  std::size_t req = 0;
  Stage stage = 0;
  OmegaString sigma;
  BitString rho;
  /// Expected |rho|: theta(|sigma|), or phi(r + d).
  Natural threshold;
  Natural r;
  WitnessTree tree;
  /// Unbounded: the list defining the bushiness G of the tree.
  std::vector<std::size_t> list;
};

struct TraceEvent {
  Stage stage = 0;
  /// Requirement attended; nullopt for free draws.
  std::optional<std::size_t> req;
  /// "a", "b.1", "b.2.i", "b.2.ii", "b.3.i", "b.3.ii", "wait" or "free".
  std::string step;
  /// "assumed", "drawn", "switched", "satisfied", "waiting".
  std::string outcome;
  std::optional<std::size_t> assumption;
  std::size_t depth = 0;
};

/// kWaitingPhi freezes only its own requirement; kWaiting blocks the loop.
enum class RequirementStatus {
  kUnattended,
  kAssuming,
  kWaitingPhi,
  kWaiting,
  kSatisfiedActively
};

struct RequirementState {
  Natural cap;                            // n_i, or n(i,1)
  std::map<std::uint64_t, Natural> caps2;  // n(i,2,b) drawn so far
  std::uint64_t wrong = 0;                // c_i
  std::uint64_t wrong_c1 = 0;             // c'_i
  RequirementStatus status = RequirementStatus::kUnattended;
  std::optional<std::size_t> standing;    // current assumption id
  std::optional<std::size_t> activation;
  /// Evaluated at the final stage: satisfied actively, or a standing
  /// assumption that still holds and whose set the path avoided.
  bool met = false;
};

struct RunTrace {
  std::string algorithm;  // "bounded" or "unbounded"
  unsigned m = 0;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  Stage loop_budget = 0;
  std::uint64_t steps_per_stage = 0;
  std::size_t search_depth = 0;
  std::size_t width_cap = 0;
  /// Bounded: theta(1..k_max+1) and boost of the family.
  std::vector<Natural> theta;
  std::vector<std::int64_t> boost;
  std::size_t k_max = 0;
  std::vector<std::string> gammas;
  std::vector<std::string> phis;
  std::vector<std::int64_t> ds;

  OmegaString prefix;
  std::vector<Draw> draws;
  std::vector<Assumption> assumptions;
  std::vector<Activation> activations;
  std::vector<TraceEvent> events;
  std::vector<RequirementState> requirements;
  bool stuck = false;
  std::optional<std::size_t> stuck_req;
  bool exhausted = false;
  Stage final_stage = 0;

  bool all_attended_met() const;
};

RunTrace run_bounded_dnc(const BoundedConfig& config, std::uint64_t seed);
RunTrace run_unbounded_dnc(const UnboundedConfig& config, std::uint64_t seed);

/// Searches bit strings rho of the given length, lexicographically, for one with
/// S_rho g-big above sigma; prefixes with S_rho small are pruned, since S_rho
/// shrinks as rho grows. Returns rho with its witness.
std::optional<std::pair<BitString, WitnessTree>> find_rho_star(
    const std::function<Membership(const BitString&)>& s_rho, const OmegaString& sigma,
    std::size_t length, const GrowthFn& g, Caps caps);

/// G_L(u) = 2^{u+m} (1 + sum of g_a(u) over kPhiSmall assumptions a in L),
/// with g_a = 2^{v_a} G_{list of a}.
GrowthFn unbounded_bound(const std::vector<Assumption>& assumptions,
                         const std::vector<std::size_t>& list, unsigned m);

/// The family a bounded trace was run with.
GrowthFamily trace_family(const RunTrace& trace);

struct RhoDiagnostic {
  std::size_t req = 0;
  BitString rho;
  std::uint64_t k_approx = 0;
  /// k_approx(rho) - |rho|.
  std::int64_t margin = 0;
  /// Bounded runs: requirement_threshold at |sigma|.
  std::optional<Natural> threshold;
};

struct TraceAudit {
  std::vector<std::string> violations;
  std::size_t draws_checked = 0;
  std::size_t witnesses_checked = 0;
  std::size_t refutations_checked = 0;
  std::size_t lists_checked = 0;
  std::optional<bool> dnc;
  std::vector<RhoDiagnostic> rhos;
  /// Walks that met the set of an assumption still holding at the final stage.
  std::size_t true_set_hits = 0;
  bool ok() const { return violations.empty(); }
};

/// Recomputes every bound, witness, refutation and list snapshot in the trace
/// from the recorded configuration, independently of the run. With a table,
/// also decides whether the final prefix is DNC; rho diagnostics use k_budget
/// steps of the prefix-free machine.
TraceAudit audit_trace(const RunTrace& trace, const DiagonalTable* table = nullptr,
                       std::uint64_t k_budget = 4096);

struct RunSummary {
  bool stuck = false;
  bool exhausted = false;
  bool all_met = false;
  bool dnc = false;
  std::size_t attended = 0;
  std::size_t met = 0;
  std::size_t active = 0;
  std::map<std::string, std::size_t> steps;
};

RunSummary summarize(const RunTrace& trace, const DiagonalTable& table);

std::string trace_to_json(const RunTrace& trace);
RunTrace trace_from_json(const std::string& text);
/// One JSON object per event.
std::string trace_events_jsonl(const RunTrace& trace);

const char* to_string(RequirementStatus status);
const char* to_string(AssumptionKind kind);

}  // namespace bushy
