#pragma once

// Decision procedures over data-free specifications.
//
// Satisfiability for inclusive-only specifications is decided by tracking,
// per identifier, whether it can be realized by an atomic interval, by an
// interval of positive duration, or both. Because every clock predicate only
// compares endpoints with <, = and min/max, any two realizable intervals can be
// shifted by strictly increasing timestamp maps into any relative placement
// consistent with their durations, and inclusive evaluation is monotone in the
// trace. A rule therefore fires iff some pair of duration classes of its
// operands admits a matching placement, and the produced duration class
// follows from that placement.
//
// The classic duration-set procedure (I+ / I_Sigma with the match+/add+
// tables) is also provided; inclusive_sat reports its sets alongside the
// verdict.

#include "nfer/core.hpp"
#include "nfer/semantics.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nfer {

/// True iff evaluating `spec` on `trace` yields an interval labelled `target`.
bool evaluate_problem(const Specification& spec, const Trace& trace, const Identifier& target);

/// Conjunction of disjunctions over identifiers; empty means no requirement.
struct CnfDurationRequirement {
    std::set<IdentifierSet> clauses;

    /// Every clause has a member in `positive`.
    [[nodiscard]] bool satisfied_by(const IdentifierSet& positive) const;

    friend bool operator==(const CnfDurationRequirement&, const CnfDurationRequirement&) = default;
};

/// Identifiers that must have positive duration for the rule to match.
CnfDurationRequirement match_plus(const Rule& r);
/// Identifiers that must have positive duration for the result to be positive.
CnfDurationRequirement add_plus(const Rule& r);

struct DurationStep {
    std::size_t rule;  // 0-based index into the specification
    IdentifierSet positive_capable;
    IdentifierSet producible;
};

struct DurationSets {
    IdentifierSet positive_capable;  // I+
    IdentifierSet producible;        // I_Sigma
    std::vector<DurationStep> steps;  // one entry per rule visit
    std::size_t extra_passes = 0;     // passes beyond |component| needed to stabilize
};

/// The I+ / I_Sigma duration-set procedure: components in topological order,
/// each visited |component| times (and further, only while the sets still
/// grow). Throws NotInclusive.
DurationSets duration_sensitive_sets(const Specification& spec, const IdentifierSet& inputs);

/// Least fixpoint of plain producibility, ignoring durations. Throws NotInclusive.
IdentifierSet producible_set(const Specification& spec, const IdentifierSet& inputs);

struct DurationCapability {
    bool zero = false;      // some trace yields an atomic interval
    bool positive = false;  // some trace yields an interval with end > start

    [[nodiscard]] bool any() const noexcept { return zero || positive; }
    friend bool operator==(const DurationCapability&, const DurationCapability&) = default;
};

/// Exact realizability per identifier for inclusive specifications.
/// Identifiers that can never be realized are absent. Throws NotInclusive.
std::map<Identifier, DurationCapability> realizable_durations(const Specification& spec,
                                                              const IdentifierSet& inputs);

struct SearchBounds {
    std::size_t max_events = 4;
    Timestamp max_ts = 5;
    std::size_t budget = 1'000'000;  // maximum number of candidate traces
};

/// Number of candidate traces bounded_sat_search would enumerate.
std::size_t candidate_count(std::size_t inputs, const SearchBounds& bounds);

/// Exhaustive search over traces with 1..max_events distinct events drawn
/// from inputs x [0, max_ts]. Candidates are enumerated shortest first, then
/// lexicographically by (timestamp, identifier); the first hit is returned.
/// Repeated identical events and reorderings among equal timestamps are
/// skipped because they cannot change the result. Throws BudgetExceeded,
/// ExclusiveInCycle.
std::optional<Trace> bounded_sat_search(const Specification& spec, const IdentifierSet& inputs,
                                        const Identifier& target, const SearchBounds& bounds);

enum class Verdict { Sat, Unsat };

std::string_view to_string(Verdict v);

struct SatVerdict {
    Verdict verdict = Verdict::Unsat;
    std::optional<Trace> witness;
    IdentifierSet producible;        // I_Sigma of the duration-set procedure
    IdentifierSet positive_capable;  // I+ of the duration-set procedure
    /// Verdict the duration-set procedure alone would give (target in I_Sigma).
    Verdict set_verdict = Verdict::Unsat;
    std::map<Identifier, DurationCapability> realizable;
    std::vector<DurationStep> steps;
};

struct SatOptions {
    /// Constructed witnesses larger than this are dropped in favour of the
    /// bounded-search fallback.
    std::size_t max_witness_events = 4096;
    SearchBounds fallback{};
};

/// Satisfiability for inclusive specifications. SAT verdicts carry a witness
/// that has been checked with evaluate_problem whenever one could be found
/// within SatOptions. Throws NotInclusive.
SatVerdict inclusive_sat(const Specification& spec, const IdentifierSet& inputs, const Identifier& target,
                         const SatOptions& options = {});

}  // namespace nfer
