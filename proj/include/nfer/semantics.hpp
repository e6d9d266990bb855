#pragma once

#include "nfer/core.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace nfer {

struct Span {
    Timestamp start;
    Timestamp end;

    friend bool operator==(const Span&, const Span&) = default;
};

/// Clock predicate for inclusive rules. Returns the produced interval's
/// endpoints when the two intervals match.
std::optional<Span> match_inclusive(InclusiveOp op, const Interval& i1, const Interval& i2);
std::optional<Span> match_inclusive(InclusiveOp op, Span i1, Span i2);

/// Clock predicate for exclusive rules: true when i2 would suppress i1.
bool match_exclusive(ExclusiveOp op, const Interval& i1, const Interval& i2);
bool match_exclusive(ExclusiveOp op, Span i1, Span i2);

/// Intervals described by one rule over a pool (not unioned with the pool).
Pool apply_rule(const Rule& r, const Pool& p);

/// Left fold: each rule sees the pool extended by all previous rules.
Pool apply_spec_once(std::span<const Rule> rules, const Pool& p);

/// Rule-level dependency graph: an edge from rule u to rule v exists iff
/// some identifier on the lhs of u appears on the rhs of v.
class DependencyGraph {
public:
    explicit DependencyGraph(const Specification& spec);

    [[nodiscard]] std::size_t size() const noexcept { return successors_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& successors(std::size_t rule) const {
        return successors_[rule];
    }
    [[nodiscard]] bool has_edge(std::size_t from, std::size_t to) const;
    [[nodiscard]] bool has_self_loop(std::size_t rule) const { return has_edge(rule, rule); }

    /// Strongly connected components, each sorted by rule index, listed in a
    /// topological order of the condensation. Ties are broken by the smallest
    /// rule index so the order is deterministic and follows the source order
    /// wherever dependencies allow.
    [[nodiscard]] std::vector<std::vector<std::size_t>> components() const;

private:
    std::vector<std::vector<std::size_t>> successors_;
};

struct Component {
    std::vector<std::size_t> rules;  // ascending rule indices
    bool cyclic = false;             // size > 1 or a self-loop
};

struct ComponentPlan {
    std::vector<Component> components;  // topological order
};

/// Indices of exclusive rules that lie on a cycle of the dependency graph.
std::vector<std::size_t> exclusive_rules_in_cycles(const Specification& spec);

/// Throws ExclusiveInCycle if any exclusive rule sits in a cyclic component.
ComponentPlan build_plan(const Specification& spec);

/// Compiled evaluator for one specification; reusable across traces.
/// Cyclic components are iterated semi-naively: each pass a rule only
/// considers pairs that involve at least one interval it has not seen yet.
/// The resulting fixed point equals the naive fold-until-unchanged result.
class Evaluator {
public:
    explicit Evaluator(const Specification& spec);

    [[nodiscard]] Pool evaluate(const Pool& initial) const;
    [[nodiscard]] Pool evaluate(const Trace& trace) const;
    /// True iff some interval labelled `target` is in the result.
    [[nodiscard]] bool produces(const Trace& trace, const Identifier& target) const;

    [[nodiscard]] const ComponentPlan& plan() const noexcept { return plan_; }
    [[nodiscard]] const Specification& spec() const noexcept { return spec_; }

private:
    struct CompiledRule {
        int lhs;
        int rhs1;
        int rhs2;
        bool inclusive;
        InclusiveOp iop;
        ExclusiveOp xop;
    };
    class State;

    int intern(const Identifier& id);
    [[nodiscard]] int lookup(const Identifier& id) const;
    void run(State& state) const;

    Specification spec_;
    ComponentPlan plan_;
    std::vector<CompiledRule> rules_;
    std::vector<Identifier> names_;
    std::unordered_map<Identifier, int> index_;
};

/// Evaluate a specification on a pool (T semantics without the init step).
Pool evaluate_pool(const Specification& spec, const Pool& initial);
/// T semantics: init every event, then iterate components in plan order.
Pool evaluate_trace(const Specification& spec, const Trace& t);

}  // namespace nfer
