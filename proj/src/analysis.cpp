#include "nfer/analysis.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <memory>
#include <tuple>

namespace nfer {

bool evaluate_problem(const Specification& spec, const Trace& trace, const Identifier& target) {
    return Evaluator(spec).produces(trace, target);
}

bool CnfDurationRequirement::satisfied_by(const IdentifierSet& positive) const {
    return std::all_of(clauses.begin(), clauses.end(), [&](const IdentifierSet& clause) {
        return std::any_of(clause.begin(), clause.end(),
                           [&](const Identifier& id) { return positive.contains(id); });
    });
}

namespace {

CnfDurationRequirement one_of_both(const Rule& r) { return {{IdentifierSet{r.rhs1, r.rhs2}}}; }

void require_inclusive(const Specification& spec) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (!spec[i].inclusive()) {
            throw Error(ErrorKind::NotInclusive,
                        "specification is not inclusive: rule " + std::to_string(i + 1) + " '" +
                            to_string(spec[i]) + "'");
        }
    }
}

}  // namespace

CnfDurationRequirement match_plus(const Rule& r) {
    switch (r.inclusive_op()) {
        case InclusiveOp::Overlap:
        case InclusiveOp::Slice: return one_of_both(r);
        default: return {};
    }
}

CnfDurationRequirement add_plus(const Rule& r) {
    switch (r.inclusive_op()) {
        case InclusiveOp::Before: return {};
        case InclusiveOp::During: return {{IdentifierSet{r.rhs2}}};
        case InclusiveOp::Coincide: return {{IdentifierSet{r.rhs1}, IdentifierSet{r.rhs2}}};
        default: return one_of_both(r);
    }
}

DurationSets duration_sensitive_sets(const Specification& spec, const IdentifierSet& inputs) {
    require_inclusive(spec);
    const ComponentPlan plan = build_plan(spec);

    DurationSets out;
    out.producible = inputs;

    auto visit = [&](std::size_t index) {
        const Rule& r = spec[index];
        bool changed = false;
        if (out.producible.contains(r.rhs1) && out.producible.contains(r.rhs2)) {
            if (match_plus(r).satisfied_by(out.positive_capable)) {
                changed |= out.producible.insert(r.lhs).second;
            }
            if (add_plus(r).satisfied_by(out.positive_capable)) {
                changed |= out.positive_capable.insert(r.lhs).second;
            }
        }
        out.steps.push_back({index, out.positive_capable, out.producible});
        return changed;
    };

    for (const Component& c : plan.components) {
        if (!c.cyclic) {
            visit(c.rules.front());
            continue;
        }
        bool changed = false;
        for (std::size_t pass = 0; pass < c.rules.size(); ++pass) {
            changed = false;
            for (std::size_t i : c.rules) changed |= visit(i);
        }
        while (changed) {
            ++out.extra_passes;
            changed = false;
            for (std::size_t i : c.rules) changed |= visit(i);
        }
    }
    return out;
}

IdentifierSet producible_set(const Specification& spec, const IdentifierSet& inputs) {
    require_inclusive(spec);
    IdentifierSet out = inputs;
    for (bool changed = true; changed;) {
        changed = false;
        for (const Rule& r : spec) {
            if (out.contains(r.rhs1) && out.contains(r.rhs2)) changed |= out.insert(r.lhs).second;
        }
    }
    return out;
}

namespace {

// Duration class of an interval: 0 atomic, 1 positive.
constexpr int kZero = 0;
constexpr int kPositive = 1;

struct Placement {
    bool possible = false;
    Timestamp s1 = 0, e1 = 0, s2 = 0, e2 = 0;
};

// table[op][c1][c2][result class]: one endpoint placement over coordinates
// 0..3 realizing that combination, if any. Four coordinates cover every
// order type of four endpoints.
using ClassTable = std::array<std::array<std::array<std::array<Placement, 2>, 2>, 2>, 8>;

const ClassTable& class_table() {
    static const ClassTable table = [] {
        ClassTable t{};
        for (InclusiveOp op : kInclusiveOps) {
            auto& row = t[static_cast<std::size_t>(op)];
            for (Timestamp s1 = 0; s1 <= 3; ++s1)
                for (Timestamp e1 = s1; e1 <= 3; ++e1)
                    for (Timestamp s2 = 0; s2 <= 3; ++s2)
                        for (Timestamp e2 = s2; e2 <= 3; ++e2) {
                            auto m = match_inclusive(op, Span{s1, e1}, Span{s2, e2});
                            if (!m) continue;
                            auto& cell = row[e1 > s1][e2 > s2][m->end > m->start];
                            if (!cell.possible) cell = {true, s1, e1, s2, e2};
                        }
        }
        return t;
    }();
    return table;
}

struct Justification {
    std::optional<std::size_t> rule;  // nullopt: the identifier is an input
    int c1 = kZero;
    int c2 = kZero;
    Placement placement;
};

using JustificationMap = std::map<Identifier, std::array<std::optional<Justification>, 2>>;

JustificationMap class_fixpoint(const Specification& spec, const IdentifierSet& inputs) {
    require_inclusive(spec);
    const ClassTable& table = class_table();
    JustificationMap just;
    for (const Identifier& id : inputs) just[id][kZero] = Justification{};

    auto has = [&](const Identifier& id, int c) {
        auto it = just.find(id);
        return it != just.end() && it->second[c].has_value();
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const Rule& r = spec[i];
            const auto& row = table[static_cast<std::size_t>(r.inclusive_op())];
            for (int c1 : {kZero, kPositive}) {
                if (!has(r.rhs1, c1)) continue;
                for (int c2 : {kZero, kPositive}) {
                    if (!has(r.rhs2, c2)) continue;
                    for (int res : {kZero, kPositive}) {
                        const Placement& p = row[c1][c2][res];
                        if (!p.possible || has(r.lhs, res)) continue;
                        just[r.lhs][res] = Justification{i, c1, c2, p};
                        changed = true;
                    }
                }
            }
        }
    }
    return just;
}

// A trace in rank coordinates whose evaluation contains (id, start, end).
struct Fragment {
    std::vector<Event> events;
    Timestamp start = 0;
    Timestamp end = 0;
};

using FragmentPtr = std::shared_ptr<const Fragment>;

class WitnessBuilder {
public:
    WitnessBuilder(const Specification& spec, const JustificationMap& just, std::size_t cap)
        : spec_(spec), just_(just), cap_(cap) {}

    FragmentPtr realize(const Identifier& id, int cls) {
        const auto key = std::make_pair(id, cls);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const Justification& j = *just_.at(id)[cls];
        FragmentPtr out;
        if (!j.rule) {
            out = std::make_shared<Fragment>(Fragment{{Event{id, 0}}, 0, 0});
        } else {
            const Rule& r = spec_[*j.rule];
            FragmentPtr a = realize(r.rhs1, j.c1);
            FragmentPtr b = a ? realize(r.rhs2, j.c2) : nullptr;
            if (a && b) out = combine(*a, *b, r.inclusive_op(), j.placement);
        }
        memo_.emplace(key, out);
        return out;
    }

private:
    // Sort key for a timestamp of one operand fragment, relative to its anchor
    // interval [s, e] placed at coordinates [cs, ce].
    using Key = std::tuple<Timestamp, int, Timestamp>;

    static Key key_of(Timestamp t, Timestamp s, Timestamp e, Timestamp cs, Timestamp ce) {
        if (t < s) return {cs, -1, t};
        if (t == s) return {cs, 0, 0};
        if (t < e) return {cs, 1, t};
        if (t == e) return {ce, 0, 0};
        return {ce, 1, t};
    }

    FragmentPtr combine(const Fragment& a, const Fragment& b, InclusiveOp op, const Placement& p) const {
        std::vector<std::pair<Key, const Identifier*>> keyed;
        keyed.reserve(a.events.size() + b.events.size());
        for (const Event& ev : a.events) keyed.emplace_back(key_of(ev.ts, a.start, a.end, p.s1, p.e1), &ev.id);
        for (const Event& ev : b.events) keyed.emplace_back(key_of(ev.ts, b.start, b.end, p.s2, p.e2), &ev.id);

        std::vector<Key> keys;
        keys.reserve(keyed.size() + 4);
        for (const auto& [k, _] : keyed) keys.push_back(k);
        for (Timestamp c : {p.s1, p.e1, p.s2, p.e2}) keys.emplace_back(c, 0, 0);
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        auto rank = [&](const Key& k) {
            return static_cast<Timestamp>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
        };

        auto out = std::make_shared<Fragment>();
        out->events.reserve(keyed.size());
        for (const auto& [k, id] : keyed) out->events.push_back(Event{*id, rank(k)});
        std::sort(out->events.begin(), out->events.end(), [](const Event& x, const Event& y) {
            return std::tie(x.ts, x.id) < std::tie(y.ts, y.id);
        });
        out->events.erase(std::unique(out->events.begin(), out->events.end()), out->events.end());
        if (out->events.size() > cap_) return nullptr;

        const auto span = *match_inclusive(op, Span{p.s1, p.e1}, Span{p.s2, p.e2});
        out->start = rank(Key{span.start, 0, 0});
        out->end = rank(Key{span.end, 0, 0});
        return out;
    }

    const Specification& spec_;
    const JustificationMap& just_;
    std::size_t cap_;
    std::map<std::pair<Identifier, int>, FragmentPtr> memo_;
};

}  // namespace

std::map<Identifier, DurationCapability> realizable_durations(const Specification& spec,
                                                              const IdentifierSet& inputs) {
    std::map<Identifier, DurationCapability> out;
    for (const auto& [id, cls] : class_fixpoint(spec, inputs)) {
        out[id] = DurationCapability{cls[kZero].has_value(), cls[kPositive].has_value()};
    }
    return out;
}

std::size_t candidate_count(std::size_t inputs, const SearchBounds& bounds) {
    constexpr auto kMax = std::numeric_limits<std::size_t>::max();
    if (inputs == 0 || bounds.max_events == 0) return 0;
    if (bounds.max_ts >= kMax / inputs) return kMax;
    const std::size_t cells = inputs * static_cast<std::size_t>(bounds.max_ts + 1);
    std::size_t total = 0;
    std::size_t binom = 1;
    for (std::size_t n = 1; n <= bounds.max_events && n <= cells; ++n) {
        // C(cells, n) from C(cells, n - 1); saturate when the product overflows.
        const std::size_t factor = cells - n + 1;
        if (binom > kMax / factor) return kMax;
        binom = binom * factor / n;
        if (total > kMax - binom) return kMax;
        total += binom;
    }
    return total;
}

std::optional<Trace> bounded_sat_search(const Specification& spec, const IdentifierSet& inputs,
                                        const Identifier& target, const SearchBounds& bounds) {
    const Evaluator evaluator(spec);
    if (inputs.contains(target)) return Trace({Event{target, 0}});

    const std::size_t count = candidate_count(inputs.size(), bounds);
    if (count > bounds.budget) {
        throw Error(ErrorKind::BudgetExceeded, "bounded search needs " + std::to_string(count) +
                                                   " candidates, budget is " + std::to_string(bounds.budget));
    }
    if (count == 0) return std::nullopt;

    const std::vector<Identifier> ids(inputs.begin(), inputs.end());
    const std::size_t cells = ids.size() * static_cast<std::size_t>(bounds.max_ts + 1);
    auto event_of = [&](std::size_t cell) { return Event{ids[cell % ids.size()], cell / ids.size()}; };

    std::vector<std::size_t> pick;
    std::vector<Event> events;
    for (std::size_t n = 1; n <= bounds.max_events && n <= cells; ++n) {
        pick.resize(n);
        for (std::size_t i = 0; i < n; ++i) pick[i] = i;
        while (true) {
            events.clear();
            for (std::size_t c : pick) events.push_back(event_of(c));
            Trace candidate(events);
            if (evaluator.produces(candidate, target)) return candidate;

            // Next combination in lexicographic order.
            std::size_t i = n;
            while (i > 0 && pick[i - 1] == cells - n + (i - 1)) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Verdict v) { return v == Verdict::Sat ? "SAT" : "UNSAT"; }

SatVerdict inclusive_sat(const Specification& spec, const IdentifierSet& inputs, const Identifier& target,
                         const SatOptions& options) {
    SatVerdict out;
    DurationSets sets = duration_sensitive_sets(spec, inputs);
    out.producible = std::move(sets.producible);
    out.positive_capable = std::move(sets.positive_capable);
    out.steps = std::move(sets.steps);
    out.set_verdict = out.producible.contains(target) ? Verdict::Sat : Verdict::Unsat;

    const JustificationMap just = class_fixpoint(spec, inputs);
    for (const auto& [id, cls] : just) {
        out.realizable[id] = DurationCapability{cls[kZero].has_value(), cls[kPositive].has_value()};
    }
    auto it = just.find(target);
    if (it == just.end()) return out;
    out.verdict = Verdict::Sat;

    const Evaluator evaluator(spec);
    WitnessBuilder builder(spec, just, options.max_witness_events);
    FragmentPtr best;
    for (int cls : {kZero, kPositive}) {
        if (!it->second[cls]) continue;
        FragmentPtr f = builder.realize(target, cls);
        if (f && (!best || f->events.size() < best->events.size())) best = f;
    }
    if (best) {
        Trace candidate(best->events);
        if (evaluator.produces(candidate, target)) {
            out.witness = std::move(candidate);
            return out;
        }
    }
    try {
        out.witness = bounded_sat_search(spec, inputs, target, options.fallback);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetExceeded) throw;
    }
    return out;
}

}  // namespace nfer
