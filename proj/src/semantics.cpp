#include "nfer/semantics.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace nfer {

std::optional<Span> match_inclusive(InclusiveOp op, Span a, Span b) {
    switch (op) {
        case InclusiveOp::Before:
            if (a.end < b.start) return Span{a.start, b.end};
            break;
        case InclusiveOp::Meet:
            if (a.end == b.start) return Span{a.start, b.end};
            break;
        case InclusiveOp::During:
            if (b.start <= a.start && a.end <= b.end) return Span{b.start, b.end};
            break;
        case InclusiveOp::Coincide:
            if (a.start == b.start && a.end == b.end) return a;
            break;
        case InclusiveOp::Start:
            if (a.start == b.start) return Span{a.start, std::max(a.end, b.end)};
            break;
        case InclusiveOp::Finish:
            if (a.end == b.end) return Span{std::min(a.start, b.start), a.end};
            break;
        case InclusiveOp::Overlap:
            if (a.start < b.end && b.start < a.end) {
                return Span{std::min(a.start, b.start), std::max(a.end, b.end)};
            }
            break;
        case InclusiveOp::Slice:
            if (a.start < b.end && b.start < a.end) {
                return Span{std::max(a.start, b.start), std::min(a.end, b.end)};
            }
            break;
    }
    return std::nullopt;
}

std::optional<Span> match_inclusive(InclusiveOp op, const Interval& i1, const Interval& i2) {
    return match_inclusive(op, Span{i1.start(), i1.end()}, Span{i2.start(), i2.end()});
}

bool match_exclusive(ExclusiveOp op, Span a, Span b) {
    switch (op) {
        case ExclusiveOp::After: return a.start > b.end;
        case ExclusiveOp::Follow: return a.start == b.end;
        case ExclusiveOp::Contain: return b.start >= a.start && b.end <= a.end;
    }
    return false;
}

bool match_exclusive(ExclusiveOp op, const Interval& i1, const Interval& i2) {
    return match_exclusive(op, Span{i1.start(), i1.end()}, Span{i2.start(), i2.end()});
}

Pool apply_rule(const Rule& r, const Pool& p) {
    Pool out;
    const auto left = p.with_id(r.rhs1);
    const auto right = p.with_id(r.rhs2);
    if (r.inclusive()) {
        for (const auto& i1 : left) {
            for (const auto& i2 : right) {
                if (auto s = match_inclusive(r.inclusive_op(), i1, i2)) {
                    out.insert(Interval(r.lhs, s->start, s->end));
                }
            }
        }
        return out;
    }
    for (const auto& i1 : left) {
        const bool suppressed = std::any_of(right.begin(), right.end(), [&](const Interval& i2) {
            return i2 != i1 && match_exclusive(r.exclusive_op(), i1, i2);
        });
        if (!suppressed) out.insert(Interval(r.lhs, i1.start(), i1.end()));
    }
    return out;
}

Pool apply_spec_once(std::span<const Rule> rules, const Pool& p) {
    Pool current = p;
    for (const auto& r : rules) current.merge(apply_rule(r, current));
    return current;
}

DependencyGraph::DependencyGraph(const Specification& spec) : successors_(spec.size()) {
    std::unordered_map<Identifier, std::vector<std::size_t>> consumers;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        consumers[spec[i].rhs1].push_back(i);
        if (spec[i].rhs2 != spec[i].rhs1) consumers[spec[i].rhs2].push_back(i);
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto it = consumers.find(spec[i].lhs);
        if (it != consumers.end()) successors_[i] = it->second;
    }
}

bool DependencyGraph::has_edge(std::size_t from, std::size_t to) const {
    const auto& s = successors_[from];
    return std::find(s.begin(), s.end(), to) != s.end();
}

std::vector<std::vector<std::size_t>> DependencyGraph::components() const {
    // Iterative Tarjan.
    const std::size_t n = size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp_of(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& succ = successors_[f.v];
            if (f.next < succ.size()) {
                const std::size_t w = succ[f.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::size_t v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp_of[w] = comps.size();
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }

    // Kahn's algorithm on the condensation, smallest leading rule index first.
    const std::size_t m = comps.size();
    std::vector<std::vector<std::size_t>> dag(m);
    std::vector<std::size_t> indegree(m, 0);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t w : successors_[v]) {
            if (comp_of[v] != comp_of[w]) {
                dag[comp_of[v]].push_back(comp_of[w]);
                ++indegree[comp_of[w]];
            }
        }
    }
    using Entry = std::pair<std::size_t, std::size_t>;  // (leading rule, component)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
    for (std::size_t c = 0; c < m; ++c) {
        if (indegree[c] == 0) ready.emplace(comps[c].front(), c);
    }
    std::vector<std::vector<std::size_t>> ordered;
    ordered.reserve(m);
    while (!ready.empty()) {
        const std::size_t c = ready.top().second;
        ready.pop();
        for (std::size_t d : dag[c]) {
            if (--indegree[d] == 0) ready.emplace(comps[d].front(), d);
        }
        ordered.push_back(std::move(comps[c]));
    }
    return ordered;
}

namespace {

std::vector<Component> cyclic_components(const Specification& spec) {
    DependencyGraph g(spec);
    std::vector<Component> out;
    for (auto& rules : g.components()) {
        Component c;
        c.cyclic = rules.size() > 1 || g.has_self_loop(rules.front());
        c.rules = std::move(rules);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

std::vector<std::size_t> exclusive_rules_in_cycles(const Specification& spec) {
    std::vector<std::size_t> out;
    for (const auto& c : cyclic_components(spec)) {
        if (!c.cyclic) continue;
        for (std::size_t r : c.rules) {
            if (!spec[r].inclusive()) out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

ComponentPlan build_plan(const Specification& spec) {
    ComponentPlan plan{cyclic_components(spec)};
    for (const auto& c : plan.components) {
        if (!c.cyclic) continue;
        for (std::size_t r : c.rules) {
            if (!spec[r].inclusive()) {
                throw Error(ErrorKind::ExclusiveInCycle,
                            "exclusive rule in cycle: rule " + std::to_string(r + 1) + " '" +
                                to_string(spec[r]) + "'");
            }
        }
    }
    return plan;
}

namespace {

struct SpanHash {
    std::size_t operator()(const Span& s) const noexcept {
        return std::hash<Timestamp>{}(s.start * 0x9E3779B97F4A7C15ULL ^ s.end);
    }
};

}  // namespace

class Evaluator::State {
public:
    explicit State(std::size_t identifiers) : lists(identifiers), seen(identifiers) {}

    bool add(int id, Span s) {
        if (!seen[id].insert(s).second) return false;
        lists[id].push_back(s);
        return true;
    }

    std::vector<std::vector<Span>> lists;
    std::vector<std::unordered_set<Span, SpanHash>> seen;
    std::vector<Interval> passthrough;
};

Evaluator::Evaluator(const Specification& spec) : spec_(spec), plan_(build_plan(spec)) {
    for (const auto& r : spec_) {
        CompiledRule c{intern(r.lhs), intern(r.rhs1), intern(r.rhs2), r.inclusive(),
                       InclusiveOp::Before, ExclusiveOp::After};
        if (r.inclusive()) {
            c.iop = r.inclusive_op();
        } else {
            c.xop = r.exclusive_op();
        }
        rules_.push_back(c);
    }
}

int Evaluator::intern(const Identifier& id) {
    auto [it, fresh] = index_.try_emplace(id, static_cast<int>(names_.size()));
    if (fresh) names_.push_back(id);
    return it->second;
}

int Evaluator::lookup(const Identifier& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void Evaluator::run(State& st) const {
    struct Progress {
        std::size_t seen1 = 0;
        std::size_t seen2 = 0;
    };
    std::vector<Progress> progress(rules_.size());

    auto apply_inclusive = [&](std::size_t ri) {
        const CompiledRule& r = rules_[ri];
        Progress& pr = progress[ri];
        const std::size_t n1 = st.lists[r.rhs1].size();
        const std::size_t n2 = st.lists[r.rhs2].size();
        bool changed = false;
        for (std::size_t i = 0; i < n1; ++i) {
            const Span a = st.lists[r.rhs1][i];
            for (std::size_t j = (i < pr.seen1 ? pr.seen2 : 0); j < n2; ++j) {
                const Span b = st.lists[r.rhs2][j];
                if (auto s = match_inclusive(r.iop, a, b)) changed |= st.add(r.lhs, *s);
            }
        }
        pr.seen1 = n1;
        pr.seen2 = n2;
        return changed;
    };

    auto apply_exclusive = [&](std::size_t ri) {
        const CompiledRule& r = rules_[ri];
        // Not on a cycle, so lhs differs from both rhs identifiers.
        const auto& left = st.lists[r.rhs1];
        const auto& right = st.lists[r.rhs2];
        std::vector<Span> produced;
        for (const Span a : left) {
            const bool suppressed = std::any_of(right.begin(), right.end(), [&](const Span b) {
                return !(r.rhs1 == r.rhs2 && a == b) && match_exclusive(r.xop, a, b);
            });
            if (!suppressed) produced.push_back(a);
        }
        bool changed = false;
        for (const Span s : produced) changed |= st.add(r.lhs, s);
        return changed;
    };

    for (const auto& comp : plan_.components) {
        if (!comp.cyclic) {
            const std::size_t ri = comp.rules.front();
            rules_[ri].inclusive ? apply_inclusive(ri) : apply_exclusive(ri);
            continue;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t ri : comp.rules) changed |= apply_inclusive(ri);
        }
    }
}

Pool Evaluator::evaluate(const Pool& initial) const {
    State st(names_.size());
    for (const auto& i : initial) {
        const int id = lookup(i.id());
        if (id < 0) {
            st.passthrough.push_back(i);
        } else {
            st.add(id, Span{i.start(), i.end()});
        }
    }
    run(st);
    Pool out(st.passthrough.begin(), st.passthrough.end());
    for (std::size_t id = 0; id < st.lists.size(); ++id) {
        for (const Span s : st.lists[id]) out.insert(Interval(names_[id], s.start, s.end));
    }
    return out;
}

Pool Evaluator::evaluate(const Trace& trace) const { return evaluate(Pool::from_trace(trace)); }

bool Evaluator::produces(const Trace& trace, const Identifier& target) const {
    const int tid = lookup(target);
    State st(names_.size());
    for (const auto& e : trace) {
        if (e.id == target) return true;
        const int id = lookup(e.id);
        if (id >= 0) st.add(id, Span{e.ts, e.ts});
    }
    if (tid < 0) return false;
    run(st);
    return !st.lists[tid].empty();
}

Pool evaluate_pool(const Specification& spec, const Pool& initial) {
    return Evaluator(spec).evaluate(initial);
}

Pool evaluate_trace(const Specification& spec, const Trace& t) {
    return Evaluator(spec).evaluate(t);
}

}  // namespace nfer
