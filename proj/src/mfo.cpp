#include "nfer/mfo.hpp"

#include "nfer/semantics.hpp"

#include <algorithm>

namespace nfer {

using K = Formula::Kind;

Formula Formula::truth(bool value) { return Formula{value ? K::True : K::False, {}, {}, {}}; }
Formula Formula::pred(std::string name, std::string var) {
    return Formula{K::Pred, std::move(name), {std::move(var)}, {}};
}
Formula Formula::eq(std::string a, std::string b) { return Formula{K::Eq, {}, {std::move(a), std::move(b)}, {}}; }
Formula Formula::le(std::string a, std::string b) { return Formula{K::Le, {}, {std::move(a), std::move(b)}, {}}; }
Formula Formula::lt(std::string a, std::string b) { return Formula{K::Lt, {}, {std::move(a), std::move(b)}, {}}; }
Formula Formula::negate(Formula f) { return Formula{K::Not, {}, {}, {std::move(f)}}; }
Formula Formula::conj(std::vector<Formula> fs) { return Formula{K::And, {}, {}, std::move(fs)}; }
Formula Formula::disj(std::vector<Formula> fs) { return Formula{K::Or, {}, {}, std::move(fs)}; }
Formula Formula::implies(Formula a, Formula b) { return Formula{K::Implies, {}, {}, {std::move(a), std::move(b)}}; }
Formula Formula::exists(std::vector<std::string> vars, Formula body) {
    return Formula{K::Exists, {}, std::move(vars), {std::move(body)}};
}
Formula Formula::forall(std::vector<std::string> vars, Formula body) {
    return Formula{K::Forall, {}, std::move(vars), {std::move(body)}};
}
Formula Formula::call(const Identifier& id, std::string from, std::string to) {
    return Formula{K::Call, id.str(), {std::move(from), std::move(to)}, {}};
}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

void render_into(const Formula& f, std::string& out) {
    auto nary = [&](std::string_view sep) {
        out += '(';
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            if (i) out += sep;
            render_into(f.args[i], out);
        }
        out += ')';
    };
    switch (f.kind) {
        case K::True: out += "TRUE"; break;
        case K::False: out += "FALSE"; break;
        case K::Pred: out += f.name + "(" + f.vars[0] + ")"; break;
        case K::Eq: out += f.vars[0] + " = " + f.vars[1]; break;
        case K::Le: out += f.vars[0] + " <= " + f.vars[1]; break;
        case K::Lt: out += f.vars[0] + " < " + f.vars[1]; break;
        case K::Not: {
            const K inner = f.args[0].kind;
            const bool wrap = inner == K::Eq || inner == K::Le || inner == K::Lt;
            out += wrap ? "~(" : "~";
            render_into(f.args[0], out);
            if (wrap) out += ')';
            break;
        }
        case K::And: nary(" & "); break;
        case K::Or: nary(" | "); break;
        case K::Implies: nary(" -> "); break;
        case K::Exists:
        case K::Forall:
            out += f.kind == K::Exists ? "(EXISTS " : "(FORALL ";
            out += join(f.vars, ", ");
            out += ". ";
            render_into(f.args[0], out);
            out += ')';
            break;
        case K::Call: out += "phi_" + f.name + "(" + f.vars[0] + ", " + f.vars[1] + ")"; break;
    }
}

Formula psi_inclusive(const Rule& r) {
    using F = Formula;
    const Identifier& a = r.rhs1;
    const Identifier& b = r.rhs2;
    switch (r.inclusive_op()) {
        case InclusiveOp::Before:
            // u0: start of the second operand, u1: end of the first.
            return F::exists({"u0", "u1"},
                             F::conj({F::conj({F::le("t0", "u1"), F::lt("u1", "u0"), F::le("u0", "t1")}),
                                      F::call(a, "t0", "u1"), F::call(b, "u0", "t1")}));
        case InclusiveOp::Meet:
            return F::exists({"u0"}, F::conj({F::conj({F::le("t0", "u0"), F::le("u0", "t1")}),
                                              F::call(a, "t0", "u0"), F::call(b, "u0", "t1")}));
        case InclusiveOp::During:
            return F::exists({"u0", "u1"},
                             F::conj({F::conj({F::le("t0", "u0"), F::le("u0", "u1"), F::le("u1", "t1")}),
                                      F::call(a, "u0", "u1"), F::call(b, "t0", "t1")}));
        case InclusiveOp::Coincide: return F::conj({F::call(a, "t0", "t1"), F::call(b, "t0", "t1")});
        case InclusiveOp::Start:
            return F::exists(
                {"u0", "u1"},
                F::conj({F::disj({F::conj({F::eq("u0", "t1"), F::le("u1", "t1")}),
                                  F::conj({F::eq("u1", "t1"), F::le("u0", "t1")})}),
                         F::le("t0", "u0"), F::le("t0", "u1"), F::call(a, "t0", "u0"), F::call(b, "t0", "u1")}));
        case InclusiveOp::Finish:
            return F::exists(
                {"u0", "u1"},
                F::conj({F::disj({F::conj({F::eq("u0", "t0"), F::le("t0", "u1")}),
                                  F::conj({F::eq("u1", "t0"), F::le("t0", "u0")})}),
                         F::le("u0", "t1"), F::le("u1", "t1"), F::call(a, "u0", "t1"), F::call(b, "u1", "t1")}));
        case InclusiveOp::Overlap:
        case InclusiveOp::Slice: {
            // First operand [u0, u1], second [u2, u3].
            const bool hull = r.inclusive_op() == InclusiveOp::Overlap;
            F starts = hull ? F::disj({F::conj({F::eq("u0", "t0"), F::le("u0", "u2")}),
                                       F::conj({F::eq("u2", "t0"), F::le("u2", "u0")})})
                            : F::disj({F::conj({F::eq("u0", "t0"), F::le("u2", "u0")}),
                                       F::conj({F::eq("u2", "t0"), F::le("u0", "u2")})});
            F ends = hull ? F::disj({F::conj({F::eq("u1", "t1"), F::le("u3", "u1")}),
                                     F::conj({F::eq("u3", "t1"), F::le("u1", "u3")})})
                          : F::disj({F::conj({F::eq("u1", "t1"), F::le("u1", "u3")}),
                                     F::conj({F::eq("u3", "t1"), F::le("u3", "u1")})});
            return F::exists({"u0", "u1", "u2", "u3"},
                             F::conj({F::conj({F::le("u0", "u1"), F::le("u2", "u3"), F::lt("u0", "u3"),
                                               F::lt("u2", "u1")}),
                                      std::move(starts), std::move(ends), F::call(a, "u0", "u1"),
                                      F::call(b, "u2", "u3")}));
        }
    }
    return F::truth(false);
}

Formula psi_exclusive(const Rule& r) {
    using F = Formula;
    std::vector<F> guard{F::le("u0", "u1")};
    switch (r.exclusive_op()) {
        case ExclusiveOp::After: guard.push_back(F::lt("u1", "t0")); break;
        case ExclusiveOp::Follow: guard.push_back(F::eq("u1", "t0")); break;
        case ExclusiveOp::Contain:
            guard.push_back(F::le("t0", "u0"));
            guard.push_back(F::le("u1", "t1"));
            break;
    }
    // An interval never suppresses itself.
    if (r.rhs1 == r.rhs2 && r.exclusive_op() != ExclusiveOp::After) {
        guard.push_back(F::negate(F::conj({F::eq("u0", "t0"), F::eq("u1", "t1")})));
    }
    return F::conj({F::call(r.rhs1, "t0", "t1"),
                    F::forall({"u0", "u1"}, F::implies(F::conj(std::move(guard)),
                                                       F::negate(F::call(r.rhs2, "u0", "u1"))))});
}

class Inliner {
public:
    explicit Inliner(const MfoSystem& system) : system_(system) {}

    Formula expand(const Formula& f, const std::map<std::string, std::string>& names) {
        auto name = [&](const std::string& v) {
            auto it = names.find(v);
            return it == names.end() ? v : it->second;
        };
        switch (f.kind) {
            case K::True:
            case K::False: return f;
            case K::Pred:
            case K::Eq:
            case K::Le:
            case K::Lt: {
                Formula out = f;
                for (auto& v : out.vars) v = name(v);
                return out;
            }
            case K::Exists:
            case K::Forall: {
                auto inner = names;
                std::vector<std::string> fresh;
                for (const auto& v : f.vars) {
                    fresh.push_back("t" + std::to_string(next_++));
                    inner[v] = fresh.back();
                }
                Formula out{f.kind, {}, std::move(fresh), {}};
                out.args.push_back(expand(f.args[0], inner));
                return out;
            }
            case K::Call: {
                auto it = system_.definitions.find(Identifier(f.name));
                if (it == system_.definitions.end()) return Formula::truth(false);
                return expand(it->second, {{"t0", name(f.vars[0])}, {"t1", name(f.vars[1])}});
            }
            default: {
                Formula out{f.kind, {}, {}, {}};
                for (const auto& a : f.args) out.args.push_back(expand(a, names));
                return out;
            }
        }
    }

private:
    const MfoSystem& system_;
    std::size_t next_ = 2;
};

}  // namespace

std::string render(const Formula& f) {
    std::string out;
    render_into(f, out);
    return out;
}

MfoSystem build_mfo(const Specification& spec, const std::optional<IdentifierSet>& events) {
    const DependencyGraph graph(spec);
    for (const auto& comp : graph.components()) {
        if (comp.size() > 1 || graph.has_self_loop(comp.front())) {
            throw Error(ErrorKind::NotCycleFree, "specification is not cycle-free: rule " +
                                                     std::to_string(comp.front() + 1) + " '" +
                                                     to_string(spec[comp.front()]) + "' is on a cycle");
        }
    }

    MfoSystem out;
    if (events) {
        out.events = *events;
    } else {
        const IdentifierSet produced = spec.produced_identifiers();
        for (const Identifier& id : spec.identifiers()) {
            if (!produced.contains(id)) out.events.insert(id);
        }
    }

    IdentifierSet all = spec.identifiers();
    all.insert(out.events.begin(), out.events.end());
    for (const Identifier& id : all) {
        std::vector<Formula> disjuncts;
        if (out.events.contains(id)) {
            disjuncts.push_back(Formula::conj({Formula::eq("t0", "t1"), Formula::pred(id.str(), "t0")}));
        }
        for (const Rule& r : spec) {
            if (r.lhs == id) disjuncts.push_back(r.inclusive() ? psi_inclusive(r) : psi_exclusive(r));
        }
        if (disjuncts.empty()) {
            out.definitions.emplace(id, Formula::truth(false));
        } else if (disjuncts.size() == 1) {
            out.definitions.emplace(id, std::move(disjuncts.front()));
        } else {
            out.definitions.emplace(id, Formula::disj(std::move(disjuncts)));
        }
    }
    return out;
}

Formula inline_formula(const MfoSystem& system, const Identifier& target) {
    Inliner inliner(system);
    return inliner.expand(Formula::call(target, "t0", "t1"), {});
}

std::string mfo_emit(const Specification& spec, const Identifier& target, const std::optional<IdentifierSet>& events) {
    if (events) return render(inline_formula(build_mfo(spec, events), target));
    // A target that no rule produces is an event of its own.
    IdentifierSet defaults;
    const IdentifierSet produced = spec.produced_identifiers();
    for (const Identifier& id : spec.identifiers()) {
        if (!produced.contains(id)) defaults.insert(id);
    }
    if (!produced.contains(target)) defaults.insert(target);
    return render(inline_formula(build_mfo(spec, defaults), target));
}

LetterWord letter_word(const Trace& trace) {
    constexpr Timestamp kMaxLength = Timestamp{1} << 20;
    if (trace.empty()) return {};
    const Timestamp last = trace.events().back().ts;
    if (last >= kMaxLength) {
        throw Error(ErrorKind::Overflow, "timestamp " + std::to_string(last) + " too large for a letter word");
    }
    LetterWord word(static_cast<std::size_t>(last) + 1);
    for (const Event& e : trace) word[e.ts].insert(e.id);
    return word;
}

MfoEvaluator::MfoEvaluator(const MfoSystem& system, LetterWord word) : system_(system), word_(std::move(word)) {}

bool MfoEvaluator::holds(const Identifier& id, std::size_t t0, std::size_t t1) {
    if (t0 >= word_.size() || t1 >= word_.size()) return false;
    const auto key = std::make_tuple(id, t0, t1);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool result = false;
    if (auto def = system_.definitions.find(id); def != system_.definitions.end()) {
        std::map<std::string, std::size_t> env{{"t0", t0}, {"t1", t1}};
        result = eval(def->second, env);
    }
    memo_.emplace(key, result);
    return result;
}

bool MfoEvaluator::quantify(const Formula& f, std::size_t var, std::map<std::string, std::size_t>& env, bool exists) {
    if (var == f.vars.size()) return eval(f.args[0], env);
    const std::string& name = f.vars[var];
    const auto saved = env.find(name) == env.end() ? std::nullopt : std::optional<std::size_t>(env[name]);
    bool result = !exists;
    for (std::size_t p = 0; p < word_.size(); ++p) {
        env[name] = p;
        if (quantify(f, var + 1, env, exists) == exists) {
            result = exists;
            break;
        }
    }
    if (saved) {
        env[name] = *saved;
    } else {
        env.erase(name);
    }
    return result;
}

bool MfoEvaluator::eval(const Formula& f, std::map<std::string, std::size_t>& env) {
    auto at = [&](std::size_t i) { return env.at(f.vars[i]); };
    switch (f.kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Pred: {
            const std::size_t p = at(0);
            return p < word_.size() && word_[p].contains(Identifier(f.name));
        }
        case K::Eq: return at(0) == at(1);
        case K::Le: return at(0) <= at(1);
        case K::Lt: return at(0) < at(1);
        case K::Not: return !eval(f.args[0], env);
        case K::And:
            return std::all_of(f.args.begin(), f.args.end(), [&](const Formula& g) { return eval(g, env); });
        case K::Or:
            return std::any_of(f.args.begin(), f.args.end(), [&](const Formula& g) { return eval(g, env); });
        case K::Implies: return !eval(f.args[0], env) || eval(f.args[1], env);
        case K::Exists: return quantify(f, 0, env, true);
        case K::Forall: return quantify(f, 0, env, false);
        case K::Call: return holds(Identifier(f.name), at(0), at(1));
    }
    return false;
}

}  // namespace nfer
