#pragma once

// Monadic first-order formulas over finite words of letter sets.
//
// Each identifier X of a cycle-free specification gets a definition
// phi_X(t0, t1) that holds on a word exactly when evaluating the
// specification on the corresponding trace yields the interval (X, t0, t1).
// Positions stand for timestamps and every letter at position p is an event
// at time p.
//
// Text syntax (ASCII): EXISTS, FORALL, &, |, ~, ->, <=, <, =, TRUE, FALSE and
// predicates `a(t)`. Definitions refer to each other through calls
// `phi_X(u, v)`; inline_formula substitutes them away.

#include "nfer/core.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

namespace nfer {

struct Formula {
    enum class Kind { True, False, Pred, Eq, Le, Lt, Not, And, Or, Implies, Exists, Forall, Call };

    Kind kind = Kind::True;
    std::string name;                // predicate or called identifier
    std::vector<std::string> vars;   // operands, or bound variables for quantifiers
    std::vector<Formula> args;       // sub-formulas

    static Formula truth(bool value);
    static Formula pred(std::string name, std::string var);
    static Formula eq(std::string a, std::string b);
    static Formula le(std::string a, std::string b);
    static Formula lt(std::string a, std::string b);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> fs);
    static Formula disj(std::vector<Formula> fs);
    static Formula implies(Formula a, Formula b);
    static Formula exists(std::vector<std::string> vars, Formula body);
    static Formula forall(std::vector<std::string> vars, Formula body);
    static Formula call(const Identifier& id, std::string from, std::string to);

    friend bool operator==(const Formula&, const Formula&) = default;
};

std::string render(const Formula& f);

/// Definitions for every identifier of a cycle-free specification. Free
/// variables of each body are t0 and t1; bound variables use names that never
/// start with 't'.
struct MfoSystem {
    IdentifierSet events;
    std::map<Identifier, Formula> definitions;
};

/// `events` defaults to the identifiers that no rule produces. Identifiers in
/// `events` keep their rules as extra disjuncts. Throws NotCycleFree.
MfoSystem build_mfo(const Specification& spec, const std::optional<IdentifierSet>& events = std::nullopt);

/// phi_target with every call expanded; bound variables are renamed to
/// t2, t3, ... in order of appearance.
Formula inline_formula(const MfoSystem& system, const Identifier& target);

/// Rendered inline formula for `target`; by default a target no rule produces
/// is treated as an event. Throws NotCycleFree.
std::string mfo_emit(const Specification& spec, const Identifier& target,
                     const std::optional<IdentifierSet>& events = std::nullopt);

/// Word over 2^Sigma: position p holds the letters occurring at time p.
using LetterWord = std::vector<IdentifierSet>;

/// Timestamps become positions; times not present in the trace are empty.
LetterWord letter_word(const Trace& trace);

/// Model checker for definitions, memoized per (identifier, t0, t1).
class MfoEvaluator {
public:
    MfoEvaluator(const MfoSystem& system, LetterWord word);

    [[nodiscard]] bool holds(const Identifier& id, std::size_t t0, std::size_t t1);
    /// Evaluates a closed-over formula with the given variable assignment.
    [[nodiscard]] bool eval(const Formula& f, std::map<std::string, std::size_t>& env);

    [[nodiscard]] std::size_t length() const noexcept { return word_.size(); }

private:
    bool quantify(const Formula& f, std::size_t var, std::map<std::string, std::size_t>& env, bool exists);

    const MfoSystem& system_;
    LetterWord word_;
    std::map<std::tuple<Identifier, std::size_t, std::size_t>, bool> memo_;
};

}  // namespace nfer
