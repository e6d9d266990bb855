#pragma once

// Context-free grammars in Chomsky normal form and their simulation by
// data-free specifications.
//
// A word w = w_0 ... w_{n-1} becomes the trace (w_0, 0) ... (w_{n-1}, n-1).
// The compiled specification turns every letter of the trace into a one-step
// interval, then assembles nonterminals with `meet`, so a nonterminal A yields
// (A, i, j) iff A derives the letters at positions i .. j-1. Callers append
// one extra letter to the word so that the last real letter has a right
// neighbour to meet.
//
// Grammar text:
//
//     start: S
//     S -> A B
//     A -> a
//     # comments and blank lines are ignored

#include "nfer/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nfer {

/// `lhs -> first` (terminal) or `lhs -> first second` (two nonterminals).
struct Production {
    Identifier lhs;
    Identifier first;
    std::optional<Identifier> second;

    [[nodiscard]] bool binary() const noexcept { return second.has_value(); }

    friend bool operator==(const Production&, const Production&) = default;
    friend auto operator<=>(const Production&, const Production&) = default;
};

std::string to_string(const Production& p);

class Grammar {
public:
    /// Nonterminals are the start symbol, every lhs and every binary rhs;
    /// terminals are the unary right-hand sides. Throws InvalidGrammar when
    /// the two sets overlap.
    Grammar(Identifier start, std::vector<Production> productions);

    [[nodiscard]] const Identifier& start() const noexcept { return start_; }
    [[nodiscard]] const std::vector<Production>& productions() const noexcept { return productions_; }
    [[nodiscard]] const IdentifierSet& nonterminals() const noexcept { return nonterminals_; }
    [[nodiscard]] const IdentifierSet& terminals() const noexcept { return terminals_; }

private:
    Identifier start_;
    std::vector<Production> productions_;  // sorted, without duplicates
    IdentifierSet nonterminals_;
    IdentifierSet terminals_;
};

/// Throws ParseError (line-located) or InvalidGrammar.
Grammar parse_grammar(std::string_view text);
std::string render_grammar(const Grammar& g);

using Word = std::vector<Identifier>;

/// Splits on whitespace; a token-free string of letters is split per
/// character ("aabb" -> a a b b). Throws InvalidIdentifier.
Word parse_word(std::string_view text);
std::string render_word(const Word& w);

/// Letter i at timestamp i. Throws EmptyWord.
Trace trace_of_word(const Word& w);
/// Identifiers in trace order.
Word word_of_trace(const Trace& t);

/// CYK membership; the empty word is never a member. Throws
/// TerminalNotInAlphabet.
bool cyk_member(const Grammar& g, const Word& w);

struct CompiledSpec {
    Specification spec;
    Identifier target;
    Identifier spoil;
    /// Generated name per (letter, step) for steps 2, 3 and 4.
    std::map<std::pair<Identifier, int>, Identifier> layers;
    /// Nonterminals of the second grammar renamed to avoid clashes.
    std::map<Identifier, Identifier> renamed;

    [[nodiscard]] const Identifier& layer(const Identifier& letter, int step) const {
        return layers.at({letter, step});
    }
};

/// Generated name for a letter at one compilation step.
Identifier layer_name(const Identifier& letter, int step);

/// The specification whose evaluation on trace_of_word(w a) contains
/// (g.start(), 0, |w|) iff g derives w, for any letter a.
CompiledSpec compile_single(const Grammar& g);

/// Adds `target <- S1 coincide S2`, so evaluation on trace_of_word(w a)
/// contains (target, 0, |w|) iff both grammars derive w. Throws
/// InvalidGrammar when `target` collides with a grammar symbol.
CompiledSpec compile_pair(const Grammar& g1, const Grammar& g2, const Identifier& target);

}  // namespace nfer
