#pragma once

// Random generators and independent reference implementations for tests.

#include "nfer/cfgsim.hpp"
#include "nfer/core.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace nfer::testing {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kSeed = 20240611;

struct SpecShape {
    std::size_t max_rules = 4;
    std::size_t identifiers = 6;    // pool of names i0..i{n-1}, inputs come first
    std::size_t max_inputs = 3;
    double exclusive_ratio = 0.0;   // probability of drawing an exclusive rule
};

struct RandomProblem {
    Specification spec;
    IdentifierSet inputs;
    Identifier target;
    std::vector<Identifier> names;
};

/// Identifiers a, b, c, then X0, X1, ... for non-inputs.
std::vector<Identifier> names(std::size_t n, std::size_t inputs);

RandomProblem random_problem(Rng& rng, const SpecShape& shape);

/// Exclusive rules are dropped wherever they would sit on a cycle.
Specification random_spec(Rng& rng, const std::vector<Identifier>& ids, std::size_t rules, double exclusive_ratio);

/// Events over `alphabet` with timestamps in [0, max_ts].
Trace random_trace(Rng& rng, const std::vector<Identifier>& alphabet, std::size_t max_events, Timestamp max_ts);

/// T semantics straight from the definitions: every component's rule list is
/// folded with apply_spec_once until the pool stops changing.
Pool reference_evaluate(const Specification& spec, const Trace& trace);

/// Random CNF grammar over terminals {a, b}.
Grammar random_grammar(Rng& rng, std::size_t max_nonterminals);

/// Every word of length 1..max_len derivable from the start symbol, computed
/// by expanding derivations bottom-up (no CYK).
std::set<Word> derivable_words(const Grammar& g, std::size_t max_len);

/// All words over `alphabet` with length 1..max_len.
std::vector<Word> all_words(const std::vector<Identifier>& alphabet, std::size_t max_len);

/// Checks that `text` is a well-formed formula: balanced parentheses,
/// quantified variables bound before use, only the given predicates and the
/// free variables t0, t1. Returns an empty string when well-formed and a
/// description of the first problem otherwise.
std::string check_mfo_text(const std::string& text, const IdentifierSet& predicates);

/// Counts quantifier occurrences in rendered text.
std::size_t count_substring(const std::string& text, const std::string& needle);

}  // namespace nfer::testing
