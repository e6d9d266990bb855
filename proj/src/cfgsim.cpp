#include "nfer/cfgsim.hpp"

#include "nfer/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nfer {

std::string to_string(const Production& p) {
    std::string out = p.lhs.str() + " -> " + p.first.str();
    if (p.second) out += " " + p.second->str();
    return out;
}

Grammar::Grammar(Identifier start, std::vector<Production> productions)
    : start_(std::move(start)), productions_(std::move(productions)) {
    std::sort(productions_.begin(), productions_.end());
    productions_.erase(std::unique(productions_.begin(), productions_.end()), productions_.end());

    nonterminals_.insert(start_);
    for (const Production& p : productions_) {
        nonterminals_.insert(p.lhs);
        if (p.binary()) {
            nonterminals_.insert(p.first);
            nonterminals_.insert(*p.second);
        } else {
            terminals_.insert(p.first);
        }
    }
    for (const Identifier& a : terminals_) {
        if (nonterminals_.contains(a)) {
            throw Error(ErrorKind::InvalidGrammar, "symbol '" + a.str() + "' is both a terminal and a nonterminal");
        }
    }
    for (const auto* set : {&nonterminals_, &terminals_}) {
        for (const Identifier& s : *set) {
            if (s.str().starts_with(kReservedPrefix)) {
                throw Error(ErrorKind::InvalidGrammar, "symbol '" + s.str() + "' uses the reserved prefix " +
                                                           std::string(kReservedPrefix));
            }
        }
    }
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
    std::vector<Diagnostic> errors;
    std::optional<Identifier> start;
    std::vector<Production> productions;

    auto error = [&](std::size_t line, std::string message) {
        errors.push_back(Diagnostic{Severity::Error, std::move(message), line, 0, std::nullopt});
    };
    auto ident = [&](std::size_t line, const std::string& tok) -> std::optional<Identifier> {
        if (!Identifier::is_valid(tok)) {
            error(line, "invalid symbol '" + tok + "'");
            return std::nullopt;
        }
        return Identifier(tok);
    };

    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;

        if (!start) {
            // `start: S` or `start : S` or `start:S`
            std::string joined;
            for (const auto& t : toks) joined += t + " ";
            const auto colon = joined.find(':');
            const auto head = split_ws(std::string_view(joined).substr(0, colon));
            if (colon == std::string::npos || head.size() != 1 || head[0] != "start") {
                error(lineno, "expected 'start: <symbol>' before any production");
                break;
            }
            const auto rest = split_ws(std::string_view(joined).substr(colon + 1));
            if (rest.size() != 1) {
                error(lineno, "expected exactly one start symbol");
                break;
            }
            start = ident(lineno, rest[0]);
            if (!start) break;
            continue;
        }

        if (toks.size() < 3 || toks[1] != "->" || toks.size() > 4) {
            error(lineno, "expected 'A -> B C' or 'A -> a'");
            continue;
        }
        auto lhs = ident(lineno, toks[0]);
        auto first = ident(lineno, toks[2]);
        std::optional<Identifier> second;
        if (toks.size() == 4) {
            second = ident(lineno, toks[3]);
            if (!second) continue;
        }
        if (lhs && first) productions.push_back(Production{*lhs, *first, second});
    }
    if (!start && errors.empty()) error(lineno, "missing 'start: <symbol>' line");
    if (!errors.empty()) throw ParseError(std::move(errors));
    return Grammar(*start, std::move(productions));
}

std::string render_grammar(const Grammar& g) {
    std::string out = "start: " + g.start().str() + "\n";
    for (const Production& p : g.productions()) out += to_string(p) + "\n";
    return out;
}

Word parse_word(std::string_view text) {
    std::string normalized(text);
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    const auto toks = split_ws(normalized);
    Word out;
    if (toks.size() == 1) {
        for (char c : toks[0]) out.emplace_back(std::string(1, c));
        return out;
    }
    for (const auto& t : toks) out.emplace_back(t);
    return out;
}

std::string render_word(const Word& w) {
    const bool single = std::all_of(w.begin(), w.end(), [](const Identifier& a) { return a.str().size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i && !single) out += ' ';
        out += w[i].str();
    }
    return out;
}

Trace trace_of_word(const Word& w) {
    if (w.empty()) throw Error(ErrorKind::EmptyWord, "cannot build a trace from the empty word");
    std::vector<Event> events;
    events.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) events.push_back(Event{w[i], static_cast<Timestamp>(i)});
    return Trace(std::move(events));
}

Word word_of_trace(const Trace& t) {
    Word out;
    out.reserve(t.size());
    for (const Event& e : t) out.push_back(e.id);
    return out;
}

bool cyk_member(const Grammar& g, const Word& w) {
    for (const Identifier& a : w) {
        if (!g.terminals().contains(a)) {
            throw Error(ErrorKind::TerminalNotInAlphabet, "letter '" + a.str() + "' is not a terminal of the grammar");
        }
    }
    const std::size_t n = w.size();
    if (n == 0) return false;

    std::map<Identifier, std::size_t> index;
    for (const Identifier& v : g.nonterminals()) index.emplace(v, index.size());
    const std::size_t nv = index.size();

    // table[(len - 1) * n + i] holds the nonterminals deriving w[i .. i+len).
    std::vector<std::vector<bool>> table(n * n, std::vector<bool>(nv, false));
    auto cell = [&](std::size_t i, std::size_t len) -> std::vector<bool>& { return table[(len - 1) * n + i]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (const Production& p : g.productions()) {
            if (!p.binary() && p.first == w[i]) cell(i, 1)[index.at(p.lhs)] = true;
        }
    }
    for (std::size_t len = 2; len <= n; ++len) {
        for (std::size_t i = 0; i + len <= n; ++i) {
            auto& out = cell(i, len);
            for (std::size_t k = 1; k < len; ++k) {
                const auto& left = cell(i, k);
                const auto& right = cell(i + k, len - k);
                for (const Production& p : g.productions()) {
                    if (p.binary() && left[index.at(p.first)] && right[index.at(*p.second)]) {
                        out[index.at(p.lhs)] = true;
                    }
                }
            }
        }
    }
    return cell(0, n)[index.at(g.start())];
}

Identifier layer_name(const Identifier& letter, int step) {
    return Identifier(std::string(kReservedPrefix) + letter.str() + "_" + std::to_string(step));
}

namespace {

const Identifier& kSpoil() {
    static const Identifier id(std::string(kReservedPrefix) + "SPOIL");
    return id;
}

Identifier renamed_name(const Identifier& nonterminal) {
    return Identifier(std::string(kReservedPrefix) + nonterminal.str() + "__g2");
}

// Steps one to four: isolate letters with unique timestamps and link each to
// its right neighbour with a minimal interval.
void add_letter_layers(CompiledSpec& out, const IdentifierSet& sigma) {
    for (const Identifier& a : sigma) {
        for (const Identifier& b : sigma) {
            if (a != b) out.spec.add(inclusive_rule(out.spoil, a, InclusiveOp::Coincide, b));
        }
    }
    for (const Identifier& a : sigma) {
        for (int step : {2, 3, 4}) out.layers.emplace(std::make_pair(a, step), layer_name(a, step));
    }
    for (const Identifier& a : sigma) {
        out.spec.add(exclusive_rule(out.layer(a, 2), a, ExclusiveOp::Contain, out.spoil));
    }
    for (const Identifier& a : sigma) {
        for (const Identifier& b : sigma) {
            out.spec.add(inclusive_rule(out.layer(a, 3), out.layer(a, 2), InclusiveOp::Before, out.layer(b, 2)));
        }
    }
    for (const Identifier& a : sigma) {
        out.spec.add(exclusive_rule(out.layer(a, 4), out.layer(a, 3), ExclusiveOp::Contain, out.layer(a, 3)));
    }
}

// Step five: one rule per production.
void add_productions(CompiledSpec& out, const Grammar& g, const std::map<Identifier, Identifier>& rename) {
    auto name = [&](const Identifier& v) {
        auto it = rename.find(v);
        return it == rename.end() ? v : it->second;
    };
    for (const Production& p : g.productions()) {
        if (p.binary()) {
            out.spec.add(inclusive_rule(name(p.lhs), name(p.first), InclusiveOp::Meet, name(*p.second)));
        } else {
            const Identifier& a4 = out.layer(p.first, 4);
            out.spec.add(inclusive_rule(name(p.lhs), a4, InclusiveOp::Coincide, a4));
        }
    }
}

}  // namespace

CompiledSpec compile_single(const Grammar& g) {
    CompiledSpec out{{}, g.start(), kSpoil(), {}, {}};
    add_letter_layers(out, g.terminals());
    add_productions(out, g, {});
    return out;
}

CompiledSpec compile_pair(const Grammar& g1, const Grammar& g2, const Identifier& target) {
    IdentifierSet sigma = g1.terminals();
    sigma.insert(g2.terminals().begin(), g2.terminals().end());
    for (const Identifier& v : g1.nonterminals()) {
        if (sigma.contains(v)) {
            throw Error(ErrorKind::InvalidGrammar,
                        "nonterminal '" + v.str() + "' of the first grammar is a terminal of the second");
        }
    }

    CompiledSpec out{{}, target, kSpoil(), {}, {}};
    for (const Identifier& v : g2.nonterminals()) {
        if (g1.nonterminals().contains(v) || sigma.contains(v)) out.renamed.emplace(v, renamed_name(v));
    }
    const Identifier start2 = out.renamed.contains(g2.start()) ? out.renamed.at(g2.start()) : g2.start();

    if (sigma.contains(target) || g1.nonterminals().contains(target) || g2.nonterminals().contains(target)) {
        throw Error(ErrorKind::InvalidGrammar, "target '" + target.str() + "' collides with a grammar symbol");
    }

    add_letter_layers(out, sigma);
    add_productions(out, g1, {});
    add_productions(out, g2, out.renamed);
    out.spec.add(inclusive_rule(target, g1.start(), InclusiveOp::Coincide, start2));
    return out;
}

}  // namespace nfer
