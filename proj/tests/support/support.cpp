#include "support.hpp"

#include "nfer/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace nfer::testing {

std::vector<Identifier> names(std::size_t n, std::size_t inputs) {
    static const char* kInputs[] = {"a", "b", "c", "d", "e", "f"};
    std::vector<Identifier> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(i < inputs ? std::string(kInputs[i]) : "X" + std::to_string(i - inputs));
    }
    return out;
}

namespace {

Rule random_rule(Rng& rng, const std::vector<Identifier>& ids, std::size_t inputs, bool exclusive) {
    std::uniform_int_distribution<std::size_t> any(0, ids.size() - 1);
    std::uniform_int_distribution<std::size_t> produced(inputs < ids.size() ? inputs : 0, ids.size() - 1);
    std::bernoulli_distribution input_lhs(0.1);
    const Identifier lhs = input_lhs(rng) ? ids[any(rng)] : ids[produced(rng)];
    const Identifier r1 = ids[any(rng)];
    const Identifier r2 = ids[any(rng)];
    if (exclusive) {
        std::uniform_int_distribution<std::size_t> op(0, std::size(kExclusiveOps) - 1);
        return exclusive_rule(lhs, r1, kExclusiveOps[op(rng)], r2);
    }
    std::uniform_int_distribution<std::size_t> op(0, std::size(kInclusiveOps) - 1);
    return inclusive_rule(lhs, r1, kInclusiveOps[op(rng)], r2);
}

std::size_t count_inputs(const std::vector<Identifier>& ids) {
    return static_cast<std::size_t>(std::count_if(ids.begin(), ids.end(), [](const Identifier& id) {
        return std::islower(static_cast<unsigned char>(id.str()[0]));
    }));
}

}  // namespace

Specification random_spec(Rng& rng, const std::vector<Identifier>& ids, std::size_t rules, double exclusive_ratio) {
    const std::size_t inputs = count_inputs(ids);
    std::bernoulli_distribution exclusive(exclusive_ratio);
    std::vector<Rule> out;
    for (std::size_t i = 0, attempts = 0; i < rules && attempts < rules * 20; ++attempts) {
        out.push_back(random_rule(rng, ids, inputs, exclusive(rng)));
        if (!exclusive_rules_in_cycles(Specification(out)).empty()) {
            out.pop_back();
            continue;
        }
        ++i;
    }
    return Specification(std::move(out));
}

RandomProblem random_problem(Rng& rng, const SpecShape& shape) {
    std::uniform_int_distribution<std::size_t> input_count(1, shape.max_inputs);
    std::uniform_int_distribution<std::size_t> rule_count(1, shape.max_rules);
    const std::size_t k = input_count(rng);
    std::vector<Identifier> ids = names(shape.identifiers, k);
    Specification spec = random_spec(rng, ids, rule_count(rng), shape.exclusive_ratio);
    IdentifierSet inputs(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));

    // Prefer a produced identifier as the target; fall back to any name.
    std::vector<Identifier> candidates;
    for (const Rule& r : spec) candidates.push_back(r.lhs);
    if (candidates.empty()) candidates = ids;
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    Identifier target = candidates[pick(rng)];
    return RandomProblem{std::move(spec), std::move(inputs), std::move(target), std::move(ids)};
}

Trace random_trace(Rng& rng, const std::vector<Identifier>& alphabet, std::size_t max_events, Timestamp max_ts) {
    std::uniform_int_distribution<std::size_t> count(0, max_events);
    std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
    std::uniform_int_distribution<Timestamp> ts(0, max_ts);
    std::vector<Event> events;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) events.push_back(Event{alphabet[letter(rng)], ts(rng)});
    return Trace::from_unsorted(std::move(events));
}

Pool reference_evaluate(const Specification& spec, const Trace& trace) {
    const std::size_t n = spec.size();
    // reach[u][v]: v depends transitively on u.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            reach[u][v] = spec[v].rhs1 == spec[u].lhs || spec[v].rhs2 == spec[u].lhs;
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (reach[u][k] && reach[k][v]) reach[u][v] = true;

    // Components as groups of mutually reachable rules, ordered so that a group
    // comes after every group it depends on.
    std::vector<int> group(n, -1);
    std::vector<std::vector<Rule>> groups;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t u = 0; u < n; ++u) {
        if (group[u] >= 0) continue;
        group[u] = static_cast<int>(groups.size());
        groups.push_back({spec[u]});
        members.push_back({u});
        for (std::size_t v = u + 1; v < n; ++v) {
            if (reach[u][v] && reach[v][u]) {
                group[v] = group[u];
                groups.back().push_back(spec[v]);
                members.back().push_back(v);
            }
        }
    }
    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Number of groups each group depends on is a valid topological key.
    auto deps = [&](std::size_t g) {
        std::size_t d = 0;
        for (std::size_t h = 0; h < groups.size(); ++h) {
            if (h != g && reach[members[h].front()][members[g].front()]) ++d;
        }
        return d;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return deps(x) < deps(y); });

    Pool pool = Pool::from_trace(trace);
    for (std::size_t g : order) {
        while (true) {
            Pool next = apply_spec_once(groups[g], pool);
            if (next == pool) break;
            pool = std::move(next);
        }
    }
    return pool;
}

Grammar random_grammar(Rng& rng, std::size_t max_nonterminals) {
    std::uniform_int_distribution<std::size_t> count(1, max_nonterminals);
    const std::size_t k = count(rng);
    std::vector<Identifier> nts;
    for (std::size_t i = 0; i < k; ++i) nts.emplace_back(i == 0 ? std::string("S") : "N" + std::to_string(i));
    const Identifier terminals[] = {Identifier("a"), Identifier("b")};

    std::uniform_int_distribution<std::size_t> nt(0, k - 1);
    std::uniform_int_distribution<std::size_t> per(1, 3);
    std::bernoulli_distribution unary(0.4);
    std::bernoulli_distribution coin(0.5);
    std::vector<Production> prods;
    for (const Identifier& lhs : nts) {
        const std::size_t m = per(rng);
        for (std::size_t i = 0; i < m; ++i) {
            if (unary(rng)) {
                prods.push_back(Production{lhs, terminals[coin(rng)], std::nullopt});
            } else {
                prods.push_back(Production{lhs, nts[nt(rng)], nts[nt(rng)]});
            }
        }
    }
    // Both letters must belong to the alphabet.
    for (const Identifier& t : terminals) {
        const bool present = std::any_of(prods.begin(), prods.end(),
                                         [&](const Production& p) { return !p.binary() && p.first == t; });
        if (!present) prods.push_back(Production{nts[nt(rng)], t, std::nullopt});
    }
    return Grammar(nts.front(), std::move(prods));
}

std::set<Word> derivable_words(const Grammar& g, std::size_t max_len) {
    std::map<Identifier, std::set<Word>> lang;
    for (const Production& p : g.productions()) {
        if (!p.binary()) lang[p.lhs].insert(Word{p.first});
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const Production& p : g.productions()) {
            if (!p.binary()) continue;
            const std::set<Word> left = lang[p.first];
            const std::set<Word> right = lang[*p.second];
            for (const Word& u : left) {
                for (const Word& v : right) {
                    if (u.size() + v.size() > max_len) continue;
                    Word w = u;
                    w.insert(w.end(), v.begin(), v.end());
                    changed |= lang[p.lhs].insert(std::move(w)).second;
                }
            }
        }
    }
    return lang[g.start()];
}

std::vector<Word> all_words(const std::vector<Identifier>& alphabet, std::size_t max_len) {
    std::vector<Word> out;
    std::vector<Word> frontier{Word{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            for (const Identifier& a : alphabet) {
                Word x = w;
                x.push_back(a);
                next.push_back(x);
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

namespace {

class MfoChecker {
public:
    MfoChecker(const std::string& text, const IdentifierSet& preds) : preds_(preds) { tokenize(text); }

    std::string check() {
        scope_.push_back({"t0", "t1"});
        formula();
        if (error_.empty() && pos_ != toks_.size()) fail("trailing token '" + toks_[pos_] + "'");
        return error_;
    }

private:
    void tokenize(const std::string& s) {
        for (std::size_t i = 0; i < s.size();) {
            const char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
                toks_.push_back(s.substr(i, j - i));
                i = j;
            } else if (s.compare(i, 2, "->") == 0 || s.compare(i, 2, "<=") == 0) {
                toks_.push_back(s.substr(i, 2));
                i += 2;
            } else {
                toks_.push_back(std::string(1, c));
                ++i;
            }
        }
    }

    const std::string& peek(std::size_t ahead = 0) const {
        static const std::string kEnd;
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEnd;
    }
    void fail(const std::string& msg) {
        if (error_.empty()) error_ = msg + " at token " + std::to_string(pos_);
    }
    void expect(const std::string& tok) {
        if (peek() != tok) return fail("expected '" + tok + "', got '" + peek() + "'");
        ++pos_;
    }
    bool bound(const std::string& v) const {
        return std::any_of(scope_.begin(), scope_.end(), [&](const auto& s) { return s.contains(v); });
    }
    void variable() {
        if (!bound(peek())) fail("unbound variable '" + peek() + "'");
        ++pos_;
    }

    void formula() {
        disjunction();
        if (peek() == "->") {
            ++pos_;
            disjunction();
        }
    }
    void disjunction() {
        conjunction();
        while (error_.empty() && peek() == "|") {
            ++pos_;
            conjunction();
        }
    }
    void conjunction() {
        unary();
        while (error_.empty() && peek() == "&") {
            ++pos_;
            unary();
        }
    }
    void unary() {
        if (peek() == "~") {
            ++pos_;
            return unary();
        }
        primary();
    }
    void primary() {
        if (!error_.empty()) return;
        const std::string& t = peek();
        if (t == "TRUE" || t == "FALSE") {
            ++pos_;
            return;
        }
        if (t == "(") {
            ++pos_;
            if (peek() == "EXISTS" || peek() == "FORALL") {
                ++pos_;
                std::set<std::string> vars;
                while (error_.empty()) {
                    const std::string v = peek();
                    if (v.empty() || !std::isalpha(static_cast<unsigned char>(v[0]))) return fail("bad variable");
                    vars.insert(v);
                    ++pos_;
                    if (peek() != ",") break;
                    ++pos_;
                }
                expect(".");
                scope_.push_back(vars);
                formula();
                scope_.pop_back();
            } else {
                formula();
            }
            return expect(")");
        }
        if (peek(1) == "(") {
            if (!Identifier::is_valid(t) || !preds_.contains(Identifier(t))) return fail("undeclared predicate '" + t + "'");
            pos_ += 2;
            variable();
            return expect(")");
        }
        variable();
        const std::string op = peek();
        if (op != "=" && op != "<" && op != "<=") return fail("expected comparison, got '" + op + "'");
        ++pos_;
        variable();
    }

    const IdentifierSet& preds_;
    std::vector<std::string> toks_;
    std::size_t pos_ = 0;
    std::vector<std::set<std::string>> scope_;
    std::string error_;
};

}  // namespace

std::string check_mfo_text(const std::string& text, const IdentifierSet& predicates) {
    return MfoChecker(text, predicates).check();
}

std::size_t count_substring(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
    return n;
}

}  // namespace nfer::testing
