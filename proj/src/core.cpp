#include "nfer/core.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace nfer {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidIdentifier: return "invalid identifier";
        case ErrorKind::InvalidInterval: return "invalid interval";
        case ErrorKind::InvalidTrace: return "invalid trace";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::ExclusiveInCycle: return "exclusive rule in cycle";
        case ErrorKind::NotInclusive: return "specification is not inclusive";
        case ErrorKind::NotCycleFree: return "specification is not cycle-free";
        case ErrorKind::BudgetExceeded: return "search budget exceeded";
        case ErrorKind::InvalidGrammar: return "invalid grammar";
        case ErrorKind::EmptyWord: return "empty word";
        case ErrorKind::TerminalNotInAlphabet: return "terminal not in alphabet";
        case ErrorKind::Overflow: return "timestamp overflow";
    }
    return "error";
}

Identifier::Identifier(std::string name) : name_(std::move(name)) {
    if (!is_valid(name_)) {
        throw Error(ErrorKind::InvalidIdentifier, "invalid identifier '" + name_ + "'");
    }
}

bool Identifier::is_valid(std::string_view token) noexcept {
    if (token.empty()) return false;
    return std::all_of(token.begin(), token.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

std::ostream& operator<<(std::ostream& os, const Identifier& id) { return os << id.str(); }

IdentifierSet make_identifier_set(std::initializer_list<const char*> names) {
    IdentifierSet out;
    for (const char* n : names) out.emplace(n);
    return out;
}

std::ostream& operator<<(std::ostream& os, const Event& e) {
    return os << '(' << e.id << ',' << e.ts << ')';
}

Trace::Trace(std::vector<Event> events) : events_(std::move(events)) {
    for (std::size_t i = 1; i < events_.size(); ++i) {
        if (events_[i].ts < events_[i - 1].ts) {
            throw Error(ErrorKind::InvalidTrace,
                        "timestamps decrease at event " + std::to_string(i));
        }
    }
}

Trace Trace::from_unsorted(std::vector<Event> events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.ts < b.ts; });
    return Trace(std::move(events));
}

std::vector<Timestamp> Trace::timestamps() const {
    std::vector<Timestamp> out;
    for (const auto& e : events_) {
        if (out.empty() || out.back() != e.ts) out.push_back(e.ts);
    }
    return out;
}

IdentifierSet Trace::identifiers() const {
    IdentifierSet out;
    for (const auto& e : events_) out.insert(e.id);
    return out;
}

std::ostream& operator<<(std::ostream& os, const Trace& t) {
    bool first = true;
    for (const auto& e : t) {
        if (!first) os << ',';
        os << e;
        first = false;
    }
    return os;
}

Interval::Interval(Identifier id, Timestamp start, Timestamp end)
    : id_(std::move(id)), start_(start), end_(end) {
    if (start_ > end_) {
        throw Error(ErrorKind::InvalidInterval, "interval " + id_.str() + " starts after it ends");
    }
}

std::ostream& operator<<(std::ostream& os, const Interval& i) {
    return os << '(' << i.id() << ',' << i.start() << ',' << i.end() << ')';
}

Interval init(const Event& e) { return Interval(e.id, e.ts, e.ts); }

Pool Pool::from_trace(const Trace& t) {
    Pool p;
    for (const auto& e : t) p.insert(init(e));
    return p;
}

bool Pool::contains_id(const Identifier& id) const {
    return std::any_of(begin(), end(), [&](const Interval& i) { return i.id() == id; });
}

std::vector<Interval> Pool::with_id(const Identifier& id) const {
    std::vector<Interval> out;
    for (const auto& i : intervals_) {
        if (i.id() == id) out.push_back(i);
    }
    return out;
}

bool Pool::includes(const Pool& other) const {
    return std::includes(begin(), end(), other.begin(), other.end());
}

Pool pool_union(const Pool& a, const Pool& b) {
    Pool out = a;
    out.merge(b);
    return out;
}

std::ostream& operator<<(std::ostream& os, const Pool& p) {
    os << '{';
    bool first = true;
    for (const auto& i : p) {
        if (!first) os << ',';
        os << i;
        first = false;
    }
    return os << '}';
}

std::string_view to_string(InclusiveOp op) {
    switch (op) {
        case InclusiveOp::Before: return "before";
        case InclusiveOp::Meet: return "meet";
        case InclusiveOp::During: return "during";
        case InclusiveOp::Coincide: return "coincide";
        case InclusiveOp::Start: return "start";
        case InclusiveOp::Finish: return "finish";
        case InclusiveOp::Overlap: return "overlap";
        case InclusiveOp::Slice: return "slice";
    }
    return "?";
}

std::string_view to_string(ExclusiveOp op) {
    switch (op) {
        case ExclusiveOp::After: return "after";
        case ExclusiveOp::Follow: return "follow";
        case ExclusiveOp::Contain: return "contain";
    }
    return "?";
}

std::optional<InclusiveOp> inclusive_op_from_string(std::string_view s) {
    for (auto op : kInclusiveOps) {
        if (to_string(op) == s) return op;
    }
    return std::nullopt;
}

std::optional<ExclusiveOp> exclusive_op_from_string(std::string_view s) {
    for (auto op : kExclusiveOps) {
        if (to_string(op) == s) return op;
    }
    return std::nullopt;
}

std::string to_string(const Rule& r) {
    std::string out = r.lhs.str() + " <- " + r.rhs1.str() + ' ';
    if (r.inclusive()) {
        out += to_string(r.inclusive_op());
    } else {
        out += "unless ";
        out += to_string(r.exclusive_op());
    }
    out += ' ' + r.rhs2.str();
    return out;
}

std::ostream& operator<<(std::ostream& os, const Rule& r) { return os << to_string(r); }

bool Specification::inclusive_only() const noexcept {
    return std::all_of(rules_.begin(), rules_.end(), [](const Rule& r) { return r.inclusive(); });
}

IdentifierSet Specification::identifiers() const {
    IdentifierSet out;
    for (const auto& r : rules_) {
        out.insert(r.lhs);
        out.insert(r.rhs1);
        out.insert(r.rhs2);
    }
    return out;
}

IdentifierSet Specification::produced_identifiers() const {
    IdentifierSet out;
    for (const auto& r : rules_) out.insert(r.lhs);
    return out;
}

Rule inclusive_rule(Identifier lhs, Identifier rhs1, InclusiveOp op, Identifier rhs2) {
    return Rule{std::move(lhs), std::move(rhs1), op, std::move(rhs2)};
}

Rule exclusive_rule(Identifier lhs, Identifier rhs1, ExclusiveOp op, Identifier rhs2) {
    return Rule{std::move(lhs), std::move(rhs1), op, std::move(rhs2)};
}

std::string to_string(const IdentifierSet& ids) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& id : ids) {
        if (!first) os << ',';
        os << id;
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace nfer
