#pragma once

// Domain types for data-free nfer: identifiers, events, traces, intervals,
// pools and rules. All types are immutable-by-convention values.

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nfer {

enum class ErrorKind {
    InvalidIdentifier,
    InvalidInterval,
    InvalidTrace,
    Parse,
    ExclusiveInCycle,
    NotInclusive,
    NotCycleFree,
    BudgetExceeded,
    InvalidGrammar,
    EmptyWord,
    TerminalNotInAlphabet,
    Overflow,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

using Timestamp = std::uint64_t;

/// An event or interval label. Non-empty, made of ASCII letters, digits and
/// underscores; comparison is exact and case-sensitive.
class Identifier {
public:
    Identifier() = delete;
    explicit Identifier(std::string name);
    Identifier(const char* name) : Identifier(std::string(name)) {}

    [[nodiscard]] const std::string& str() const noexcept { return name_; }

    static bool is_valid(std::string_view token) noexcept;

    friend bool operator==(const Identifier&, const Identifier&) = default;
    friend std::strong_ordering operator<=>(const Identifier& a, const Identifier& b) {
        return a.name_.compare(b.name_) <=> 0;
    }

private:
    std::string name_;
};

std::ostream& operator<<(std::ostream& os, const Identifier& id);

using IdentifierSet = std::set<Identifier>;

IdentifierSet make_identifier_set(std::initializer_list<const char*> names);

struct Event {
    Identifier id;
    Timestamp ts;

    friend bool operator==(const Event&, const Event&) = default;
};

std::ostream& operator<<(std::ostream& os, const Event& e);

/// Sequence of events with non-decreasing timestamps.
class Trace {
public:
    Trace() = default;
    /// Throws InvalidTrace if timestamps decrease anywhere.
    explicit Trace(std::vector<Event> events);

    /// Stable sort by timestamp; equal timestamps keep their relative order.
    static Trace from_unsorted(std::vector<Event> events);

    [[nodiscard]] const std::vector<Event>& events() const noexcept { return events_; }
    [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
    [[nodiscard]] bool empty() const noexcept { return events_.empty(); }
    [[nodiscard]] auto begin() const noexcept { return events_.begin(); }
    [[nodiscard]] auto end() const noexcept { return events_.end(); }

    /// Distinct timestamps in increasing order.
    [[nodiscard]] std::vector<Timestamp> timestamps() const;
    [[nodiscard]] IdentifierSet identifiers() const;

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    std::vector<Event> events_;
};

std::ostream& operator<<(std::ostream& os, const Trace& t);

class Interval {
public:
    /// Throws InvalidInterval when start > end.
    Interval(Identifier id, Timestamp start, Timestamp end);

    [[nodiscard]] const Identifier& id() const noexcept { return id_; }
    [[nodiscard]] Timestamp start() const noexcept { return start_; }
    [[nodiscard]] Timestamp end() const noexcept { return end_; }
    [[nodiscard]] bool atomic() const noexcept { return start_ == end_; }

    friend bool operator==(const Interval&, const Interval&) = default;
    // Canonical order: (start, end, id).
    friend std::strong_ordering operator<=>(const Interval& a, const Interval& b) {
        if (auto c = a.start_ <=> b.start_; c != 0) return c;
        if (auto c = a.end_ <=> b.end_; c != 0) return c;
        return a.id_ <=> b.id_;
    }

private:
    Identifier id_;
    Timestamp start_;
    Timestamp end_;
};

std::ostream& operator<<(std::ostream& os, const Interval& i);

/// (e.id, e.ts, e.ts)
Interval init(const Event& e);

/// A finite set of intervals, iterated in canonical (start, end, id) order.
class Pool {
public:
    using container = std::set<Interval>;
    using const_iterator = container::const_iterator;

    Pool() = default;
    Pool(std::initializer_list<Interval> intervals) : intervals_(intervals) {}
    template <typename It>
    Pool(It first, It last) : intervals_(first, last) {}

    static Pool from_trace(const Trace& t);

    bool insert(const Interval& i) { return intervals_.insert(i).second; }
    void merge(const Pool& other) { intervals_.insert(other.begin(), other.end()); }

    [[nodiscard]] bool contains(const Interval& i) const { return intervals_.contains(i); }
    [[nodiscard]] bool contains_id(const Identifier& id) const;
    [[nodiscard]] std::vector<Interval> with_id(const Identifier& id) const;
    [[nodiscard]] bool includes(const Pool& other) const;

    [[nodiscard]] std::size_t size() const noexcept { return intervals_.size(); }
    [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }
    [[nodiscard]] const_iterator begin() const noexcept { return intervals_.begin(); }
    [[nodiscard]] const_iterator end() const noexcept { return intervals_.end(); }

    friend bool operator==(const Pool&, const Pool&) = default;

private:
    container intervals_;
};

Pool pool_union(const Pool& a, const Pool& b);
std::ostream& operator<<(std::ostream& os, const Pool& p);

enum class InclusiveOp { Before, Meet, During, Coincide, Start, Finish, Overlap, Slice };
enum class ExclusiveOp { After, Follow, Contain };

inline constexpr InclusiveOp kInclusiveOps[] = {
    InclusiveOp::Before, InclusiveOp::Meet,   InclusiveOp::During,  InclusiveOp::Coincide,
    InclusiveOp::Start,  InclusiveOp::Finish, InclusiveOp::Overlap, InclusiveOp::Slice,
};
inline constexpr ExclusiveOp kExclusiveOps[] = {
    ExclusiveOp::After, ExclusiveOp::Follow, ExclusiveOp::Contain,
};

std::string_view to_string(InclusiveOp op);
std::string_view to_string(ExclusiveOp op);
std::optional<InclusiveOp> inclusive_op_from_string(std::string_view s);
std::optional<ExclusiveOp> exclusive_op_from_string(std::string_view s);

/// `lhs <- rhs1 op rhs2` or `lhs <- rhs1 unless op rhs2`.
struct Rule {
    Identifier lhs;
    Identifier rhs1;
    std::variant<InclusiveOp, ExclusiveOp> op;
    Identifier rhs2;

    [[nodiscard]] bool inclusive() const noexcept { return std::holds_alternative<InclusiveOp>(op); }
    [[nodiscard]] InclusiveOp inclusive_op() const { return std::get<InclusiveOp>(op); }
    [[nodiscard]] ExclusiveOp exclusive_op() const { return std::get<ExclusiveOp>(op); }

    friend bool operator==(const Rule&, const Rule&) = default;
};

std::string to_string(const Rule& r);
std::ostream& operator<<(std::ostream& os, const Rule& r);

/// Ordered list of rules. Rule order matters within a fixed-point pass.
class Specification {
public:
    Specification() = default;
    explicit Specification(std::vector<Rule> rules) : rules_(std::move(rules)) {}
    Specification(std::initializer_list<Rule> rules) : rules_(rules) {}

    [[nodiscard]] const std::vector<Rule>& rules() const noexcept { return rules_; }
    [[nodiscard]] std::size_t size() const noexcept { return rules_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rules_.empty(); }
    [[nodiscard]] const Rule& operator[](std::size_t i) const { return rules_[i]; }
    [[nodiscard]] auto begin() const noexcept { return rules_.begin(); }
    [[nodiscard]] auto end() const noexcept { return rules_.end(); }

    void add(Rule r) { rules_.push_back(std::move(r)); }

    [[nodiscard]] bool inclusive_only() const noexcept;
    /// Every identifier mentioned on either side of any rule.
    [[nodiscard]] IdentifierSet identifiers() const;
    [[nodiscard]] IdentifierSet produced_identifiers() const;

    friend bool operator==(const Specification&, const Specification&) = default;

private:
    std::vector<Rule> rules_;
};

// Shorthands used heavily in tests and by the CFG compiler.
Rule inclusive_rule(Identifier lhs, Identifier rhs1, InclusiveOp op, Identifier rhs2);
Rule exclusive_rule(Identifier lhs, Identifier rhs1, ExclusiveOp op, Identifier rhs2);

std::string to_string(const IdentifierSet& ids);

}  // namespace nfer

template <>
struct std::hash<nfer::Identifier> {
    std::size_t operator()(const nfer::Identifier& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
