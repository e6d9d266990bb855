#pragma once

// Concrete syntax for specifications and traces.
//
// Specification files hold one rule per line:
//
//     c <- a meet b
//     b <- d unless follow c
//     # comments and blank lines are ignored
//
// Traces are either CSV (`identifier,timestamp`, no header) or JSON lines
// (`{"name": "a", "ts": 0}`).

#include "nfer/core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nfer {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    std::size_t line = 0;    // 1-based, 0 when unknown
    std::size_t column = 0;  // 1-based, 0 when unknown
    std::optional<std::size_t> rule;  // 0-based rule index

    [[nodiscard]] std::string to_string() const;
};

class ParseError : public Error {
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);

    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Prefix reserved for names generated by the CFG compiler.
inline constexpr std::string_view kReservedPrefix = "__nfer_";

bool is_keyword(std::string_view token) noexcept;

struct ParseOptions {
    /// Accept identifiers starting with kReservedPrefix (compiled specs).
    bool allow_reserved = false;
};

struct ParsedSpec {
    Specification spec;
    std::vector<Diagnostic> warnings;
    std::vector<std::size_t> lines;  // source line of each rule
};

/// Throws ParseError carrying every error found in the document.
ParsedSpec parse_spec(std::string_view text, const ParseOptions& options = {});

/// One rule per line, in order, round-trippable through parse_spec.
std::string render_spec(const Specification& spec);

enum class TraceFormat { Csv, JsonLines };

/// Rows are stably sorted by timestamp. Throws ParseError.
Trace parse_trace(std::string_view text, TraceFormat format);

std::string render_trace_csv(const Trace& t);

struct ValidateOptions {
    /// Also warn about identifiers that only ever appear on a right-hand side.
    bool rhs_only_warnings = false;
    /// Source line per rule, used to fill in diagnostic locations.
    std::vector<std::size_t> lines;
};

/// Errors for exclusive rules on a dependency cycle; warnings for rules that
/// consume an identifier nobody produces.
std::vector<Diagnostic> validate_spec(const Specification& spec, const IdentifierSet& inputs,
                                      const ValidateOptions& options = {});

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace nfer
