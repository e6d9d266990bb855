#include "nfer/parser.hpp"

#include "nfer/semantics.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

namespace nfer {

std::string Diagnostic::to_string() const {
    std::ostringstream os;
    if (line > 0) {
        os << line;
        if (column > 0) os << ':' << column;
        os << ": ";
    } else if (rule) {
        os << "rule " << (*rule + 1) << ": ";
    }
    os << (severity == Severity::Error ? "error: " : "warning: ") << message;
    return os.str();
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (d.severity != Severity::Error) continue;
        if (!out.empty()) out += '\n';
        out += d.to_string();
    }
    return out.empty() ? "parse error" : out;
}

constexpr std::array kKeywords = {
    "before", "meet", "during", "coincide", "start", "finish", "overlap", "slice",
    "unless", "after", "follow", "contain",
};

struct Token {
    std::string text;
    std::size_t column;
    bool arrow = false;
};

bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

class LineParser {
public:
    LineParser(std::string_view line, std::size_t lineno, const ParseOptions& opts,
               std::vector<Diagnostic>& diags)
        : line_(line), lineno_(lineno), opts_(opts), diags_(diags) {}

    std::optional<Rule> parse() {
        if (!tokenize()) return std::nullopt;
        // IDENT <- IDENT OP IDENT | IDENT <- IDENT unless EXOP IDENT
        if (tokens_.size() < 5) return fail(tokens_.empty() ? 1 : tokens_.back().column, "incomplete rule");
        if (tokens_[0].arrow) return fail(tokens_[0].column, "expected identifier before '<-'");
        if (!tokens_[1].arrow) return fail(tokens_[1].column, "expected '<-' after '" + tokens_[0].text + "'");
        auto lhs = identifier(tokens_[0]);
        auto rhs1 = identifier(tokens_[2]);
        if (!lhs || !rhs1) return std::nullopt;

        const Token& op = tokens_[3];
        if (op.text == "unless") {
            if (tokens_.size() != 6) {
                return fail(tokens_.size() < 6 ? tokens_.back().column : tokens_[6].column,
                            tokens_.size() < 6 ? "incomplete rule" : "unexpected trailing token");
            }
            auto xop = exclusive_op_from_string(tokens_[4].text);
            if (!xop) return fail(tokens_[4].column, "unknown operator '" + tokens_[4].text + "' after 'unless'");
            auto rhs2 = identifier(tokens_[5]);
            if (!rhs2) return std::nullopt;
            return exclusive_rule(*lhs, *rhs1, *xop, *rhs2);
        }
        auto iop = inclusive_op_from_string(op.text);
        if (!iop) {
            if (exclusive_op_from_string(op.text)) {
                return fail(op.column, "operator '" + op.text + "' requires 'unless'");
            }
            return fail(op.column, "unknown operator '" + op.text + "'");
        }
        if (tokens_.size() != 5) return fail(tokens_[5].column, "unexpected trailing token");
        auto rhs2 = identifier(tokens_[4]);
        if (!rhs2) return std::nullopt;
        return inclusive_rule(*lhs, *rhs1, *iop, *rhs2);
    }

private:
    bool tokenize() {
        std::size_t i = 0;
        while (i < line_.size()) {
            const char c = line_[i];
            if (c == ' ' || c == '\t') {
                ++i;
            } else if (c == '#') {
                break;
            } else if (c == '<' && i + 1 < line_.size() && line_[i + 1] == '-') {
                tokens_.push_back({"<-", i + 1, true});
                i += 2;
            } else if (ident_char(c)) {
                const std::size_t b = i;
                while (i < line_.size() && ident_char(line_[i])) ++i;
                tokens_.push_back({std::string(line_.substr(b, i - b)), b + 1, false});
            } else {
                fail(i + 1, std::string("unexpected character '") + c + "'");
                return false;
            }
        }
        return true;
    }

    std::optional<Identifier> identifier(const Token& t) {
        if (t.arrow) return fail_id(t.column, "expected identifier, found '<-'");
        if (is_keyword(t.text)) return fail_id(t.column, "keyword '" + t.text + "' cannot be used as an identifier");
        if (!opts_.allow_reserved && t.text.starts_with(kReservedPrefix)) {
            return fail_id(t.column, "identifier '" + t.text + "' uses the reserved prefix " +
                                         std::string(kReservedPrefix));
        }
        return Identifier(t.text);
    }

    std::nullopt_t fail(std::size_t column, std::string message) {
        diags_.push_back({Severity::Error, std::move(message), lineno_, column, std::nullopt});
        return std::nullopt;
    }
    std::optional<Identifier> fail_id(std::size_t column, std::string message) {
        fail(column, std::move(message));
        return std::nullopt;
    }

    std::string_view line_;
    std::size_t lineno_;
    const ParseOptions& opts_;
    std::vector<Diagnostic>& diags_;
    std::vector<Token> tokens_;
};

bool parse_timestamp(std::string_view s, Timestamp& out, std::string& why) {
    s = trim(s);
    if (s.empty()) {
        why = "missing timestamp";
        return false;
    }
    if (s.front() == '-') {
        why = "negative timestamp";
        return false;
    }
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc::result_out_of_range) {
        why = "timestamp out of range";
        return false;
    }
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        why = "non-integer timestamp '" + std::string(s) + "'";
        return false;
    }
    return true;
}

void check_name(std::string_view name, std::size_t lineno, std::vector<Diagnostic>& diags) {
    if (name.empty()) {
        diags.push_back({Severity::Error, "empty identifier", lineno, 1, std::nullopt});
    } else if (!Identifier::is_valid(name)) {
        diags.push_back({Severity::Error, "invalid identifier '" + std::string(name) + "'", lineno, 1,
                         std::nullopt});
    } else if (name.starts_with(kReservedPrefix)) {
        diags.push_back({Severity::Error,
                         "identifier '" + std::string(name) + "' uses the reserved prefix " +
                             std::string(kReservedPrefix),
                         lineno, 1, std::nullopt});
    }
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorKind::Parse, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool is_keyword(std::string_view token) noexcept {
    return std::find(kKeywords.begin(), kKeywords.end(), token) != kKeywords.end();
}

ParsedSpec parse_spec(std::string_view text, const ParseOptions& options) {
    ParsedSpec out;
    std::vector<Diagnostic> errors;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string_view body = trim(lines[n]);
        if (body.empty() || body.front() == '#') continue;
        LineParser parser(lines[n], n + 1, options, errors);
        auto rule = parser.parse();
        if (!rule) continue;
        const auto& rules = out.spec.rules();
        auto dup = std::find(rules.begin(), rules.end(), *rule);
        if (dup != rules.end()) {
            out.warnings.push_back({Severity::Warning,
                                    "duplicate of rule " + std::to_string(dup - rules.begin() + 1) +
                                        " '" + to_string(*rule) + "'",
                                    n + 1, 1, out.spec.size()});
        }
        out.spec.add(std::move(*rule));
        out.lines.push_back(n + 1);
    }
    if (!errors.empty()) throw ParseError(std::move(errors));
    return out;
}

std::string render_spec(const Specification& spec) {
    std::string out;
    for (const auto& r : spec) {
        out += to_string(r);
        out += '\n';
    }
    return out;
}

Trace parse_trace(std::string_view text, TraceFormat format) {
    std::vector<Event> events;
    std::vector<Diagnostic> errors;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::size_t lineno = n + 1;
        const std::string_view line = trim(lines[n]);
        if (line.empty()) continue;
        const std::size_t before = errors.size();
        std::string name;
        Timestamp ts = 0;

        if (format == TraceFormat::Csv) {
            const auto comma = line.find(',');
            if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
                errors.push_back({Severity::Error, "expected 'identifier,timestamp'", lineno, 1, std::nullopt});
                continue;
            }
            name = std::string(trim(line.substr(0, comma)));
            check_name(name, lineno, errors);
            std::string why;
            if (!parse_timestamp(line.substr(comma + 1), ts, why)) {
                errors.push_back({Severity::Error, why, lineno, comma + 2, std::nullopt});
            }
        } else {
            nlohmann::json obj = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
            if (obj.is_discarded() || !obj.is_object()) {
                errors.push_back({Severity::Error, "expected a JSON object", lineno, 1, std::nullopt});
                continue;
            }
            const auto jn = obj.find("name");
            const auto jt = obj.find("ts");
            if (jn == obj.end() || !jn->is_string()) {
                errors.push_back({Severity::Error, "missing string field 'name'", lineno, 1, std::nullopt});
            } else {
                name = jn->get<std::string>();
                check_name(name, lineno, errors);
            }
            if (jt == obj.end()) {
                errors.push_back({Severity::Error, "missing field 'ts'", lineno, 1, std::nullopt});
            } else if (jt->is_number_unsigned()) {
                ts = jt->get<Timestamp>();
            } else if (jt->is_number_integer()) {
                errors.push_back({Severity::Error, "negative timestamp", lineno, 1, std::nullopt});
            } else if (jt->is_number_float()) {
                const double v = jt->get<double>();
                errors.push_back({Severity::Error, v < 0 ? "negative timestamp" : "non-integer timestamp",
                                  lineno, 1, std::nullopt});
            } else {
                errors.push_back({Severity::Error, "non-integer timestamp", lineno, 1, std::nullopt});
            }
        }
        if (errors.size() == before) events.push_back(Event{Identifier(name), ts});
    }
    if (!errors.empty()) throw ParseError(std::move(errors));
    return Trace::from_unsorted(std::move(events));
}

std::string render_trace_csv(const Trace& t) {
    std::string out;
    for (const auto& e : t) {
        out += e.id.str();
        out += ',';
        out += std::to_string(e.ts);
        out += '\n';
    }
    return out;
}

std::vector<Diagnostic> validate_spec(const Specification& spec, const IdentifierSet& inputs,
                                      const ValidateOptions& options) {
    std::vector<Diagnostic> out;
    auto locate = [&](std::size_t rule, Severity sev, std::string msg) {
        Diagnostic d{sev, std::move(msg), 0, 0, rule};
        if (rule < options.lines.size()) d.line = options.lines[rule];
        out.push_back(std::move(d));
    };

    for (std::size_t r : exclusive_rules_in_cycles(spec)) {
        locate(r, Severity::Error, "exclusive rule in cycle: '" + to_string(spec[r]) + "'");
    }

    const IdentifierSet produced = spec.produced_identifiers();
    for (std::size_t r = 0; r < spec.size(); ++r) {
        std::set<Identifier> dead;
        for (const auto& id : {spec[r].rhs1, spec[r].rhs2}) {
            if (!inputs.contains(id) && !produced.contains(id)) dead.insert(id);
        }
        for (const auto& id : dead) {
            locate(r, Severity::Warning,
                   id.str() + " not producible: not an input and no rule produces it (rule '" +
                       to_string(spec[r]) + "' can never fire)");
        }
    }

    if (options.rhs_only_warnings) {
        IdentifierSet reported;
        for (std::size_t r = 0; r < spec.size(); ++r) {
            for (const auto& id : {spec[r].rhs1, spec[r].rhs2}) {
                if (produced.contains(id) || !reported.insert(id).second) continue;
                locate(r, Severity::Warning,
                       id.str() + " only appears on a right-hand side; it must come from the trace");
            }
        }
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace nfer
