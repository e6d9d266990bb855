#include "cli.hpp"

#include "nfer/analysis.hpp"
#include "nfer/cfgsim.hpp"
#include "nfer/mfo.hpp"
#include "nfer/parser.hpp"
#include "nfer/semantics.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nfer::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Options {
    std::string spec;
    std::string trace;
    std::string word;
    std::string target;
    std::string inputs;
    std::vector<std::string> grammars;
    bool bounded = false;
    std::size_t max_events = SearchBounds{}.max_events;
    Timestamp max_ts = SearchBounds{}.max_ts;
    std::size_t budget = SearchBounds{}.budget;
    bool json = false;
    bool explain = false;
    bool oracle = false;
    bool allow_reserved = false;
    std::string out;
};

// Errors that should end the run with kFailure and a plain message.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
    auto log = std::make_shared<spdlog::logger>("nfer-df", sink);
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* level = std::getenv("NFER_DF_LOG")) log->set_level(spdlog::level::from_str(level));
    return log;
}

class Command {
public:
    Command(const Options& o, std::ostream& out, std::ostream& err, spdlog::logger& log)
        : o_(o), out_(out), err_(err), log_(log) {}

    int eval();
    int sat();
    int cfg_compile();
    int cfg_check();
    int graph();
    int mfo();

    /// Writes buffered primary output to --out or stdout.
    void flush() {
        if (o_.out.empty()) {
            out_ << buf_.str();
            return;
        }
        std::ofstream file(o_.out, std::ios::binary);
        if (!file) throw UsageError("cannot write '" + o_.out + "'");
        file << buf_.str();
    }

private:
    ParsedSpec load_spec() {
        if (o_.spec.empty()) throw UsageError("a specification is required (--spec)");
        ParsedSpec ps = parse_spec(read_file(o_.spec), ParseOptions{o_.allow_reserved});
        for (const Diagnostic& d : ps.warnings) err_ << o_.spec << ":" << d.to_string() << "\n";
        log_.info("parsed {} rules from {}", ps.spec.size(), o_.spec);
        return ps;
    }

    Trace load_trace(const std::string& path) {
        const std::string text = read_file(path);
        const auto first = text.find_first_not_of(" \t\r\n");
        const bool jsonl = path.ends_with(".jsonl") || path.ends_with(".ndjson") ||
                           (first != std::string::npos && text[first] == '{');
        Trace t = parse_trace(text, jsonl ? TraceFormat::JsonLines : TraceFormat::Csv);
        log_.info("read {} events from {}", t.size(), path);
        return t;
    }

    Identifier target() const {
        if (o_.target.empty()) throw UsageError("a target is required (--target)");
        return Identifier(o_.target);
    }

    IdentifierSet inputs() const {
        IdentifierSet out;
        std::string item;
        std::istringstream in(o_.inputs);
        while (std::getline(in, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            out.emplace(item.substr(b, item.find_last_not_of(" \t") - b + 1));
        }
        return out;
    }

    Grammar load_grammar(const std::string& path) {
        try {
            return parse_grammar(read_file(path));
        } catch (const ParseError& e) {
            for (const Diagnostic& d : e.diagnostics()) err_ << path << ":" << d.to_string() << "\n";
            throw UsageError("invalid grammar '" + path + "'");
        }
    }

    CompiledSpec compile_grammars() {
        if (o_.grammars.empty() || o_.grammars.size() > 2) throw UsageError("expected one or two grammar files");
        const Grammar g1 = load_grammar(o_.grammars[0]);
        if (o_.grammars.size() == 1) return compile_single(g1);
        const Grammar g2 = load_grammar(o_.grammars[1]);
        return compile_pair(g1, g2, Identifier(o_.target.empty() ? "T" : o_.target));
    }

    static ordered_json interval_json(const Interval& i) {
        return ordered_json{{"id", i.id().str()}, {"start", i.start()}, {"end", i.end()}};
    }

    static ordered_json trace_json(const Trace& t) {
        ordered_json arr = ordered_json::array();
        for (const Event& e : t) arr.push_back(ordered_json{{"id", e.id.str()}, {"ts", e.ts}});
        return arr;
    }

    static ordered_json set_json(const IdentifierSet& s) {
        ordered_json arr = ordered_json::array();
        for (const Identifier& id : s) arr.push_back(id.str());
        return arr;
    }

    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
    spdlog::logger& log_;
    std::ostringstream buf_;
};

int Command::eval() {
    const ParsedSpec ps = load_spec();
    if (o_.trace.empty()) throw UsageError("a trace is required (--trace)");
    const Trace t = load_trace(o_.trace);
    const std::optional<Identifier> goal = o_.target.empty() ? std::nullopt : std::optional(target());

    const auto started = std::chrono::steady_clock::now();
    const Pool result = Evaluator(ps.spec).evaluate(t);
    log_.info("{} intervals in {} us", result.size(),
              std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started)
                  .count());
    const bool found = goal && result.contains_id(*goal);

    if (o_.json) {
        ordered_json doc;
        doc["intervals"] = ordered_json::array();
        for (const Interval& i : result) doc["intervals"].push_back(interval_json(i));
        doc["found"] = goal ? ordered_json(found) : ordered_json(nullptr);
        buf_ << doc.dump() << "\n";
    } else {
        for (const Interval& i : result) buf_ << i << "\n";
    }
    if (!goal) return kFound;
    if (!o_.json) err_ << o_.target << (found ? ": found" : ": not found") << "\n";
    return found ? kFound : kNotFound;
}

int Command::sat() {
    const ParsedSpec ps = load_spec();
    if (o_.inputs.empty()) throw UsageError("an input alphabet is required (--inputs a,b,...)");
    const IdentifierSet ins = inputs();
    const Identifier goal = target();
    for (const Diagnostic& d : validate_spec(ps.spec, ins, ValidateOptions{false, ps.lines})) {
        if (d.severity == Severity::Warning) err_ << o_.spec << ":" << d.to_string() << "\n";
    }

    if (!ps.spec.inclusive_only()) {
        if (!o_.bounded) {
            throw UsageError("the specification has exclusive rules, so satisfiability is undecidable in general; "
                             "hint: pass --bounded to search small traces");
        }
        const SearchBounds bounds{o_.max_events, o_.max_ts, o_.budget};
        log_.info("bounded search: {} candidates", candidate_count(ins.size(), bounds));
        const auto witness = bounded_sat_search(ps.spec, ins, goal, bounds);
        if (o_.json) {
            ordered_json doc;
            doc["verdict"] = witness ? "SAT" : "UNKNOWN";
            doc["witness"] = witness ? trace_json(*witness) : ordered_json(nullptr);
            buf_ << doc.dump() << "\n";
        } else if (witness) {
            buf_ << "SAT\nwitness: " << *witness << "\n";
        } else {
            buf_ << "UNKNOWN\nno witness with at most " << o_.max_events << " events and timestamps up to "
                 << o_.max_ts << "\n";
        }
        return witness ? kFound : kUnknown;
    }

    const SatVerdict v = inclusive_sat(ps.spec, ins, goal);
    if (v.set_verdict != v.verdict) {
        log_.warn("the I+/I_Sigma procedure alone answers {}; duration analysis answers {}", to_string(v.set_verdict),
                  to_string(v.verdict));
    }
    if (o_.json) {
        ordered_json doc;
        doc["verdict"] = std::string(to_string(v.verdict));
        doc["witness"] = v.witness ? trace_json(*v.witness) : ordered_json(nullptr);
        if (o_.explain) {
            doc["positive_capable"] = set_json(v.positive_capable);
            doc["producible"] = set_json(v.producible);
            ordered_json caps = ordered_json::object();
            for (const auto& [id, c] : v.realizable) caps[id.str()] = {{"atomic", c.zero}, {"positive", c.positive}};
            doc["realizable"] = caps;
        }
        buf_ << doc.dump() << "\n";
    } else {
        buf_ << to_string(v.verdict) << "\n";
        if (v.witness) buf_ << "witness: " << *v.witness << "\n";
        if (o_.explain) {
            for (std::size_t k = 0; k < v.steps.size(); ++k) {
                const DurationStep& s = v.steps[k];
                buf_ << "step " << (k + 1) << ": " << to_string(ps.spec[s.rule]) << "  I+ = "
                     << to_string(s.positive_capable) << "  I_Sigma = " << to_string(s.producible) << "\n";
            }
            buf_ << "I+ = " << to_string(v.positive_capable) << "\n";
            buf_ << "I_Sigma = " << to_string(v.producible) << "\n";
            for (const auto& [id, c] : v.realizable) {
                buf_ << id << ":" << (c.zero ? " atomic" : "") << (c.positive ? " positive" : "") << "\n";
            }
        }
    }
    return v.verdict == Verdict::Sat ? kFound : kNotFound;
}

int Command::cfg_compile() {
    const CompiledSpec c = compile_grammars();
    buf_ << render_spec(c.spec);
    log_.info("compiled {} rules, target {}", c.spec.size(), c.target.str());
    return kFound;
}

int Command::cfg_check() {
    const CompiledSpec c = compile_grammars();
    std::vector<Grammar> grammars;
    for (const auto& path : o_.grammars) grammars.push_back(load_grammar(path));
    IdentifierSet sigma;
    for (const Grammar& g : grammars) sigma.insert(g.terminals().begin(), g.terminals().end());

    if (o_.word.empty() == o_.trace.empty()) throw UsageError("pass exactly one of --word or --trace");

    Trace t;
    Word checked;            // the word whose membership is decided
    std::optional<Span> expected;  // where the accepting interval must lie
    if (!o_.word.empty()) {
        checked = parse_word(o_.word);
        if (checked.empty()) throw Error(ErrorKind::EmptyWord, "the word is empty");
        Word extended = checked;
        extended.push_back(checked.back());  // ancillary letter
        t = trace_of_word(extended);
        expected = Span{0, checked.size()};
    } else {
        t = load_trace(o_.trace);
        std::map<Timestamp, std::size_t> counts;
        for (const Event& e : t) ++counts[e.ts];
        std::vector<Timestamp> uniq;
        for (const Event& e : t) {
            if (counts[e.ts] == 1) {
                uniq.push_back(e.ts);
                checked.push_back(e.id);
            }
        }
        if (uniq.size() >= 2) {
            checked.pop_back();
            expected = Span{uniq.front(), uniq.back()};
        } else {
            checked.clear();
        }
    }
    for (const Event& e : t) {
        if (!sigma.contains(e.id)) {
            throw Error(ErrorKind::TerminalNotInAlphabet, "letter '" + e.id.str() + "' is not a terminal");
        }
    }

    const Pool result = Evaluator(c.spec).evaluate(t);
    const std::vector<Interval> hits = result.with_id(c.target);
    const bool accepted =
        expected && std::any_of(hits.begin(), hits.end(), [&](const Interval& i) {
            return i.start() == expected->start && i.end() == expected->end;
        });

    std::optional<bool> oracle;
    if (o_.oracle) {
        oracle = !checked.empty() && std::all_of(grammars.begin(), grammars.end(),
                                                 [&](const Grammar& g) { return cyk_member(g, checked); });
    }

    if (o_.json) {
        ordered_json doc;
        doc["trace"] = trace_json(t);
        doc["intervals"] = ordered_json::array();
        for (const Interval& i : hits) doc["intervals"].push_back(interval_json(i));
        doc["accepted"] = accepted;
        doc["oracle"] = oracle ? ordered_json(*oracle) : ordered_json(nullptr);
        buf_ << doc.dump() << "\n";
    } else {
        buf_ << "trace: " << t << "\n";
        for (const Interval& i : hits) buf_ << i << "\n";
        buf_ << (accepted ? "accepted" : "rejected");
        if (expected) buf_ << " (" << c.target << "," << expected->start << "," << expected->end << ")";
        buf_ << "\n";
        if (oracle) buf_ << "oracle: " << (*oracle ? "member" : "not a member") << ", "
                         << (*oracle == accepted ? "agrees" : "DISAGREES") << "\n";
    }
    if (oracle && *oracle != accepted) {
        err_ << "error: simulation and CYK disagree on '" << render_word(checked) << "'\n";
        return kFailure;
    }
    return accepted ? kFound : kNotFound;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out;
}

int Command::graph() {
    const ParsedSpec ps = load_spec();
    const DependencyGraph g(ps.spec);
    buf_ << "digraph rules {\n";
    const auto comps = g.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const bool cyclic = comps[c].size() > 1 || g.has_self_loop(comps[c].front());
        buf_ << "  subgraph cluster_" << c << " {\n";
        buf_ << "    label=\"component " << (c + 1) << (cyclic ? " (cyclic)" : "") << "\";\n";
        for (std::size_t r : comps[c]) {
            buf_ << "    r" << r << " [label=\"" << dot_escape(to_string(ps.spec[r])) << "\"];\n";
        }
        buf_ << "  }\n";
    }
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (std::size_t s : g.successors(r)) buf_ << "  r" << r << " -> r" << s << ";\n";
    }
    buf_ << "}\n";
    return kFound;
}

int Command::mfo() {
    const ParsedSpec ps = load_spec();
    const std::optional<IdentifierSet> events = o_.inputs.empty() ? std::nullopt : std::optional(inputs());
    buf_ << mfo_emit(ps.spec, target(), events) << "\n";
    return kFound;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Evaluate and analyze data-free nfer specifications", "nfer-df"};
    app.require_subcommand(1);

    auto spec_opt = [&](CLI::App* sub) {
        sub->add_option("--spec,spec", o.spec, "Specification file")->check(CLI::ExistingFile);
        sub->add_flag("--allow-reserved", o.allow_reserved, "Accept generated __nfer_ identifiers");
    };

    auto* eval = app.add_subcommand("eval", "Evaluate a specification on a trace");
    spec_opt(eval);
    eval->add_option("--trace,trace", o.trace, "Trace file (CSV or JSON lines)")->check(CLI::ExistingFile);
    eval->add_option("--target", o.target, "Exit 0 iff an interval with this label is produced");
    eval->add_flag("--json", o.json, "JSON output");

    auto* sat = app.add_subcommand("sat", "Decide whether some trace produces the target");
    spec_opt(sat);
    sat->add_option("--inputs", o.inputs, "Input alphabet, comma separated");
    sat->add_option("--target", o.target, "Target identifier");
    sat->add_flag("--bounded", o.bounded, "Bounded search for specifications with exclusive rules");
    sat->add_option("--max-events", o.max_events, "Bounded search: events per trace")->check(CLI::PositiveNumber);
    sat->add_option("--max-ts", o.max_ts, "Bounded search: largest timestamp");
    sat->add_option("--budget", o.budget, "Bounded search: candidate limit")->check(CLI::PositiveNumber);
    sat->add_flag("--json", o.json, "JSON output");
    sat->add_flag("--explain", o.explain, "Show duration sets and per-identifier durations");

    auto* cfg = app.add_subcommand("cfg", "Compile context-free grammars into specifications");
    cfg->require_subcommand(1);
    auto* compile = cfg->add_subcommand("compile", "Print the specification simulating one or two grammars");
    compile->add_option("grammars", o.grammars, "One or two grammar files")->required()->check(CLI::ExistingFile);
    compile->add_option("--target", o.target, "Label for words of both grammars (default T)");
    compile->add_option("--out", o.out, "Write to a file instead of stdout");
    auto* check = cfg->add_subcommand("check", "Run the compiled specification on a word or trace");
    check->add_option("grammars", o.grammars, "One or two grammar files")->required()->check(CLI::ExistingFile);
    check->add_option("--word", o.word, "Word such as aab or 'x y z'; its last letter is appended");
    check->add_option("--trace", o.trace, "Trace file")->check(CLI::ExistingFile);
    check->add_option("--target", o.target, "Label for words of both grammars (default T)");
    check->add_flag("--oracle", o.oracle, "Cross-check with CYK");
    check->add_flag("--json", o.json, "JSON output");

    auto* graph = app.add_subcommand("graph", "Print the rule dependency graph as DOT");
    spec_opt(graph);
    graph->add_option("--out", o.out, "Write to a file instead of stdout");

    auto* mfo = app.add_subcommand("mfo", "Print the MFO formula of a cycle-free specification");
    spec_opt(mfo);
    mfo->add_option("--target", o.target, "Target identifier");
    mfo->add_option("--inputs", o.inputs, "Event identifiers (default: identifiers no rule produces)");
    mfo->add_option("--out", o.out, "Write to a file instead of stdout");

    std::vector<std::string> argv_store{"nfer-df"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kFound : kFailure;
    }

    auto log = make_logger(err);
    Command cmd(o, out, err, *log);
    try {
        int code = kFailure;
        if (eval->parsed()) code = cmd.eval();
        else if (sat->parsed()) code = cmd.sat();
        else if (compile->parsed()) code = cmd.cfg_compile();
        else if (check->parsed()) code = cmd.cfg_check();
        else if (graph->parsed()) code = cmd.graph();
        else if (mfo->parsed()) code = cmd.mfo();
        cmd.flush();
        return code;
    } catch (const ParseError& e) {
        for (const Diagnostic& d : e.diagnostics()) err << d.to_string() << "\n";
        return kFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace nfer::cli
