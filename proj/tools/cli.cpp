#include "cli.hpp"

#include "oracleforge/ast_json.hpp"
#include "oracleforge/candidates.hpp"
#include "oracleforge/datasets.hpp"
#include "oracleforge/evalharness.hpp"
#include "oracleforge/oracles.hpp"
#include "oracleforge/parallel.hpp"
#include "oracleforge/ranking.hpp"
#include "oracleforge/testlang.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace oracleforge::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kBatch = 512;

struct Fatal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    bool strict = false;
    std::size_t k = 8;
    double threshold = 0.5;
    double exception_cutoff = 0.5;
    std::string scorer = "heuristic";
    bool fallback_heuristic = false;
    int timeout_ms = 10000;
    unsigned max_in_flight = 16;
};

// Input and output paths; "-" is the caller's stream.
class Io {
public:
    Io(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

    std::istream& input(const std::string& path)
    {
        if (path == "-") {
            return in_;
        }
        auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*f) {
            throw Fatal("cannot read '" + path + "'");
        }
        inputs_.push_back(std::move(f));
        return *inputs_.back();
    }

    std::ostream& output(const std::string& path)
    {
        if (path == "-") {
            return out_;
        }
        auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*f) {
            throw Fatal("cannot write '" + path + "'");
        }
        outputs_.push_back(std::move(f));
        return *outputs_.back();
    }

    void close()
    {
        for (auto& f : outputs_) {
            f->flush();
            if (!*f) {
                throw Fatal("write failed");
            }
        }
        outputs_.clear();
    }

private:
    std::istream& in_;
    std::ostream& out_;
    std::vector<std::unique_ptr<std::ifstream>> inputs_;
    std::vector<std::unique_ptr<std::ofstream>> outputs_;
};

std::string one_line(std::string s)
{
    for (auto& c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    while (!s.empty() && s.back() == ' ') {
        s.pop_back();
    }
    return s;
}

json error_object(std::size_t index, const std::string& reason, const std::string& message)
{
    return json{{"index", index}, {"error", {{"reason", reason}, {"message", one_line(message)}}}};
}

candidates::GlobalConstantTable load_vocab(Io& io, const std::string& path)
{
    try {
        return candidates::read_vocab(io.input(path));
    } catch (const candidates::VocabFormatError& e) {
        throw Fatal("bad vocabulary '" + path + "': " + e.what());
    }
}

ranking::RankerConfig ranker_config(const Globals& g)
{
    ranking::RankerConfig cfg;
    cfg.threshold = g.threshold;
    cfg.k = g.k;
    cfg.exception_cutoff = g.exception_cutoff;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
    return cfg;
}

std::unique_ptr<ranking::Scorer> scorer_from(const Globals& g)
{
    ranking::ScorerSpec spec;
    try {
        spec = ranking::parse_scorer_spec(g.scorer);
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
    spec.fallback_heuristic = g.fallback_heuristic;
    spec.seed = g.seed;
    spec.external.timeout_ms = g.timeout_ms;
    spec.external.max_in_flight = g.max_in_flight;
    return ranking::make_scorer(spec);
}

void write_report(Io& io, const std::string& path, const json& report, std::ostream& err)
{
    if (path.empty()) {
        err << report.dump() << "\n";
        return;
    }
    io.output(path) << report.dump(2) << "\n";
}

// Per-record failures are written as error objects; --strict stops at the
// first one.
struct RecordOutcome {
    json line;
    bool failed = false;
};

int emit_records(std::istream& in, std::ostream& out, const Globals& g, std::ostream& err,
                 const std::function<RecordOutcome(const std::string&, std::size_t)>& fn)
{
    std::size_t failures = 0;
    bool stopped = false;
    datasets::for_each_batch(in, kBatch, [&](const std::vector<std::string>& lines, std::size_t first) {
        if (stopped) {
            return;
        }
        auto results = parallel_map(lines, g.jobs,
                                    [&](const std::string& line, std::size_t i) { return fn(line, first + i); });
        for (const auto& r : results) {
            if (r.failed) {
                ++failures;
                if (g.strict) {
                    err << "oracle-forge: error: record " << r.line.value("index", std::size_t{0}) << ": "
                        << r.line["error"].value("message", "") << "\n";
                    stopped = true;
                    return;
                }
            }
            out << r.line.dump() << "\n";
        }
    });
    if (failures > 0 && !g.strict) {
        err << "oracle-forge: " << failures << " record(s) failed\n";
    }
    return stopped ? 1 : 0;
}

int cmd_parse(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path, std::ostream& err)
{
    auto& in = io.input(in_path);
    auto& out = io.output(out_path);
    return emit_records(in, out, g, err, [](const std::string& line, std::size_t index) {
        try {
            auto raw = datasets::parse_raw_sample(line);
            auto test = testlang::parse_test_method(raw.test);
            json j{{"index", index}, {"test", to_json(test)}};
            if (!raw.focal_method.empty()) {
                j["context"] = to_json(datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name));
            }
            return RecordOutcome{std::move(j), false};
        } catch (const datasets::RecordError& e) {
            return RecordOutcome{error_object(index, e.reason(), e.what()), true};
        } catch (const testlang::ParseError& e) {
            return RecordOutcome{error_object(index, "parse-error", e.what()), true};
        }
    });
}

int cmd_infer(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path,
              const std::string& vocab_path, std::ostream& err)
{
    auto cfg = ranker_config(g);
    auto table = vocab_path.empty() ? candidates::GlobalConstantTable(g.k, {}) : load_vocab(io, vocab_path);
    auto scorer = scorer_from(g);
    auto& in = io.input(in_path);
    auto& out = io.output(out_path);
    return emit_records(in, out, g, err, [&](const std::string& line, std::size_t index) {
        try {
            auto raw = datasets::parse_raw_sample(line);
            auto test = testlang::parse_test_method(raw.test);
            auto ctx = datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name);
            auto prefix = oracles::strip_oracles(test).prefix;
            auto result = ranking::infer_oracle(prefix, ctx, cfg, *scorer, table);
            auto rendered = ranking::render_inferred(prefix, result, test.name);
            return RecordOutcome{json{{"index", index},
                                      {"test_name", test.name},
                                      {"result", ranking::to_json(result)},
                                      {"test", testlang::render_test_method(rendered)}},
                                 false};
        } catch (const datasets::RecordError& e) {
            return RecordOutcome{error_object(index, e.reason(), e.what()), true};
        } catch (const testlang::ParseError& e) {
            return RecordOutcome{error_object(index, "parse-error", e.what()), true};
        }
    });
}

int cmd_dataset(Io& io, const Globals& g, const std::string& kind, const std::string& in_path,
                const std::string& out_path, const std::string& vocab_path, bool keep_oov,
                const std::string& report_path, std::ostream& err)
{
    datasets::BuildOptions opts;
    opts.jobs = g.jobs;
    opts.keep_oov = keep_oov;
    datasets::BuildReport report;
    if (kind == "exceptions") {
        auto& in = io.input(in_path);
        report = datasets::build_exception_dataset(in, io.output(out_path), opts);
    } else {
        if (vocab_path.empty()) {
            throw Usage("dataset assertions needs --vocab");
        }
        auto table = load_vocab(io, vocab_path);
        auto& in = io.input(in_path);
        report = datasets::build_assertion_dataset(in, io.output(out_path), table, opts);
    }
    write_report(io, report_path, report.to_json(), err);
    if (g.strict) {
        for (const char* reason : {"bad-json", "bad-record"}) {
            if (auto it = report.dropped.find(reason); it != report.dropped.end() && it->second > 0) {
                err << "oracle-forge: error: " << it->second << " malformed record(s)\n";
                return 1;
            }
        }
    }
    return 0;
}

int cmd_vocab(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path,
              const std::string& report_path, std::ostream& err)
{
    datasets::BuildOptions opts;
    opts.jobs = g.jobs;
    datasets::BuildReport report;
    auto table = datasets::build_vocab(io.input(in_path), g.k, opts, &report);
    candidates::write_vocab(io.output(out_path), table);
    write_report(io, report_path, report.to_json(), err);
    return 0;
}

int cmd_eval(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path, bool table,
             std::ostream& err)
{
    evalharness::MetricsReport m;
    std::size_t errors = 0;
    std::size_t index = 0;
    std::string line;
    auto& in = io.input(in_path);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        try {
            m.add(evalharness::parse_execution_record(line));
        } catch (const evalharness::BadRecord& e) {
            ++errors;
            err << "oracle-forge: record " << index << ": " << one_line(e.what()) << "\n";
            if (g.strict) {
                return 1;
            }
        }
        ++index;
    }
    m.finish();
    auto& out = io.output(out_path);
    if (table) {
        out << m.to_table();
    } else {
        auto j = m.to_json();
        j["errors"] = errors;
        out << j.dump() << "\n";
    }
    return 0;
}

// A line is either an assertion statement or a JSON object with an
// "assertion" field.
std::string coverage_text(const std::string& line)
{
    auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '{') {
        auto j = json::parse(line, nullptr, false);
        if (j.is_object() && j.contains("assertion") && j["assertion"].is_string()) {
            return j["assertion"].get<std::string>();
        }
    }
    return line;
}

int cmd_coverage(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path, bool table)
{
    evalharness::CoverageReport total;
    datasets::for_each_batch(io.input(in_path), 4096, [&](const std::vector<std::string>& lines, std::size_t) {
        auto parts = parallel_map(lines, g.jobs, [](const std::string& line, std::size_t) {
            evalharness::CoverageReport r;
            r.add_text(coverage_text(line));
            return r;
        });
        for (const auto& p : parts) {
            total.merge(p);
        }
    });
    auto& out = io.output(out_path);
    if (table) {
        out << total.to_table();
    } else {
        out << total.to_json().dump() << "\n";
    }
    return 0;
}

std::vector<std::size_t> parse_ks(const std::string& text)
{
    std::vector<std::size_t> ks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || v < 0) {
                throw std::invalid_argument(item);
            }
            ks.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw Usage("--ks expects comma-separated non-negative integers, got '" + text + "'");
        }
    }
    if (ks.empty()) {
        throw Usage("--ks is empty");
    }
    return ks;
}

int cmd_ablate(Io& io, const Globals& g, const std::string& in_path, const std::string& out_path,
               const std::string& vocab_path, const std::string& ks_text, bool table)
{
    auto ks = parse_ks(ks_text);
    auto scorer = scorer_from(g);
    std::optional<candidates::GlobalConstantTable> vocab;
    if (!vocab_path.empty()) {
        vocab = load_vocab(io, vocab_path);
    }
    auto corpus = evalharness::load_ablation_corpus(io.input(in_path), g.jobs);
    auto rows = evalharness::k_ablation(corpus, ks, *scorer, g.k, vocab ? &*vocab : nullptr, g.jobs);
    auto& out = io.output(out_path);
    if (table) {
        out << evalharness::ablation_table(rows);
    } else {
        out << json{{"records", corpus.records}, {"dropped", corpus.dropped}, {"rows", evalharness::ablation_json(rows)}}
                   .dump()
            << "\n";
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Test oracle generation over JSONL corpora", "oracle-forge"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Globals g;
    app.add_option("--jobs,-j", g.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", g.seed, "scorer seed");
    app.add_flag("--strict", g.strict, "per-record errors are fatal");
    app.add_option("--k", g.k, "global constants kept per type");
    app.add_option("--threshold", g.threshold, "assertion confidence threshold")->check(CLI::Range(0.0, 1.0));
    app.add_option("--exception-cutoff,--exception_cutoff", g.exception_cutoff, "exception score cutoff")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--scorer", g.scorer, "heuristic | exec:<cmd> | tcp:<host>:<port> | http://<host>:<port>");
    app.add_flag("--fallback-heuristic,--fallback_heuristic", g.fallback_heuristic,
                 "use the heuristic when the external scorer fails");
    app.add_option("--timeout-ms,--timeout_ms", g.timeout_ms, "external scorer response timeout")
        ->check(CLI::Range(1, 3600000));
    app.add_option("--max-in-flight,--max_in_flight", g.max_in_flight, "outstanding external requests")
        ->check(CLI::Range(1u, 4096u));

    std::string in_path = "-";
    std::string out_path = "-";
    std::string vocab_path;
    std::string report_path;
    std::string format = "json";
    std::string kind;
    std::string ks = "0,1,2,4,8,16";
    bool keep_oov = false;

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("-i,--input", in_path, "input path, - for stdin");
        sub->add_option("-o,--output", out_path, "output path, - for stdout");
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
    };

    auto* parse = app.add_subcommand("parse", "parse tests and focal methods to JSON ASTs");
    add_io(parse);

    auto* dataset = app.add_subcommand("dataset", "build an exception or assertion dataset");
    dataset->add_option("kind", kind, "exceptions or assertions")
        ->required()
        ->check(CLI::IsMember({"exceptions", "assertions"}));
    add_io(dataset);
    dataset->add_option("--vocab", vocab_path, "global constant vocabulary (assertions)");
    dataset->add_flag("--keep-oov", keep_oov, "also emit groups whose truth is not a candidate");
    dataset->add_option("--report", report_path, "write the build report here instead of stderr");

    auto* vocab = app.add_subcommand("vocab", "count assertion constants into a vocabulary");
    add_io(vocab);
    vocab->add_option("--report", report_path, "write the build report here instead of stderr");

    auto* infer = app.add_subcommand("infer", "infer an oracle for every test prefix");
    add_io(infer);
    infer->add_option("--vocab", vocab_path, "global constant vocabulary");

    auto* eval = app.add_subcommand("eval", "TP/FP/TN/FN and FPR over execution records");
    add_io(eval);
    add_format(eval);

    auto* coverage = app.add_subcommand("coverage", "fraction of assertions inside the oracle grammar");
    add_io(coverage);
    add_format(coverage);

    auto* ablate = app.add_subcommand("ablate", "in-vocab and top-1 accuracy over global table sizes");
    add_io(ablate);
    ablate->add_option("--vocab", vocab_path, "vocabulary to truncate instead of the corpus' own constants");
    ablate->add_option("--ks", ks, "comma-separated table sizes");
    add_format(ablate);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "oracle-forge: error: " << one_line(e.what()) << "\n";
        return 2;
    }

    Io io(in, out);
    try {
        int rc = 0;
        bool table = format == "table";
        if (parse->parsed()) {
            rc = cmd_parse(io, g, in_path, out_path, err);
        } else if (dataset->parsed()) {
            rc = cmd_dataset(io, g, kind, in_path, out_path, vocab_path, keep_oov, report_path, err);
        } else if (vocab->parsed()) {
            rc = cmd_vocab(io, g, in_path, out_path, report_path, err);
        } else if (infer->parsed()) {
            rc = cmd_infer(io, g, in_path, out_path, vocab_path, err);
        } else if (eval->parsed()) {
            rc = cmd_eval(io, g, in_path, out_path, table, err);
        } else if (coverage->parsed()) {
            rc = cmd_coverage(io, g, in_path, out_path, table);
        } else if (ablate->parsed()) {
            rc = cmd_ablate(io, g, in_path, out_path, vocab_path, ks, table);
        }
        io.close();
        out.flush();
        return rc;
    } catch (const Usage& e) {
        err << "oracle-forge: error: " << one_line(e.what()) << "\n";
        return 2;
    } catch (const ranking::ScorerUnavailable& e) {
        err << "oracle-forge: error: ScorerUnavailable: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const ranking::ProtocolError& e) {
        err << "oracle-forge: error: ProtocolError: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const ranking::ScorerError& e) {
        err << "oracle-forge: error: ScorerError: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "oracle-forge: error: " << one_line(e.what()) << "\n";
        return 1;
    }
}

} // namespace oracleforge::cli
