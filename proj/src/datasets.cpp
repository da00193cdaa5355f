#include "oracleforge/datasets.hpp"

#include "oracleforge/parallel.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace oracleforge::datasets {

using nlohmann::json;

namespace {

std::string context_text(const UnitContext& c)
{
    return c.class_name + "\n" + c.signature + "\n" + c.docstring;
}

std::string make_group_id(const TestPrefix& prefix, const UnitContext& ctx, std::size_t index, std::size_t ordinal)
{
    std::string key = testlang::render_statements(prefix.statements, 0);
    key += '\x1f';
    key += context_text(ctx);
    key += '\x1f';
    key += std::to_string(index);
    key += '\x1f';
    key += std::to_string(ordinal);
    return hex64(fnv1a64(key));
}

// Leading /** ... */ block, if the source starts with one.
std::string leading_javadoc(std::string_view src)
{
    auto begin = src.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos || src.substr(begin, 3) != "/**") {
        return {};
    }
    auto end = src.find("*/", begin + 3);
    if (end == std::string_view::npos) {
        return {};
    }
    return std::string(src.substr(begin, end + 2 - begin));
}

std::string string_field(const json& j, const char* key, bool required)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) {
            throw RecordError("bad-record", std::string("missing field '") + key + "'");
        }
        return {};
    }
    if (!it->is_string()) {
        throw RecordError("bad-record", std::string("field '") + key + "' is not a string");
    }
    return it->get<std::string>();
}

struct Parsed {
    testlang::TestMethod test;
    UnitContext context;
};

// Throws RecordError on unparsable test or focal method.
Parsed parse_record(const RawSample& r)
{
    Parsed p;
    try {
        p.test = testlang::parse_test_method(r.test);
    } catch (const testlang::ParseError& e) {
        throw RecordError("test-parse-error", e.what());
    }
    try {
        p.context = strip_implementation(r.focal_method, r.docstring, r.class_name);
    } catch (const testlang::ParseError& e) {
        throw RecordError("focal-parse-error", e.what());
    }
    return p;
}

} // namespace

RecordError::RecordError(std::string reason, const std::string& message)
    : std::runtime_error(message), reason_(std::move(reason))
{
}

RawSample parse_raw_sample(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw RecordError("bad-json", e.what());
    }
    if (!j.is_object()) {
        throw RecordError("bad-record", "record is not a JSON object");
    }
    RawSample r;
    r.focal_method = string_field(j, "focal_method", true);
    r.test = string_field(j, "test", true);
    r.docstring = string_field(j, "docstring", false);
    r.class_name = string_field(j, "class_name", false);
    if (j.contains("project") && !j["project"].is_null()) {
        r.project = string_field(j, "project", true);
    }
    return r;
}

UnitContext strip_implementation(std::string_view focal_source, std::string_view docstring, std::string class_name)
{
    UnitContext ctx = testlang::parse_signature(focal_source);
    ctx.class_name = std::move(class_name);
    ctx.docstring = docstring.empty() ? leading_javadoc(focal_source) : std::string(docstring);
    ctx.implementation_present = false;
    return ctx;
}

std::string_view to_string(Split s)
{
    switch (s) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
    }
    return "train";
}

Split assign_split(const RawSample& r)
{
    const auto bucket = fnv1a64(r.project ? *r.project : r.test) % 100;
    if (bucket < 90) {
        return Split::Train;
    }
    return bucket < 95 ? Split::Valid : Split::Test;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::size_t BuildReport::dropped_total() const
{
    std::size_t n = 0;
    for (const auto& [reason, count] : dropped) {
        n += count;
    }
    return n;
}

json BuildReport::to_json() const
{
    json j;
    j["input"] = input;
    j["kept"] = kept;
    j["dropped"] = json::object();
    for (const auto& [reason, count] : dropped) {
        j["dropped"][reason] = count;
    }
    j["labels"] = json::object();
    for (const auto& [label, count] : labels) {
        j["labels"][label] = count;
    }
    j["oov"] = oov;
    if (!oracles.empty()) {
        j["oracles"] = oracles;
    }
    return j;
}

ExceptionRecordResult exception_record(const RawSample& r, std::size_t index)
{
    ExceptionRecordResult result;
    Parsed p;
    try {
        p = parse_record(r);
    } catch (const RecordError& e) {
        result.drop_reason = e.reason();
        return result;
    }
    auto stripped = oracles::strip_oracles(p.test);
    if (stripped.prefix.empty()) {
        result.drop_reason = "empty-prefix";
        return result;
    }
    ExceptionSample s;
    s.label = stripped.kind == oracles::StripKind::ExpectedException ? 1 : 0;
    s.test_name = "test" + std::to_string(index);
    s.group_id = make_group_id(stripped.prefix, p.context, index, 0);
    s.split = assign_split(r);
    s.prefix = std::move(stripped.prefix);
    s.context = std::move(p.context);
    result.sample = std::move(s);
    return result;
}

AssertionRecordResult assertion_record(const RawSample& r, std::size_t index, const GlobalConstantTable& g,
                                       std::size_t k, bool keep_oov)
{
    AssertionRecordResult result;
    Parsed p;
    try {
        p = parse_record(r);
    } catch (const RecordError& e) {
        result.drop_reason = e.reason();
        return result;
    }
    auto stripped = oracles::strip_oracles(p.test);
    if (stripped.kind == oracles::StripKind::ExpectedException) {
        result.drop_reason = "exception-oracle";
        return result;
    }
    if (stripped.kind == oracles::StripKind::NoOracle) {
        result.drop_reason = "no-oracle";
        return result;
    }
    result.in_grammar = stripped.oracles.size();
    result.out_of_grammar = stripped.rejected.size();
    const auto split = assign_split(r);
    const auto name = "test" + std::to_string(index);

    for (std::size_t ordinal = 0; ordinal < stripped.per_oracle_prefixes.size(); ++ordinal) {
        const auto& po = stripped.per_oracle_prefixes[ordinal];
        const auto& truth = std::get<AssertionForm>(po.oracle.kind);
        candidates::CandidateSet cs;
        try {
            cs = candidates::create_candidate_templates(g, k, po.prefix);
        } catch (const candidates::NoAssignment&) {
            ++result.no_assignment;
            continue;
        }
        if (cs.empty()) {
            ++result.no_candidates;
            continue;
        }
        AssertionGroup group;
        group.in_vocab = cs.contains(truth);
        if (!group.in_vocab) {
            ++result.out_of_vocab;
            if (!keep_oov) {
                continue;
            }
        }
        const auto group_id = make_group_id(po.prefix, p.context, index, ordinal);
        for (const auto& c : cs.candidates) {
            AssertionSample s;
            s.prefix = po.prefix;
            s.context = p.context;
            s.candidate = c;
            s.label = c.form == truth ? 1 : 0;
            s.test_name = name;
            s.group_id = group_id;
            s.split = split;
            group.samples.push_back(std::move(s));
        }
        result.groups.push_back(std::move(group));
    }

    if (result.groups.empty()) {
        if (result.in_grammar == 0) {
            result.drop_reason = "out-of-grammar";
        } else if (result.out_of_vocab > 0) {
            result.drop_reason = "out-of-vocab";
        } else if (result.no_assignment > 0) {
            result.drop_reason = "no-assignment";
        } else {
            result.drop_reason = "no-candidates";
        }
    }
    return result;
}

json context_json(const UnitContext& c)
{
    return json{{"class_name", c.class_name}, {"signature", c.signature}, {"docstring", c.docstring}};
}

json to_json(const ExceptionSample& s)
{
    json j;
    j["prefix"] = testlang::render_test_method(oracles::prefix_test(s.prefix, s.test_name));
    j["context"] = context_json(s.context);
    j["label"] = s.label;
    j["group_id"] = s.group_id;
    j["split"] = to_string(s.split);
    return j;
}

json to_json(const AssertionSample& s)
{
    json j;
    j["prefix"] = testlang::render_test_method(oracles::prefix_test(s.prefix, s.test_name));
    j["context"] = context_json(s.context);
    j["candidate"] = oracles::render_assertion(s.candidate.form);
    j["label"] = s.label;
    j["group_id"] = s.group_id;
    j["split"] = to_string(s.split);
    return j;
}

void for_each_batch(std::istream& in, std::size_t batch,
                    const std::function<void(const std::vector<std::string>&, std::size_t)>& fn)
{
    std::vector<std::string> lines;
    std::size_t first = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        lines.push_back(std::move(line));
        if (lines.size() >= batch) {
            fn(lines, first);
            first += lines.size();
            lines.clear();
        }
    }
    if (!lines.empty()) {
        fn(lines, first);
    }
}

BuildReport build_exception_dataset(std::istream& in, std::ostream& out, const BuildOptions& opts)
{
    BuildReport report;
    report.labels = {{"0", 0}, {"1", 0}};
    for_each_batch(in, opts.batch, [&](const std::vector<std::string>& lines, std::size_t first) {
        auto results = parallel_map(lines, opts.jobs, [first](const std::string& line, std::size_t i) {
            ExceptionRecordResult res;
            try {
                res = exception_record(parse_raw_sample(line), first + i);
            } catch (const RecordError& e) {
                res.drop_reason = e.reason();
            }
            return res;
        });
        for (const auto& res : results) {
            ++report.input;
            if (!res.sample) {
                ++report.dropped[res.drop_reason];
                continue;
            }
            ++report.kept;
            ++report.labels[std::to_string(res.sample->label)];
            out << to_json(*res.sample).dump() << '\n';
        }
    });
    return report;
}

BuildReport build_assertion_dataset(std::istream& in, std::ostream& out, const GlobalConstantTable& g,
                                    const BuildOptions& opts)
{
    BuildReport report;
    report.labels = {{"0", 0}, {"1", 0}};
    report.oracles = {{"in-grammar", 0},   {"out-of-grammar", 0}, {"no-assignment", 0},
                      {"no-candidates", 0}, {"out-of-vocab", 0},   {"groups", 0}};
    const std::size_t k = g.k();
    for_each_batch(in, opts.batch, [&](const std::vector<std::string>& lines, std::size_t first) {
        auto results = parallel_map(lines, opts.jobs, [&, first](const std::string& line, std::size_t i) {
            AssertionRecordResult res;
            try {
                res = assertion_record(parse_raw_sample(line), first + i, g, k, opts.keep_oov);
            } catch (const RecordError& e) {
                res.drop_reason = e.reason();
            }
            return res;
        });
        for (const auto& res : results) {
            ++report.input;
            report.oracles["in-grammar"] += res.in_grammar;
            report.oracles["out-of-grammar"] += res.out_of_grammar;
            report.oracles["no-assignment"] += res.no_assignment;
            report.oracles["no-candidates"] += res.no_candidates;
            report.oracles["out-of-vocab"] += res.out_of_vocab;
            report.oov += res.out_of_vocab;
            if (res.groups.empty()) {
                ++report.dropped[res.drop_reason];
                continue;
            }
            ++report.kept;
            report.oracles["groups"] += res.groups.size();
            for (const auto& group : res.groups) {
                for (const auto& s : group.samples) {
                    ++report.labels[std::to_string(s.label)];
                    out << to_json(s).dump() << '\n';
                }
            }
        }
    });
    return report;
}

GlobalConstantTable build_vocab(std::istream& in, std::size_t k, const BuildOptions& opts, BuildReport* report)
{
    candidates::GlobalConstantCounter total;
    BuildReport local;
    for_each_batch(in, opts.batch, [&](const std::vector<std::string>& lines, std::size_t) {
        struct Counted {
            candidates::GlobalConstantCounter counter;
            std::string drop_reason;
        };
        auto results = parallel_map(lines, opts.jobs, [](const std::string& line, std::size_t) {
            Counted c;
            try {
                auto raw = parse_raw_sample(line);
                auto test = testlang::parse_test_method(raw.test);
                for (const auto& o : oracles::strip_oracles(test).oracles) {
                    if (const auto* form = std::get_if<AssertionForm>(&o.kind)) {
                        c.counter.add(*form);
                    }
                }
            } catch (const RecordError& e) {
                c.drop_reason = e.reason();
            } catch (const testlang::ParseError&) {
                c.drop_reason = "test-parse-error";
            }
            return c;
        });
        for (const auto& c : results) {
            ++local.input;
            if (!c.drop_reason.empty()) {
                ++local.dropped[c.drop_reason];
                continue;
            }
            ++local.kept;
            total.merge(c.counter);
        }
    });
    if (report != nullptr) {
        *report = local;
    }
    return total.finish(k);
}

} // namespace oracleforge::datasets
