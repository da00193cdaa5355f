#include "oracleforge/evalharness.hpp"

#include "oracleforge/datasets.hpp"
#include "oracleforge/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <random>
#include <sstream>

namespace oracleforge::evalharness {

using nlohmann::json;

namespace {

// Left-aligns the first column and right-aligns the rest.
std::string align(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) {
            width.resize(r.size(), 0);
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
            width[i] = std::max(width[i], r[i].size());
        }
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::string pad(width[i] - r[i].size(), ' ');
            if (i == 0) {
                line += r[i] + pad;
            } else {
                line += "  " + pad + r[i];
            }
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line + "\n";
    }
    return out;
}

double ratio(std::size_t num, std::size_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

Outcome outcome_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw BadRecord(std::string("field '") + key + "' must be \"pass\" or \"fail\"");
    }
    auto v = it->get<std::string>();
    if (v == "pass") {
        return Outcome::Pass;
    }
    if (v == "fail") {
        return Outcome::Fail;
    }
    throw BadRecord(std::string("field '") + key + "' must be \"pass\" or \"fail\", got \"" + v + "\"");
}

std::string id_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) {
        throw BadRecord(std::string("missing field '") + key + "'");
    }
    if (it->is_string()) {
        return it->get<std::string>();
    }
    if (it->is_number_integer()) {
        return it->dump();
    }
    throw BadRecord(std::string("field '") + key + "' must be a string or integer");
}

std::optional<bool> bool_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_boolean()) {
        throw BadRecord(std::string("field '") + key + "' must be a boolean");
    }
    return it->get<bool>();
}

} // namespace

std::string fmt(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string_view to_string(Outcome o)
{
    return o == Outcome::Pass ? "pass" : "fail";
}

std::string_view to_string(OracleKind k)
{
    switch (k) {
    case OracleKind::ExceptionRaised: return "exception-raised";
    case OracleKind::ExceptionNotRaised: return "exception-not-raised";
    case OracleKind::Assertion: return "assertion";
    case OracleKind::PrefixOnly: return "prefix-only";
    }
    return "assertion";
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::TP: return "TP";
    case Verdict::FP: return "FP";
    case Verdict::TN: return "TN";
    case Verdict::FN: return "FN";
    }
    return "TN";
}

std::optional<OracleKind> oracle_kind_from_string(std::string_view s)
{
    for (auto k : {OracleKind::ExceptionRaised, OracleKind::ExceptionNotRaised, OracleKind::Assertion,
                   OracleKind::PrefixOnly}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

ExecutionRecord parse_execution_record(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw BadRecord(std::string("not JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw BadRecord("record is not a JSON object");
    }
    ExecutionRecord r;
    r.test_id = id_field(j, "test_id");
    r.bug_id = id_field(j, "bug_id");
    r.buggy = outcome_field(j, "buggy");
    r.fixed = outcome_field(j, "fixed");
    auto kind = j.find("oracle_kind");
    if (kind == j.end() || !kind->is_string()) {
        throw BadRecord("missing field 'oracle_kind'");
    }
    auto k = oracle_kind_from_string(kind->get<std::string>());
    if (!k) {
        throw BadRecord("unknown oracle_kind \"" + kind->get<std::string>() + "\"");
    }
    r.oracle_kind = *k;
    r.buggy_raised = bool_field(j, "buggy_raised");
    r.fixed_raised = bool_field(j, "fixed_raised");
    if (auto src = j.find("source"); src != j.end() && src->is_string()) {
        r.source = src->get<std::string>();
    }
    return r;
}

Verdict judge(Outcome buggy, Outcome fixed)
{
    if (buggy == Outcome::Fail) {
        return fixed == Outcome::Pass ? Verdict::TP : Verdict::FP;
    }
    return fixed == Outcome::Pass ? Verdict::TN : Verdict::FN;
}

Verdict judge(const ExecutionRecord& r)
{
    Outcome buggy = r.buggy;
    Outcome fixed = r.fixed;
    if (r.oracle_kind == OracleKind::PrefixOnly) {
        if (r.buggy_raised) {
            buggy = *r.buggy_raised ? Outcome::Fail : Outcome::Pass;
        }
        if (r.fixed_raised) {
            fixed = *r.fixed_raised ? Outcome::Fail : Outcome::Pass;
        }
    }
    return judge(buggy, fixed);
}

void MetricsReport::add(const ExecutionRecord& r)
{
    ++records;
    auto v = judge(r);
    ++counts[v];
    if (v == Verdict::TP) {
        bugs_found.insert(r.bug_id);
        bugs_by_kind[r.oracle_kind].insert(r.bug_id);
    }
}

void MetricsReport::merge(const MetricsReport& other)
{
    records += other.records;
    for (const auto& [v, n] : other.counts) {
        counts[v] += n;
    }
    bugs_found.insert(other.bugs_found.begin(), other.bugs_found.end());
    for (const auto& [k, bugs] : other.bugs_by_kind) {
        bugs_by_kind[k].insert(bugs.begin(), bugs.end());
    }
}

void MetricsReport::finish()
{
    fpr = ratio(counts[Verdict::FP], counts[Verdict::FP] + counts[Verdict::TN]);
}

json MetricsReport::to_json() const
{
    json j;
    j["records"] = records;
    j["counts"] = json::object();
    for (const auto& [v, n] : counts) {
        j["counts"][std::string(to_string(v))] = n;
    }
    j["fpr"] = fpr;
    j["bugs_found"] = bugs_found;
    j["bugs_found_count"] = bugs_found.size();
    j["bugs_by_oracle_kind"] = json::object();
    for (auto k : {OracleKind::ExceptionRaised, OracleKind::ExceptionNotRaised, OracleKind::Assertion,
                   OracleKind::PrefixOnly}) {
        auto it = bugs_by_kind.find(k);
        j["bugs_by_oracle_kind"][std::string(to_string(k))] = it == bugs_by_kind.end() ? 0 : it->second.size();
    }
    return j;
}

std::string MetricsReport::to_table() const
{
    std::vector<std::vector<std::string>> rows = {{"records", "TP", "FP", "TN", "FN", "FPR", "bugs found"}};
    rows.push_back({std::to_string(records), std::to_string(counts.at(Verdict::TP)),
                    std::to_string(counts.at(Verdict::FP)), std::to_string(counts.at(Verdict::TN)),
                    std::to_string(counts.at(Verdict::FN)), fmt(fpr), std::to_string(bugs_found.size())});
    std::string out = align(rows);
    std::vector<std::vector<std::string>> kinds = {{"oracle kind", "bugs found"}};
    for (auto k : {OracleKind::ExceptionRaised, OracleKind::ExceptionNotRaised, OracleKind::Assertion,
                   OracleKind::PrefixOnly}) {
        auto it = bugs_by_kind.find(k);
        kinds.push_back({std::string(to_string(k)), std::to_string(it == bugs_by_kind.end() ? 0 : it->second.size())});
    }
    return out + "\n" + align(kinds);
}

MetricsReport aggregate(const std::vector<ExecutionRecord>& records)
{
    MetricsReport m;
    for (const auto& r : records) {
        m.add(r);
    }
    m.finish();
    return m;
}

double CoverageReport::fraction() const
{
    return ratio(in_grammar, total - parse_failures);
}

void CoverageReport::add_call(const testlang::AssertCall& call)
{
    ++total;
    auto c = oracles::classify_assertion(call);
    if (std::holds_alternative<oracles::InGrammar>(c)) {
        ++in_grammar;
    } else {
        ++out_by_reason[std::string(oracles::to_string(std::get<oracles::OutOfGrammar>(c).reason))];
    }
}

void CoverageReport::add_text(std::string_view assertion)
{
    std::string text(assertion);
    auto last = text.find_last_not_of(" \t\r\n");
    if (last == std::string::npos) {
        add_parse_failure();
        return;
    }
    text.erase(last + 1);
    if (text.back() != ';') {
        text += ';';
    }
    try {
        auto s = testlang::parse_statement(text);
        if (const auto* a = s.as<testlang::AssertStmt>()) {
            add_call(a->call);
            return;
        }
        // e.g. helper.assertValid(x): an assert-named call we cannot classify
        if (const auto* e = s.as<testlang::ExprStmt>()) {
            if (const auto* m = e->expr.as<testlang::MethodCall>(); m != nullptr && m->method.rfind("assert", 0) == 0) {
                ++total;
                ++out_by_reason[std::string(oracles::to_string(oracles::OutOfGrammarReason::UnsupportedMethod))];
                return;
            }
        }
    } catch (const testlang::ParseError&) {
    }
    add_parse_failure();
}

void CoverageReport::merge(const CoverageReport& other)
{
    total += other.total;
    in_grammar += other.in_grammar;
    parse_failures += other.parse_failures;
    for (const auto& [r, n] : other.out_by_reason) {
        out_by_reason[r] += n;
    }
}

json CoverageReport::to_json() const
{
    json j;
    j["total"] = total;
    j["in_grammar"] = in_grammar;
    j["parse_failures"] = parse_failures;
    j["out_by_reason"] = json::object();
    for (const auto& [r, n] : out_by_reason) {
        j["out_by_reason"][r] = n;
    }
    j["fraction"] = fraction();
    return j;
}

std::string CoverageReport::to_table() const
{
    std::vector<std::vector<std::string>> rows = {{"assertions", "in grammar", "parse failures", "fraction"},
                                                  {std::to_string(total), std::to_string(in_grammar),
                                                   std::to_string(parse_failures), fmt(fraction())}};
    std::string out = align(rows);
    if (!out_by_reason.empty()) {
        std::vector<std::vector<std::string>> reasons = {{"out of grammar", "count"}};
        for (const auto& [r, n] : out_by_reason) {
            reasons.push_back({r, std::to_string(n)});
        }
        out += "\n" + align(reasons);
    }
    return out;
}

CoverageReport grammar_coverage(const std::vector<testlang::AssertCall>& calls)
{
    CoverageReport r;
    for (const auto& c : calls) {
        r.add_call(c);
    }
    return r;
}

std::string canonical_whitespace(std::string_view text)
{
    std::string out;
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '"' || c == '\'') {
            if (pending_space && !out.empty() && ident_char(out.back())) {
                // a literal never needs a separating space
            }
            pending_space = false;
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != c) {
                j += text[j] == '\\' ? 2 : 1;
            }
            j = std::min(j + 1, text.size());
            out.append(text.substr(i, j - i));
            i = j - 1;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty() && ident_char(out.back()) && ident_char(c)) {
            out += ' ';
        }
        pending_space = false;
        out += c;
    }
    return out;
}

MissingTruth::MissingTruth(const std::string& group_id)
    : std::runtime_error("no truth entry for group " + group_id), group_(group_id)
{
}

json LexicalReport::to_json() const
{
    return json{{"groups", groups},
                {"matched", matched},
                {"in_vocab_groups", in_vocab_groups},
                {"in_vocab_matched", in_vocab_matched},
                {"overall", overall},
                {"in_vocab", in_vocab}};
}

LexicalReport lexical_accuracy(const std::vector<std::pair<std::string, std::string>>& predictions,
                               const std::map<std::string, TruthEntry>& truth)
{
    std::map<std::string, std::string> predicted;
    for (const auto& [group, text] : predictions) {
        if (truth.find(group) == truth.end()) {
            throw MissingTruth(group);
        }
        predicted.emplace(group, canonical_whitespace(text));
    }
    LexicalReport r;
    for (const auto& [group, t] : truth) {
        ++r.groups;
        if (t.in_vocab) {
            ++r.in_vocab_groups;
        }
        auto it = predicted.find(group);
        if (it != predicted.end() && it->second == canonical_whitespace(t.assertion)) {
            ++r.matched;
            if (t.in_vocab) {
                ++r.in_vocab_matched;
            }
        }
    }
    r.overall = ratio(r.matched, r.groups);
    r.in_vocab = ratio(r.in_vocab_matched, r.in_vocab_groups);
    return r;
}

json ClassificationReport::to_json() const
{
    return json{{"tp", tp},           {"fp", fp},               {"tn", tn},         {"fn", fn},
                {"accuracy", accuracy}, {"precision", precision}, {"recall", recall}, {"f1", f1}};
}

std::string ClassificationReport::to_table() const
{
    return align({{"accuracy", "precision", "recall", "F1"}, {fmt(accuracy), fmt(precision), fmt(recall), fmt(f1)}});
}

ClassificationReport classification_metrics(const std::vector<int>& predicted, const std::vector<int>& truth)
{
    if (predicted.size() != truth.size()) {
        throw LengthMismatch("predicted has " + std::to_string(predicted.size()) + " labels, truth has " +
                             std::to_string(truth.size()));
    }
    ClassificationReport r;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        bool p = predicted[i] != 0;
        bool t = truth[i] != 0;
        if (p && t) {
            ++r.tp;
        } else if (p) {
            ++r.fp;
        } else if (t) {
            ++r.fn;
        } else {
            ++r.tn;
        }
    }
    r.accuracy = ratio(r.tp + r.tn, predicted.size());
    r.precision = ratio(r.tp, r.tp + r.fp);
    r.recall = ratio(r.tp, r.tp + r.fn);
    r.f1 = r.precision + r.recall == 0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

std::vector<int> weighted_coin(std::size_t n, double q_negative, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<int> out(n);
    for (auto& v : out) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        v = u < q_negative ? 0 : 1;
    }
    return out;
}

double coin_expected_accuracy(double q)
{
    return q * q + (1 - q) * (1 - q);
}

AblationCorpus load_ablation_corpus(std::istream& in, unsigned jobs)
{
    AblationCorpus corpus;
    datasets::for_each_batch(in, 512, [&](const std::vector<std::string>& lines, std::size_t) {
        struct Loaded {
            std::vector<AblationGroup> groups;
            std::vector<oracles::AssertionForm> forms;
            bool ok = false;
        };
        auto results = parallel_map(lines, jobs, [](const std::string& line, std::size_t) {
            Loaded l;
            try {
                auto raw = datasets::parse_raw_sample(line);
                auto test = testlang::parse_test_method(raw.test);
                auto ctx = datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name);
                auto stripped = oracles::strip_oracles(test);
                for (const auto& po : stripped.per_oracle_prefixes) {
                    if (const auto* f = std::get_if<oracles::AssertionForm>(&po.oracle.kind)) {
                        l.groups.push_back({po.prefix, ctx, *f});
                        l.forms.push_back(*f);
                    }
                }
                l.ok = true;
            } catch (const datasets::RecordError&) {
            } catch (const testlang::ParseError&) {
            }
            return l;
        });
        for (auto& l : results) {
            ++corpus.records;
            if (!l.ok) {
                ++corpus.dropped;
                continue;
            }
            for (const auto& f : l.forms) {
                corpus.constants.add(f);
            }
            for (auto& g : l.groups) {
                corpus.groups.push_back(std::move(g));
            }
        }
    });
    return corpus;
}

std::vector<AblationRow> k_ablation(const AblationCorpus& corpus, const std::vector<std::size_t>& ks,
                                    ranking::Scorer& scorer, std::size_t default_k,
                                    const candidates::GlobalConstantTable* table, unsigned jobs)
{
    if (ks.empty()) {
        throw std::invalid_argument("k_ablation needs at least one k");
    }
    const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
    const candidates::GlobalConstantTable base = table ? *table : corpus.constants.finish(max_k);

    std::vector<AblationRow> rows;
    for (std::size_t k : ks) {
        auto t = base.truncated(k);
        struct Outcome {
            bool in_vocab = false;
            bool matched = false;
        };
        auto outcomes = parallel_map(corpus.groups, jobs, [&](const AblationGroup& g, std::size_t) {
            Outcome o;
            candidates::CandidateSet cs;
            try {
                cs = candidates::create_candidate_templates(t, k, g.prefix);
            } catch (const candidates::NoAssignment&) {
                return o;
            }
            if (cs.empty()) {
                return o;
            }
            o.in_vocab = cs.contains(g.truth);
            auto ranked = ranking::rank_assertions(g.prefix, g.context, cs, scorer);
            o.matched = canonical_whitespace(oracles::render_assertion(ranked.front().candidate.form)) ==
                        canonical_whitespace(oracles::render_assertion(g.truth));
            return o;
        });
        AblationRow row;
        row.k = k;
        row.is_default = k == default_k;
        row.groups = corpus.groups.size();
        for (const auto& o : outcomes) {
            row.in_vocab += o.in_vocab ? 1 : 0;
            row.matched += o.matched ? 1 : 0;
            row.in_vocab_matched += o.matched && o.in_vocab ? 1 : 0;
        }
        row.overall_accuracy = ratio(row.matched, row.groups);
        row.in_vocab_fraction = ratio(row.in_vocab, row.groups);
        row.in_vocab_accuracy = ratio(row.in_vocab_matched, row.in_vocab);
        rows.push_back(row);
    }
    return rows;
}

json ablation_json(const std::vector<AblationRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back(json{{"k", r.k},
                           {"groups", r.groups},
                           {"in_vocab", r.in_vocab},
                           {"matched", r.matched},
                           {"overall_accuracy", r.overall_accuracy},
                           {"in_vocab_fraction", r.in_vocab_fraction},
                           {"in_vocab_accuracy", r.in_vocab_accuracy},
                           {"default", r.is_default}});
    }
    return out;
}

std::string ablation_table(const std::vector<AblationRow>& rows)
{
    std::vector<std::vector<std::string>> t = {{"k", "groups", "in-vocab", "in-vocab acc", "overall acc"}};
    for (const auto& r : rows) {
        t.push_back({std::to_string(r.k) + (r.is_default ? " (default)" : ""), std::to_string(r.groups),
                     fmt(r.in_vocab_fraction), fmt(r.in_vocab_accuracy), fmt(r.overall_accuracy)});
    }
    return align(t);
}

} // namespace oracleforge::evalharness
