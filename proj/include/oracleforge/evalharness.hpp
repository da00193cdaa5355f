#pragma once

// Grammar coverage, lexical accuracy, classification metrics, the K ablation,
// and bug-finding verdicts over execution records.

#include "oracleforge/candidates.hpp"
#include "oracleforge/ranking.hpp"
#include "oracleforge/testlang.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracleforge::evalharness {

enum class Outcome { Pass, Fail };
enum class OracleKind { ExceptionRaised, ExceptionNotRaised, Assertion, PrefixOnly };
enum class Verdict { TP, FP, TN, FN };

std::string_view to_string(Outcome o);
std::string_view to_string(OracleKind k);
std::string_view to_string(Verdict v);
std::optional<OracleKind> oracle_kind_from_string(std::string_view s);

struct ExecutionRecord {
    std::string test_id;
    std::string bug_id;
    Outcome buggy = Outcome::Pass;
    Outcome fixed = Outcome::Pass;
    OracleKind oracle_kind = OracleKind::Assertion;
    // Prefix-only records may carry whether each run raised; the test then
    // fails exactly when its run raised.
    std::optional<bool> buggy_raised;
    std::optional<bool> fixed_raised;
    std::string source;
};

class BadRecord : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExecutionRecord parse_execution_record(std::string_view line);

// (buggy, fixed): (fail, pass) TP, (fail, fail) FP, (pass, pass) TN, (pass, fail) FN.
Verdict judge(Outcome buggy, Outcome fixed);
Verdict judge(const ExecutionRecord& r);

struct MetricsReport {
    std::map<Verdict, std::size_t> counts{{Verdict::TP, 0}, {Verdict::FP, 0}, {Verdict::TN, 0}, {Verdict::FN, 0}};
    std::size_t records = 0;
    double fpr = 0;
    std::set<std::string> bugs_found;
    std::map<OracleKind, std::set<std::string>> bugs_by_kind;

    void add(const ExecutionRecord& r);
    void merge(const MetricsReport& other);
    void finish(); // computes fpr

    nlohmann::json to_json() const;
    std::string to_table() const;
};

MetricsReport aggregate(const std::vector<ExecutionRecord>& records);

struct CoverageReport {
    std::size_t total = 0;
    std::size_t in_grammar = 0;
    std::size_t parse_failures = 0;
    std::map<std::string, std::size_t> out_by_reason;

    double fraction() const; // in_grammar / (total - parse_failures), 0 when undefined

    void add_call(const testlang::AssertCall& call);
    // One assertion statement; a missing trailing ';' is tolerated. Text that
    // is not a single assert call counts as a parse failure.
    void add_text(std::string_view assertion);
    void add_parse_failure() { ++total, ++parse_failures; }
    void merge(const CoverageReport& other);

    nlohmann::json to_json() const;
    std::string to_table() const;
};

CoverageReport grammar_coverage(const std::vector<testlang::AssertCall>& calls);

// Whitespace runs collapse to one space between identifier characters and
// vanish elsewhere; string and char literals are kept as written.
std::string canonical_whitespace(std::string_view text);

class MissingTruth : public std::runtime_error {
public:
    explicit MissingTruth(const std::string& group_id);
    const std::string& group_id() const noexcept { return group_; }

private:
    std::string group_;
};

struct TruthEntry {
    std::string assertion;
    bool in_vocab = false;
};

struct LexicalReport {
    std::size_t groups = 0;
    std::size_t matched = 0;
    std::size_t in_vocab_groups = 0;
    std::size_t in_vocab_matched = 0;
    double overall = 0;
    double in_vocab = 0;

    nlohmann::json to_json() const;
};

// Groups with no prediction count as misses. A prediction for a group with
// no truth throws MissingTruth.
LexicalReport lexical_accuracy(const std::vector<std::pair<std::string, std::string>>& predictions,
                               const std::map<std::string, TruthEntry>& truth);

class LengthMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ClassificationReport {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

ClassificationReport classification_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);

// Predicts 0 with probability q_negative, 1 otherwise; reproducible per seed.
std::vector<int> weighted_coin(std::size_t n, double q_negative, std::uint64_t seed);

// Expected accuracy of that coin against labels with the same negative rate.
double coin_expected_accuracy(double q);

// One in-grammar assertion oracle from a corpus, ready for re-ranking.
struct AblationGroup {
    oracles::TestPrefix prefix;
    testlang::UnitContext context;
    oracles::AssertionForm truth;
};

struct AblationCorpus {
    std::vector<AblationGroup> groups;
    candidates::GlobalConstantCounter constants;
    std::size_t records = 0;
    std::size_t dropped = 0;
};

// Reads (focal method, test) JSONL; malformed records are counted and skipped.
AblationCorpus load_ablation_corpus(std::istream& in, unsigned jobs = 1);

struct AblationRow {
    std::size_t k = 0;
    std::size_t groups = 0;
    std::size_t in_vocab = 0;
    std::size_t matched = 0;
    std::size_t in_vocab_matched = 0;
    double overall_accuracy = 0;
    double in_vocab_fraction = 0;
    double in_vocab_accuracy = 0;
    bool is_default = false;
};

// For every k: truncates the corpus constant table, regenerates candidates,
// picks the top-ranked one (no threshold) and matches it lexically against
// the truth. `table` defaults to the corpus' own constants.
std::vector<AblationRow> k_ablation(const AblationCorpus& corpus, const std::vector<std::size_t>& ks,
                                    ranking::Scorer& scorer, std::size_t default_k = 8,
                                    const candidates::GlobalConstantTable* table = nullptr, unsigned jobs = 1);

nlohmann::json ablation_json(const std::vector<AblationRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);

// Fixed-point text for tables and reports.
std::string fmt(double v, int decimals = 4);

} // namespace oracleforge::evalharness
