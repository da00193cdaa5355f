#pragma once

// Builds the exception-classification and assertion-ranking datasets from
// JSONL corpora of (focal method, test) records.

#include "oracleforge/candidates.hpp"
#include "oracleforge/oracles.hpp"
#include "oracleforge/testlang.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracleforge::datasets {

using candidates::GlobalConstantTable;
using oracles::AssertionForm;
using oracles::TestPrefix;
using testlang::UnitContext;

struct RawSample {
    std::string focal_method; // full source, implementation included
    std::string docstring;
    std::string class_name;
    std::string test;
    std::optional<std::string> project;
};

class RecordError : public std::runtime_error {
public:
    RecordError(std::string reason, const std::string& message);
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

// Throws RecordError("bad-json" | "bad-record").
RawSample parse_raw_sample(std::string_view line);

// Signature and docstring only. When `docstring` is empty, a javadoc comment
// directly before the header is used instead.
UnitContext strip_implementation(std::string_view focal_source, std::string_view docstring,
                                 std::string class_name = {});

enum class Split { Train, Valid, Test };

std::string_view to_string(Split s);

// 90/5/5 by project name when present, else by test text.
Split assign_split(const RawSample& r);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t v);

struct ExceptionSample {
    TestPrefix prefix;
    UnitContext context;
    int label = 0;
    std::string test_name; // normalized
    std::string group_id;
    Split split = Split::Train;
};

struct AssertionSample {
    TestPrefix prefix;
    UnitContext context;
    candidates::Candidate candidate;
    int label = 0;
    std::string test_name;
    std::string group_id;
    Split split = Split::Train;
};

// One (prefix, context) group of the assertion dataset.
struct AssertionGroup {
    std::vector<AssertionSample> samples;
    bool in_vocab = false;
};

struct BuildReport {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<std::string, std::size_t> dropped;
    std::map<std::string, std::size_t> labels;
    std::size_t oov = 0;
    std::map<std::string, std::size_t> oracles; // per-oracle outcomes, assertion dataset only

    std::size_t dropped_total() const;
    nlohmann::json to_json() const;
};

struct ExceptionRecordResult {
    std::optional<ExceptionSample> sample;
    std::string drop_reason;
};

// `index` is the 0-based record number; it names the test.
ExceptionRecordResult exception_record(const RawSample& r, std::size_t index);

struct AssertionRecordResult {
    std::vector<AssertionGroup> groups; // in-vocab groups, plus out-of-vocab ones when keep_oov
    std::size_t in_grammar = 0;
    std::size_t out_of_grammar = 0;
    std::size_t no_assignment = 0;
    std::size_t no_candidates = 0;
    std::size_t out_of_vocab = 0;
    std::string drop_reason; // set when no group was emitted
};

AssertionRecordResult assertion_record(const RawSample& r, std::size_t index, const GlobalConstantTable& g,
                                       std::size_t k, bool keep_oov);

nlohmann::json to_json(const ExceptionSample& s);
nlohmann::json to_json(const AssertionSample& s);
nlohmann::json context_json(const UnitContext& c);

struct BuildOptions {
    unsigned jobs = 1;
    bool keep_oov = false;
    std::size_t batch = 512; // records per parallel batch
};

// Streams JSONL in and out. Per-record problems are counted, never thrown.
BuildReport build_exception_dataset(std::istream& in, std::ostream& out, const BuildOptions& opts = {});
BuildReport build_assertion_dataset(std::istream& in, std::ostream& out, const GlobalConstantTable& g,
                                    const BuildOptions& opts = {});

// Counts assertEquals constants over the tests of a corpus.
GlobalConstantTable build_vocab(std::istream& in, std::size_t k, const BuildOptions& opts = {},
                                BuildReport* report = nullptr);

// Calls fn(batch, first_index) over consecutive non-empty lines of `in`.
void for_each_batch(std::istream& in, std::size_t batch,
                    const std::function<void(const std::vector<std::string>&, std::size_t)>& fn);

} // namespace oracleforge::datasets
