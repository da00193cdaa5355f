#pragma once

#include "oracleforge/oracles.hpp"
#include "oracleforge/testlang.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracleforge::candidates {

using oracles::AssertionForm;
using oracles::TestPrefix;
using testlang::Expr;
using testlang::Literal;

struct GlobalEntry {
    Literal value;
    std::size_t count = 0;

    bool operator==(const GlobalEntry&) const = default;
};

// Most frequent assertEquals constants per erased type. Each list holds at
// most k entries, ordered by descending count, ties by literal text.
class GlobalConstantTable {
public:
    GlobalConstantTable() = default;
    GlobalConstantTable(std::size_t k, std::map<std::string, std::vector<GlobalEntry>> entries);

    std::size_t k() const noexcept { return k_; }
    const std::map<std::string, std::vector<GlobalEntry>>& entries() const noexcept { return entries_; }

    // Empty when the type has no entries.
    const std::vector<GlobalEntry>& get(const std::string& erased_type) const;

    GlobalConstantTable truncated(std::size_t k) const;

    bool operator==(const GlobalConstantTable&) const = default;

private:
    std::size_t k_ = 0;
    std::map<std::string, std::vector<GlobalEntry>> entries_;
};

// Counts Literal expected-values of Equals assertions; null literals are skipped.
GlobalConstantTable build_global_constant_table(const std::vector<AssertionForm>& corpus, std::size_t k);

class GlobalConstantCounter {
public:
    void add(const AssertionForm& form);
    void merge(const GlobalConstantCounter& other);
    GlobalConstantTable finish(std::size_t k) const;

private:
    std::map<std::string, std::map<std::string, std::size_t>> counts_; // type -> text -> count
};

class VocabFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Header `oracle-forge-vocab v1 k=<k>`, then `<type>\t<rank>\t<literal>\t<count>`.
void write_vocab(std::ostream& out, const GlobalConstantTable& table);
GlobalConstantTable read_vocab(std::istream& in);

struct LocalValueTable {
    std::map<std::string, std::vector<Expr>> entries; // erased type -> first-appearance order

    const std::vector<Expr>& get(const std::string& erased_type) const;
};

LocalValueTable create_local_value_table(const TestPrefix& prefix,
                                         const std::optional<std::string>& exclude_var = std::nullopt);

enum class RetValKind { Boolean, PrimitiveNonBoolean, Object };

std::string_view to_string(RetValKind kind);

struct RetVal {
    std::string var_name;
    std::string declared_type;
    RetValKind kind = RetValKind::Object;

    bool operator==(const RetVal&) const = default;
};

// The prefix does not end in an assignment, so there is nothing to assert on.
class NoAssignment : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RetVal extract_ret_val(const TestPrefix& prefix);

enum class Provenance { Structural, Global, Local };

std::string_view to_string(Provenance p);

struct Candidate {
    AssertionForm form;
    Provenance provenance = Provenance::Structural;
    std::optional<std::size_t> global_rank; // set for Global provenance

    bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
    std::vector<Candidate> candidates;

    std::size_t size() const noexcept { return candidates.size(); }
    bool empty() const noexcept { return candidates.empty(); }
    bool contains(const AssertionForm& form) const;
    std::vector<std::string> rendered() const;
};

// Only the first k entries of each global list are used.
CandidateSet create_candidate_templates(const GlobalConstantTable& global, std::size_t k, const TestPrefix& prefix);

} // namespace oracleforge::candidates
