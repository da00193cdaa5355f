#pragma once

// The oracle grammar: expected-exception wrappers and five assertion forms.
//
//   Test       := Oracle(Prefix)
//   Oracle     := ExpectedException(Prefix) | Prefix; Assertion
//   Assertion  := assertEquals(const|var, expr) | assertTrue(expr)
//               | assertFalse(expr) | assertNull(expr) | assertNotNull(expr)

#include "oracleforge/testlang.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace oracleforge::oracles {

using testlang::AssertCall;
using testlang::Expr;
using testlang::Statement;
using testlang::TestMethod;

struct Equals {
    Expr expected; // Literal or VarRef
    Expr actual;

    bool operator==(const Equals&) const = default;
};
struct True {
    Expr value;
    bool operator==(const True&) const = default;
};
struct False {
    Expr value;
    bool operator==(const False&) const = default;
};
struct Null {
    Expr value;
    bool operator==(const Null&) const = default;
};
struct NotNull {
    Expr value;
    bool operator==(const NotNull&) const = default;
};

struct AssertionForm {
    std::variant<Equals, True, False, Null, NotNull> form;

    bool operator==(const AssertionForm&) const = default;
};

struct ExpectedException {
    std::optional<std::string> exception_type; // nullopt: unspecified

    bool operator==(const ExpectedException&) const = default;
};

struct Oracle {
    std::variant<ExpectedException, AssertionForm> kind;

    bool operator==(const Oracle&) const = default;

    bool is_exception() const { return std::holds_alternative<ExpectedException>(kind); }
};

struct TestPrefix {
    std::vector<Statement> statements;

    bool operator==(const TestPrefix&) const = default;
    bool empty() const { return statements.empty(); }
};

enum class OutOfGrammarReason { UnsupportedMethod, ExpectedNotConstOrVar, Arity };

std::string_view to_string(OutOfGrammarReason reason);

struct InGrammar {
    AssertionForm form;
};
struct OutOfGrammar {
    OutOfGrammarReason reason;
};
using Classification = std::variant<InGrammar, OutOfGrammar>;

// assertEquals with the constant on the right is canonicalized to
// Equals(constant, expr).
Classification classify_assertion(const AssertCall& call);

AssertCall to_assert_call(const AssertionForm& form);
std::string render_assertion(const AssertionForm& form);

enum class StripKind { ExpectedException, Assertions, NoOracle };

struct PerOraclePrefix {
    TestPrefix prefix;
    Oracle oracle;

    bool operator==(const PerOraclePrefix&) const = default;
};

// Assertion outside the grammar, with the statements preceding it.
struct RejectedAssertion {
    TestPrefix prefix;
    AssertCall call;
    OutOfGrammarReason reason;
};

struct StripResult {
    StripKind kind = StripKind::NoOracle;
    TestPrefix prefix;                      // every non-oracle statement
    std::vector<Oracle> oracles;            // in-grammar oracles, in order
    std::vector<PerOraclePrefix> per_oracle_prefixes;
    std::vector<RejectedAssertion> rejected;
    std::size_t nested_assertions_removed = 0;
};

StripResult strip_oracles(const TestMethod& t);

class InvalidOracle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Builds a test from a prefix and oracle. Throws InvalidOracle when the
// prefix is empty or an assertion names a variable the prefix never declares.
TestMethod render_oracle_test(const TestPrefix& prefix, const Oracle& oracle, const std::string& name);

// The prefix alone, as a runnable test with only the implicit oracle.
TestMethod prefix_test(const TestPrefix& prefix, const std::string& name);

TestMethod normalize_test_name(TestMethod t, unsigned long long n);

int label_exception(const TestMethod& t);

// Variables declared by top-level VarDecl statements of the prefix.
std::vector<std::string> declared_variables(const TestPrefix& prefix);

// Variable names an assertion depends on; receivers that look like class
// names (leading upper-case) are not included.
std::vector<std::string> referenced_variables(const AssertionForm& form);

} // namespace oracleforge::oracles
