#pragma once

// AST, parser and printer for the subset of Java that unit tests, focal
// method signatures and docstrings are written in.

#include "oracleforge/box.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oracleforge::testlang {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, std::string expected);

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

enum class LiteralType { Int, Long, Double, Float, Boolean, Char, String, Null };

std::string_view to_string(LiteralType type);

struct Expr;

struct Literal {
    LiteralType type = LiteralType::Int;
    std::string text; // exact source spelling

    bool operator==(const Literal&) const = default;
};

struct VarRef {
    std::string name;

    bool operator==(const VarRef&) const = default;
};

struct MethodCall {
    std::optional<Box<Expr>> receiver;
    std::string method;
    std::vector<Expr> args;

    bool operator==(const MethodCall&) const;
};

struct FieldAccess {
    Box<Expr> receiver;
    std::string field;

    bool operator==(const FieldAccess&) const;
};

struct NewObject {
    std::string type;
    std::vector<Expr> args;

    bool operator==(const NewObject&) const;
};

struct Cast {
    std::string type;
    Box<Expr> operand;

    bool operator==(const Cast&) const;
};

struct Expr {
    std::variant<Literal, VarRef, MethodCall, FieldAccess, NewObject, Cast> node;

    bool operator==(const Expr&) const = default;

    template <typename T>
    const T* as() const
    {
        return std::get_if<T>(&node);
    }
};

struct AssertCall {
    std::string qualifier; // e.g. "Assert" in Assert.fail(); empty when unqualified
    std::string method_name;
    std::vector<Expr> args;

    bool operator==(const AssertCall&) const = default;
};

struct Statement;

struct VarDecl {
    std::string declared_type;
    std::string name;
    std::optional<Expr> init;
    bool is_final = false;

    bool operator==(const VarDecl&) const = default;
};

// `name = expr;` where name was declared earlier without an initializer.
struct Assign {
    std::string target;
    Expr value;

    bool operator==(const Assign&) const = default;
};

struct ExprStmt {
    Expr expr;

    bool operator==(const ExprStmt&) const = default;
};

struct AssertStmt {
    AssertCall call;

    bool operator==(const AssertStmt&) const = default;
};

struct TryCatch {
    std::vector<Statement> body;
    std::string caught_type;
    std::string catch_var;
    std::vector<Statement> catch_body;

    // True when the try body ends in a fail(...) call.
    bool has_fail_call() const;

    bool operator==(const TryCatch&) const;
};

// Raw passthrough for statements outside the supported subset.
struct OpaqueStmt {
    std::string text;

    bool operator==(const OpaqueStmt&) const = default;
};

struct Statement {
    std::variant<VarDecl, Assign, ExprStmt, AssertStmt, TryCatch, OpaqueStmt> node;

    bool operator==(const Statement&) const = default;

    template <typename T>
    const T* as() const
    {
        return std::get_if<T>(&node);
    }
};

struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct TestMethod {
    std::string name;
    std::vector<std::string> throws;
    std::vector<Statement> statements;
    SourceSpan source_span; // not part of structural equality

    bool operator==(const TestMethod& other) const
    {
        return name == other.name && throws == other.throws && statements == other.statements;
    }
};

struct Parameter {
    std::string type;
    std::string name;

    bool operator==(const Parameter&) const = default;
};

struct UnitContext {
    std::string class_name;
    std::string signature; // canonical header text
    std::string docstring;
    bool implementation_present = false;

    std::vector<std::string> modifiers;
    std::string return_type;
    std::string method_name;
    std::vector<Parameter> params;
    std::vector<std::string> throws;
};

// Parses exactly one test method. Statements outside the subset become
// OpaqueStmt; unbalanced brackets, a missing header or an empty body throw.
TestMethod parse_test_method(std::string_view source);

// Parses a single expression (no trailing semicolon).
Expr parse_expression(std::string_view source);

// Parses a single statement, e.g. one assertion line from a corpus.
Statement parse_statement(std::string_view source);

// Parses a method header; anything after the parameter list and throws
// clause (a body or `;`) is ignored.
UnitContext parse_signature(std::string_view sig);

std::string render_expr(const Expr& e);
std::string render_assert_call(const AssertCall& call);
std::string render_statement(const Statement& s, int indent = 0);
std::string render_statements(const std::vector<Statement>& stmts, int indent);
std::string render_test_method(const TestMethod& t);

// Generic arguments, array suffixes and package qualifiers removed; boxed
// primitives map to the primitive name (Integer -> int).
std::string erase_type(std::string_view type_name);

// Type of a literal as used for dictionary lookup ("int", "String", ...).
// Null literals map to "nulltype".
std::string literal_type_name(const Literal& lit);

// Lexes `text` as a single literal token (optionally negative).
std::optional<Literal> literal_from_text(std::string_view text);

bool is_primitive_type(std::string_view erased);

} // namespace oracleforge::testlang
