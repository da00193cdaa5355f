#include "oracleforge/oracles.hpp"

#include <algorithm>
#include <cctype>

namespace oracleforge::oracles {

using testlang::AssertStmt;
using testlang::Literal;
using testlang::MethodCall;
using testlang::TryCatch;
using testlang::VarDecl;
using testlang::VarRef;

std::string_view to_string(OutOfGrammarReason reason)
{
    switch (reason) {
    case OutOfGrammarReason::UnsupportedMethod: return "unsupported-method";
    case OutOfGrammarReason::ExpectedNotConstOrVar: return "expected-not-const-or-var";
    case OutOfGrammarReason::Arity: return "arity";
    }
    return "unsupported-method";
}

namespace {

bool const_or_var(const Expr& e)
{
    return e.as<Literal>() != nullptr || e.as<VarRef>() != nullptr;
}

template <typename Form>
Classification unary_form(const AssertCall& call)
{
    if (call.args.size() != 1) {
        return OutOfGrammar{OutOfGrammarReason::Arity};
    }
    return InGrammar{AssertionForm{Form{call.args[0]}}};
}

std::optional<std::string> dotted_name(const Expr& e)
{
    if (const auto* v = e.as<VarRef>()) {
        return v->name;
    }
    if (const auto* f = e.as<testlang::FieldAccess>()) {
        if (auto inner = dotted_name(*f->receiver)) {
            return *inner + "." + f->field;
        }
    }
    return std::nullopt;
}

Expr dotted_expr(const std::string& name)
{
    auto dot = name.rfind('.');
    if (dot == std::string::npos) {
        return Expr{VarRef{name}};
    }
    return Expr{testlang::FieldAccess{Box<Expr>(dotted_expr(name.substr(0, dot))), name.substr(dot + 1)}};
}

bool is_generic_exception(const std::string& type)
{
    auto erased = testlang::erase_type(type);
    return erased == "Exception" || erased == "Throwable";
}

std::optional<std::string> expected_exception_type(const TryCatch& tc)
{
    for (const auto& s : tc.catch_body) {
        const auto* stmt = s.as<testlang::ExprStmt>();
        if (stmt == nullptr) {
            continue;
        }
        const auto* call = stmt->expr.as<MethodCall>();
        if (call == nullptr || call->method != "verifyException" || call->args.size() != 2) {
            continue;
        }
        const auto* var = call->args[0].as<VarRef>();
        if (var == nullptr || var->name != tc.catch_var) {
            continue;
        }
        if (auto type = dotted_name(call->args[1])) {
            return type;
        }
    }
    if (!is_generic_exception(tc.caught_type)) {
        return tc.caught_type;
    }
    return std::nullopt;
}

// Removes assertions nested inside non-oracle try/catch statements so that a
// prefix never carries an oracle.
Statement without_nested_assertions(const Statement& s, std::size_t& removed)
{
    const auto* tc = s.as<TryCatch>();
    if (tc == nullptr) {
        return s;
    }
    auto clean = [&removed](const std::vector<Statement>& in) {
        std::vector<Statement> out;
        for (const auto& inner : in) {
            if (inner.as<AssertStmt>() != nullptr) {
                ++removed;
                continue;
            }
            out.push_back(without_nested_assertions(inner, removed));
        }
        return out;
    };
    TryCatch copy = *tc;
    copy.body = clean(tc->body);
    copy.catch_body = clean(tc->catch_body);
    return Statement{std::move(copy)};
}

void collect_refs(const Expr& e, std::vector<std::string>& out)
{
    std::visit(
        [&out](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, VarRef>) {
                const auto& n = node.name;
                if (!n.empty() && !std::isupper(static_cast<unsigned char>(n[0])) && n != "this" && n != "super") {
                    out.push_back(n);
                }
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                if (node.receiver) {
                    collect_refs(**node.receiver, out);
                }
                for (const auto& a : node.args) {
                    collect_refs(a, out);
                }
            } else if constexpr (std::is_same_v<T, testlang::FieldAccess>) {
                collect_refs(*node.receiver, out);
            } else if constexpr (std::is_same_v<T, testlang::NewObject>) {
                for (const auto& a : node.args) {
                    collect_refs(a, out);
                }
            } else if constexpr (std::is_same_v<T, testlang::Cast>) {
                collect_refs(*node.operand, out);
            }
        },
        e.node);
}

} // namespace

Classification classify_assertion(const AssertCall& call)
{
    const auto& name = call.method_name;
    if (name == "assertTrue") {
        return unary_form<True>(call);
    }
    if (name == "assertFalse") {
        return unary_form<False>(call);
    }
    if (name == "assertNull") {
        return unary_form<Null>(call);
    }
    if (name == "assertNotNull") {
        return unary_form<NotNull>(call);
    }
    if (name != "assertEquals") {
        return OutOfGrammar{OutOfGrammarReason::UnsupportedMethod};
    }
    if (call.args.size() != 2) {
        return OutOfGrammar{OutOfGrammarReason::Arity};
    }
    const auto& first = call.args[0];
    const auto& second = call.args[1];
    if (const_or_var(first)) {
        return InGrammar{AssertionForm{Equals{first, second}}};
    }
    if (const_or_var(second)) {
        return InGrammar{AssertionForm{Equals{second, first}}};
    }
    return OutOfGrammar{OutOfGrammarReason::ExpectedNotConstOrVar};
}

AssertCall to_assert_call(const AssertionForm& form)
{
    return std::visit(
        [](const auto& f) -> AssertCall {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Equals>) {
                return {"", "assertEquals", {f.expected, f.actual}};
            } else if constexpr (std::is_same_v<T, True>) {
                return {"", "assertTrue", {f.value}};
            } else if constexpr (std::is_same_v<T, False>) {
                return {"", "assertFalse", {f.value}};
            } else if constexpr (std::is_same_v<T, Null>) {
                return {"", "assertNull", {f.value}};
            } else {
                return {"", "assertNotNull", {f.value}};
            }
        },
        form.form);
}

std::string render_assertion(const AssertionForm& form)
{
    return testlang::render_assert_call(to_assert_call(form));
}

StripResult strip_oracles(const TestMethod& t)
{
    StripResult result;
    const auto& stmts = t.statements;

    for (std::size_t i = 0; i < stmts.size(); ++i) {
        const auto* tc = stmts[i].as<TryCatch>();
        if (tc == nullptr || !tc->has_fail_call()) {
            continue;
        }
        TestPrefix prefix;
        for (std::size_t j = 0; j < i; ++j) {
            if (stmts[j].as<AssertStmt>() != nullptr) {
                ++result.nested_assertions_removed;
                continue;
            }
            prefix.statements.push_back(without_nested_assertions(stmts[j], result.nested_assertions_removed));
        }
        for (std::size_t j = 0; j + 1 < tc->body.size(); ++j) {
            if (tc->body[j].as<AssertStmt>() != nullptr) {
                ++result.nested_assertions_removed;
                continue;
            }
            prefix.statements.push_back(without_nested_assertions(tc->body[j], result.nested_assertions_removed));
        }
        Oracle oracle{ExpectedException{expected_exception_type(*tc)}};
        result.kind = StripKind::ExpectedException;
        result.prefix = prefix;
        result.oracles = {oracle};
        result.per_oracle_prefixes = {{std::move(prefix), std::move(oracle)}};
        return result;
    }

    bool saw_assertion = false;
    for (const auto& s : stmts) {
        const auto* a = s.as<AssertStmt>();
        if (a == nullptr) {
            result.prefix.statements.push_back(without_nested_assertions(s, result.nested_assertions_removed));
            continue;
        }
        saw_assertion = true;
        auto cls = classify_assertion(a->call);
        if (auto* in = std::get_if<InGrammar>(&cls)) {
            Oracle oracle{in->form};
            result.oracles.push_back(oracle);
            result.per_oracle_prefixes.push_back({result.prefix, std::move(oracle)});
        } else {
            result.rejected.push_back({result.prefix, a->call, std::get<OutOfGrammar>(cls).reason});
        }
    }
    result.kind = saw_assertion ? StripKind::Assertions : StripKind::NoOracle;
    return result;
}

std::vector<std::string> declared_variables(const TestPrefix& prefix)
{
    std::vector<std::string> out;
    for (const auto& s : prefix.statements) {
        if (const auto* d = s.as<VarDecl>()) {
            out.push_back(d->name);
        }
    }
    return out;
}

std::vector<std::string> referenced_variables(const AssertionForm& form)
{
    std::vector<std::string> out;
    for (const auto& arg : to_assert_call(form).args) {
        collect_refs(arg, out);
    }
    return out;
}

TestMethod render_oracle_test(const TestPrefix& prefix, const Oracle& oracle, const std::string& name)
{
    if (prefix.empty()) {
        throw InvalidOracle("cannot render an oracle test from an empty prefix");
    }
    TestMethod t;
    t.name = name;
    auto declared = declared_variables(prefix);

    if (const auto* ee = std::get_if<ExpectedException>(&oracle.kind)) {
        std::string var = "e";
        for (int n = 0; std::find(declared.begin(), declared.end(), var) != declared.end(); ++n) {
            var = "e" + std::to_string(n);
        }
        TryCatch tc;
        tc.body = prefix.statements;
        tc.body.push_back(Statement{AssertStmt{{"", "fail", {Expr{Literal{testlang::LiteralType::String,
                                                                           "\"expecting exception\""}}}}}});
        tc.caught_type = "Exception";
        tc.catch_var = var;
        if (ee->exception_type) {
            MethodCall verify;
            verify.method = "verifyException";
            verify.args = {Expr{VarRef{var}}, dotted_expr(*ee->exception_type)};
            tc.catch_body.push_back(Statement{testlang::ExprStmt{Expr{std::move(verify)}}});
        }
        t.statements.push_back(Statement{std::move(tc)});
        return t;
    }

    const auto& form = std::get<AssertionForm>(oracle.kind);
    for (const auto& ref : referenced_variables(form)) {
        if (std::find(declared.begin(), declared.end(), ref) == declared.end()) {
            throw InvalidOracle("assertion references '" + ref + "', which the prefix does not declare");
        }
    }
    t.statements = prefix.statements;
    t.statements.push_back(Statement{AssertStmt{to_assert_call(form)}});
    return t;
}

TestMethod prefix_test(const TestPrefix& prefix, const std::string& name)
{
    TestMethod t;
    t.name = name;
    t.statements = prefix.statements;
    return t;
}

TestMethod normalize_test_name(TestMethod t, unsigned long long n)
{
    t.name = "test" + std::to_string(n);
    return t;
}

int label_exception(const TestMethod& t)
{
    return strip_oracles(t).kind == StripKind::ExpectedException ? 1 : 0;
}

} // namespace oracleforge::oracles
