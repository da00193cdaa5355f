#include "oracleforge/testlang.hpp"

#include <array>
#include <utility>

namespace oracleforge::testlang {

namespace {

std::string indent_str(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string render_args(const std::vector<Expr>& args)
{
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += render_expr(args[i]);
    }
    return out + ")";
}

struct ExprPrinter {
    std::string operator()(const Literal& l) const { return l.text; }
    std::string operator()(const VarRef& v) const { return v.name; }
    std::string operator()(const MethodCall& c) const
    {
        std::string out;
        if (c.receiver) {
            out = render_expr(**c.receiver) + ".";
        }
        return out + c.method + render_args(c.args);
    }
    std::string operator()(const FieldAccess& f) const { return render_expr(*f.receiver) + "." + f.field; }
    std::string operator()(const NewObject& n) const { return "new " + n.type + render_args(n.args); }
    std::string operator()(const Cast& c) const { return "(" + c.type + ") " + render_expr(*c.operand); }
};

struct StmtPrinter {
    int indent;

    std::string operator()(const VarDecl& d) const
    {
        std::string out = indent_str(indent) + (d.is_final ? "final " : "") + d.declared_type + " " + d.name;
        if (d.init) {
            out += " = " + render_expr(*d.init);
        }
        return out + ";\n";
    }
    std::string operator()(const Assign& a) const
    {
        return indent_str(indent) + a.target + " = " + render_expr(a.value) + ";\n";
    }
    std::string operator()(const ExprStmt& e) const { return indent_str(indent) + render_expr(e.expr) + ";\n"; }
    std::string operator()(const AssertStmt& a) const
    {
        return indent_str(indent) + render_assert_call(a.call) + ";\n";
    }
    std::string operator()(const TryCatch& t) const
    {
        std::string pad = indent_str(indent);
        return pad + "try {\n" + render_statements(t.body, indent + 1) + pad + "} catch (" + t.caught_type + " " +
               t.catch_var + ") {\n" + render_statements(t.catch_body, indent + 1) + pad + "}\n";
    }
    std::string operator()(const OpaqueStmt& o) const { return indent_str(indent) + o.text + "\n"; }
};

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kBoxed = {{
    {"Integer", "int"},
    {"Long", "long"},
    {"Double", "double"},
    {"Float", "float"},
    {"Boolean", "boolean"},
    {"Character", "char"},
    {"Short", "short"},
    {"Byte", "byte"},
}};

} // namespace

std::string render_expr(const Expr& e)
{
    return std::visit(ExprPrinter{}, e.node);
}

std::string render_assert_call(const AssertCall& call)
{
    std::string out = call.qualifier.empty() ? "" : call.qualifier + ".";
    return out + call.method_name + render_args(call.args);
}

std::string render_statement(const Statement& s, int indent)
{
    return std::visit(StmtPrinter{indent}, s.node);
}

std::string render_statements(const std::vector<Statement>& stmts, int indent)
{
    std::string out;
    for (const auto& s : stmts) {
        out += render_statement(s, indent);
    }
    return out;
}

std::string render_test_method(const TestMethod& t)
{
    std::string out = "public void " + t.name + "()";
    if (!t.throws.empty()) {
        out += " throws ";
        for (std::size_t i = 0; i < t.throws.size(); ++i) {
            out += (i > 0 ? ", " : "") + t.throws[i];
        }
    }
    out += " {\n" + render_statements(t.statements, 1) + "}\n";
    return out;
}

std::string erase_type(std::string_view type_name)
{
    std::string out;
    int depth = 0;
    for (char c : type_name) {
        if (c == '<') {
            ++depth;
        } else if (c == '>') {
            --depth;
        } else if (depth == 0 && c != ' ') {
            out += c;
        }
    }
    std::string suffix;
    while (out.size() >= 2 && out.compare(out.size() - 2, 2, "[]") == 0) {
        suffix += "[]";
        out.resize(out.size() - 2);
    }
    if (auto dot = out.rfind('.'); dot != std::string::npos) {
        out = out.substr(dot + 1);
    }
    if (suffix.empty()) {
        for (const auto& [boxed, prim] : kBoxed) {
            if (out == boxed) {
                return std::string(prim);
            }
        }
    }
    return out + suffix;
}

bool is_primitive_type(std::string_view erased)
{
    constexpr std::array<std::string_view, 8> kPrims = {"boolean", "byte", "char",  "short",
                                                        "int",     "long", "float", "double"};
    for (auto p : kPrims) {
        if (erased == p) {
            return true;
        }
    }
    return false;
}

std::string literal_type_name(const Literal& lit)
{
    switch (lit.type) {
    case LiteralType::Int: return "int";
    case LiteralType::Long: return "long";
    case LiteralType::Double: return "double";
    case LiteralType::Float: return "float";
    case LiteralType::Boolean: return "boolean";
    case LiteralType::Char: return "char";
    case LiteralType::String: return "String";
    case LiteralType::Null: return "nulltype";
    }
    return "nulltype";
}

} // namespace oracleforge::testlang
