#include "oracleforge/ast_json.hpp"

namespace oracleforge {

using nlohmann::json;
using namespace testlang;

namespace {

json list(const std::vector<Expr>& exprs)
{
    json out = json::array();
    for (const auto& e : exprs) {
        out.push_back(to_json(e));
    }
    return out;
}

json list(const std::vector<Statement>& stmts)
{
    json out = json::array();
    for (const auto& s : stmts) {
        out.push_back(to_json(s));
    }
    return out;
}

} // namespace

json to_json(const Expr& e)
{
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return {{"kind", "literal"}, {"type", std::string(to_string(n.type))}, {"text", n.text}};
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return {{"kind", "var"}, {"name", n.name}};
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                return {{"kind", "call"},
                        {"receiver", n.receiver ? to_json(**n.receiver) : json(nullptr)},
                        {"method", n.method},
                        {"args", list(n.args)}};
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return {{"kind", "field"}, {"receiver", to_json(*n.receiver)}, {"field", n.field}};
            } else if constexpr (std::is_same_v<T, NewObject>) {
                return {{"kind", "new"}, {"type", n.type}, {"args", list(n.args)}};
            } else {
                return {{"kind", "cast"}, {"type", n.type}, {"operand", to_json(*n.operand)}};
            }
        },
        e.node);
}

json to_json(const Statement& s)
{
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarDecl>) {
                json j = {{"kind", "decl"}, {"type", n.declared_type}, {"name", n.name}, {"final", n.is_final}};
                j["init"] = n.init ? to_json(*n.init) : json(nullptr);
                return j;
            } else if constexpr (std::is_same_v<T, Assign>) {
                return {{"kind", "assign"}, {"target", n.target}, {"value", to_json(n.value)}};
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                return {{"kind", "expr"}, {"expr", to_json(n.expr)}};
            } else if constexpr (std::is_same_v<T, AssertStmt>) {
                return {{"kind", "assert"},
                        {"qualifier", n.call.qualifier},
                        {"method", n.call.method_name},
                        {"args", list(n.call.args)}};
            } else if constexpr (std::is_same_v<T, TryCatch>) {
                return {{"kind", "try"},
                        {"body", list(n.body)},
                        {"has_fail_call", n.has_fail_call()},
                        {"caught_type", n.caught_type},
                        {"catch_var", n.catch_var},
                        {"catch_body", list(n.catch_body)}};
            } else {
                return {{"kind", "opaque"}, {"text", n.text}};
            }
        },
        s.node);
}

json to_json(const TestMethod& t)
{
    return {{"name", t.name},
            {"throws", t.throws},
            {"statements", list(t.statements)},
            {"span", {t.source_span.begin, t.source_span.end}}};
}

json to_json(const UnitContext& c)
{
    json params = json::array();
    for (const auto& p : c.params) {
        params.push_back({{"type", p.type}, {"name", p.name}});
    }
    return {{"class_name", c.class_name},
            {"signature", c.signature},
            {"docstring", c.docstring},
            {"implementation_present", c.implementation_present},
            {"return_type", c.return_type},
            {"method_name", c.method_name},
            {"params", params},
            {"throws", c.throws}};
}

json to_json(const oracles::AssertionForm& f)
{
    auto call = oracles::to_assert_call(f);
    return {{"method", call.method_name}, {"args", list(call.args)}, {"text", oracles::render_assertion(f)}};
}

json to_json(const oracles::Oracle& o)
{
    if (const auto* ee = std::get_if<oracles::ExpectedException>(&o.kind)) {
        return {{"kind", "expected-exception"},
                {"exception_type", ee->exception_type ? json(*ee->exception_type) : json(nullptr)}};
    }
    json j = to_json(std::get<oracles::AssertionForm>(o.kind));
    j["kind"] = "assertion";
    return j;
}

json to_json(const candidates::RetVal& r)
{
    return {{"var_name", r.var_name},
            {"declared_type", r.declared_type},
            {"kind", std::string(candidates::to_string(r.kind))}};
}

} // namespace oracleforge
