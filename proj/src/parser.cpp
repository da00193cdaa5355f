#include "lexer.hpp"

#include "oracleforge/testlang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace oracleforge::testlang {

ParseError::ParseError(std::size_t position, std::string expected)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": expected " + expected),
      position_(position),
      expected_(std::move(expected))
{
}

std::string_view to_string(LiteralType type)
{
    switch (type) {
    case LiteralType::Int: return "int";
    case LiteralType::Long: return "long";
    case LiteralType::Double: return "double";
    case LiteralType::Float: return "float";
    case LiteralType::Boolean: return "boolean";
    case LiteralType::Char: return "char";
    case LiteralType::String: return "string";
    case LiteralType::Null: return "null";
    }
    return "int";
}

bool MethodCall::operator==(const MethodCall& o) const
{
    return receiver == o.receiver && method == o.method && args == o.args;
}

bool FieldAccess::operator==(const FieldAccess& o) const
{
    return receiver == o.receiver && field == o.field;
}

bool NewObject::operator==(const NewObject& o) const
{
    return type == o.type && args == o.args;
}

bool Cast::operator==(const Cast& o) const
{
    return type == o.type && operand == o.operand;
}

bool TryCatch::operator==(const TryCatch& o) const
{
    return body == o.body && caught_type == o.caught_type && catch_var == o.catch_var &&
           catch_body == o.catch_body;
}

bool TryCatch::has_fail_call() const
{
    if (body.empty()) {
        return false;
    }
    const auto* last = body.back().as<AssertStmt>();
    return last != nullptr && last->call.method_name == "fail";
}

namespace {

using detail::Token;
using detail::TokenKind;

// Internal backtracking signal; never escapes the parser.
struct NoMatch {};

constexpr std::array<std::string_view, 38> kReserved = {
    "abstract", "assert",   "break",     "case",       "catch",     "class",     "const",
    "continue", "default",  "do",        "else",       "enum",      "extends",   "finally",
    "for",      "goto",     "if",        "implements", "import",    "instanceof", "interface",
    "native",   "new",      "package",   "private",    "protected", "public",    "return",
    "static",   "strictfp", "super",     "switch",     "synchronized", "throw",  "throws",
    "transient", "try",     "while",
};

constexpr std::array<std::string_view, 11> kModifiers = {
    "public", "private",  "protected", "static",   "final",   "synchronized",
    "abstract", "native", "strictfp",  "default",  "transient",
};

bool is_reserved(std::string_view word)
{
    return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

bool is_modifier(std::string_view word)
{
    return std::find(kModifiers.begin(), kModifiers.end(), word) != kModifiers.end();
}

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    TestMethod test_method()
    {
        check_balanced();
        TestMethod t;
        skip_annotations();
        std::size_t header_start = cur().offset;
        while (cur().kind == TokenKind::Ident && is_modifier(cur().text)) {
            ++pos_;
        }
        if (cur().is("<")) {
            skip_balanced("<", ">");
        }
        auto ret = try_type();
        if (!ret || cur().kind != TokenKind::Ident || is_reserved(cur().text)) {
            throw ParseError(header_start, "method header");
        }
        t.name = std::string(cur().text);
        ++pos_;
        if (!cur().is("(")) {
            throw ParseError(cur().offset, "'(' after method name");
        }
        skip_balanced("(", ")");
        t.throws = throws_clause();
        if (!cur().is("{")) {
            throw ParseError(cur().offset, "'{' opening method body");
        }
        ++pos_;
        t.statements = block_statements();
        if (t.statements.empty()) {
            throw ParseError(cur().offset, "at least one statement in method body");
        }
        std::size_t end_offset = cur().offset + 1;
        expect("}");
        if (cur().kind != TokenKind::End) {
            throw ParseError(cur().offset, "end of input after method body");
        }
        t.source_span = {header_start, end_offset};
        return t;
    }

    Expr standalone_expression()
    {
        check_balanced();
        try {
            Expr e = expression();
            if (cur().kind != TokenKind::End) {
                throw NoMatch{};
            }
            return e;
        } catch (const NoMatch&) {
            throw ParseError(cur().offset, "expression in supported subset");
        }
    }

    Statement standalone_statement()
    {
        check_balanced();
        if (cur().kind == TokenKind::End) {
            throw ParseError(cur().offset, "statement");
        }
        Statement s = statement();
        while (cur().is(";")) {
            ++pos_;
        }
        if (cur().kind != TokenKind::End) {
            throw ParseError(cur().offset, "end of input after statement");
        }
        return s;
    }

    UnitContext signature()
    {
        check_balanced();
        UnitContext ctx;
        skip_annotations();
        std::size_t start = cur().offset;
        while (cur().kind == TokenKind::Ident && is_modifier(cur().text)) {
            ctx.modifiers.emplace_back(cur().text);
            ++pos_;
        }
        std::string type_params;
        if (cur().is("<")) {
            std::size_t b = pos_;
            skip_balanced("<", ">");
            type_params = join_tokens(b, pos_);
        }
        auto ret = try_type();
        if (!ret) {
            throw ParseError(start, "return type");
        }
        if (cur().is("(")) {
            // a constructor: what we took for the return type is the name
            throw ParseError(cur().offset, "return type");
        }
        if (cur().kind != TokenKind::Ident || is_reserved(cur().text)) {
            throw ParseError(cur().offset, "method name");
        }
        ctx.return_type = *ret;
        ctx.method_name = std::string(cur().text);
        ++pos_;
        expect("(");
        while (!cur().is(")")) {
            skip_annotations();
            while (cur().is("final")) {
                ++pos_;
            }
            auto ptype = try_type();
            if (!ptype) {
                throw ParseError(cur().offset, "parameter type");
            }
            if (cur().is("...")) {
                *ptype += "...";
                ++pos_;
            }
            if (cur().kind != TokenKind::Ident || is_reserved(cur().text)) {
                throw ParseError(cur().offset, "parameter name");
            }
            ctx.params.push_back({*ptype, std::string(cur().text)});
            ++pos_;
            if (cur().is(",")) {
                ++pos_;
            } else if (!cur().is(")")) {
                throw ParseError(cur().offset, "',' or ')'");
            }
        }
        ++pos_;
        ctx.throws = throws_clause();
        if (!(cur().is("{") || cur().is(";") || cur().kind == TokenKind::End)) {
            throw ParseError(cur().offset, "method body, ';' or end of header");
        }

        std::string sig;
        for (const auto& m : ctx.modifiers) {
            sig += m + " ";
        }
        if (!type_params.empty()) {
            sig += type_params + " ";
        }
        sig += ctx.return_type + " " + ctx.method_name + "(";
        for (std::size_t i = 0; i < ctx.params.size(); ++i) {
            if (i > 0) {
                sig += ", ";
            }
            sig += ctx.params[i].type + " " + ctx.params[i].name;
        }
        sig += ")";
        if (!ctx.throws.empty()) {
            sig += " throws ";
            for (std::size_t i = 0; i < ctx.throws.size(); ++i) {
                sig += (i > 0 ? ", " : "") + ctx.throws[i];
            }
        }
        ctx.signature = std::move(sig);
        return ctx;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }

    void expect(std::string_view punct)
    {
        if (!cur().is(punct)) {
            throw ParseError(cur().offset, "'" + std::string(punct) + "'");
        }
        ++pos_;
    }

    void check_balanced() const
    {
        std::vector<const Token*> stack;
        for (const auto& tok : toks_) {
            if (tok.kind != TokenKind::Punct) {
                continue;
            }
            if (tok.text == "(" || tok.text == "[" || tok.text == "{") {
                stack.push_back(&tok);
            } else if (tok.text == ")" || tok.text == "]" || tok.text == "}") {
                char open = tok.text == ")" ? '(' : tok.text == "]" ? '[' : '{';
                if (stack.empty() || stack.back()->text[0] != open) {
                    throw ParseError(tok.offset, "matching bracket before '" + std::string(tok.text) + "'");
                }
                stack.pop_back();
            }
        }
        if (!stack.empty()) {
            throw ParseError(stack.back()->offset, "closing bracket for '" + std::string(stack.back()->text) + "'");
        }
    }

    void skip_balanced(std::string_view open, std::string_view close)
    {
        int depth = 0;
        do {
            if (cur().kind == TokenKind::End) {
                throw ParseError(cur().offset, "'" + std::string(close) + "'");
            }
            if (cur().is(open)) {
                ++depth;
            } else if (cur().is(close)) {
                --depth;
            }
            ++pos_;
        } while (depth > 0);
    }

    void skip_annotations()
    {
        while (cur().is("@") && ahead(1).kind == TokenKind::Ident && !ahead(1).is("interface")) {
            pos_ += 2;
            while (cur().is(".") && ahead(1).kind == TokenKind::Ident) {
                pos_ += 2;
            }
            if (cur().is("(")) {
                skip_balanced("(", ")");
            }
        }
    }

    std::vector<std::string> throws_clause()
    {
        std::vector<std::string> out;
        if (!cur().is("throws")) {
            return out;
        }
        ++pos_;
        while (true) {
            auto t = try_type();
            if (!t) {
                throw ParseError(cur().offset, "exception type after 'throws'");
            }
            out.push_back(*t);
            if (!cur().is(",")) {
                break;
            }
            ++pos_;
        }
        return out;
    }

    std::string join_tokens(std::size_t begin, std::size_t end) const
    {
        std::string out;
        for (std::size_t i = begin; i < end; ++i) {
            out += toks_[i].text;
            if (toks_[i].is(",")) {
                out += ' ';
            } else if (toks_[i].kind == TokenKind::Ident && i + 1 < end &&
                       toks_[i + 1].kind == TokenKind::Ident) {
                out += ' ';
            }
        }
        return out;
    }

    // Type := Name ('.' Name)* ('<' TypeArgs '>')? ('[' ']')*
    // Returns nullopt (position restored) when no type starts here.
    std::optional<std::string> try_type()
    {
        std::size_t save = pos_;
        if (cur().kind != TokenKind::Ident || is_reserved(cur().text)) {
            return std::nullopt;
        }
        std::string text(cur().text);
        ++pos_;
        while (cur().is(".") && ahead(1).kind == TokenKind::Ident && !is_reserved(ahead(1).text)) {
            text += ".";
            text += ahead(1).text;
            pos_ += 2;
        }
        if (cur().is("<")) {
            auto args = type_args();
            if (!args) {
                pos_ = save;
                return std::nullopt;
            }
            text += *args;
        }
        while (cur().is("[") && ahead(1).is("]")) {
            text += "[]";
            pos_ += 2;
        }
        return text;
    }

    std::optional<std::string> type_args()
    {
        std::string text = "<";
        ++pos_;
        if (cur().is(">")) { // diamond
            ++pos_;
            return std::string("<>");
        }
        while (true) {
            if (cur().is("?")) {
                text += "?";
                ++pos_;
                if (cur().is("extends") || cur().is("super")) {
                    text += " ";
                    text += cur().text;
                    text += " ";
                    ++pos_;
                    auto bound = try_type();
                    if (!bound) {
                        return std::nullopt;
                    }
                    text += *bound;
                }
            } else {
                auto arg = try_type();
                if (!arg) {
                    return std::nullopt;
                }
                text += *arg;
            }
            if (cur().is(",")) {
                text += ", ";
                ++pos_;
                continue;
            }
            if (cur().is(">")) {
                ++pos_;
                return text + ">";
            }
            return std::nullopt;
        }
    }

    std::vector<Statement> block_statements()
    {
        std::vector<Statement> out;
        while (!cur().is("}")) {
            if (cur().kind == TokenKind::End) {
                throw ParseError(cur().offset, "'}'");
            }
            if (cur().is(";")) {
                ++pos_;
                continue;
            }
            out.push_back(statement());
        }
        return out;
    }

    Statement statement()
    {
        std::size_t start = pos_;
        try {
            return structured_statement();
        } catch (const NoMatch&) {
            pos_ = start;
            return opaque_statement();
        }
    }

    Statement structured_statement()
    {
        if (cur().is("try")) {
            return try_catch();
        }
        if (cur().kind != TokenKind::Ident) {
            throw NoMatch{};
        }
        std::size_t start = pos_;
        bool is_final = false;
        if (cur().is("final")) {
            is_final = true;
            ++pos_;
        }
        if (auto type = try_type(); type && cur().kind == TokenKind::Ident && !is_reserved(cur().text) &&
                                    (ahead(1).is("=") || ahead(1).is(";"))) {
            VarDecl decl;
            decl.declared_type = *type;
            decl.name = std::string(cur().text);
            decl.is_final = is_final;
            ++pos_;
            if (cur().is("=")) {
                ++pos_;
                decl.init = expression();
            }
            expect_stmt_end();
            return {std::move(decl)};
        }
        if (is_final) {
            throw NoMatch{};
        }
        pos_ = start;
        if (!is_reserved(cur().text) && ahead(1).is("=")) {
            Assign assign;
            assign.target = std::string(cur().text);
            pos_ += 2;
            assign.value = expression();
            expect_stmt_end();
            return {std::move(assign)};
        }
        Expr e = expression();
        expect_stmt_end();
        if (const auto* call = e.as<MethodCall>()) {
            if (auto assert_call = as_assert_call(*call)) {
                return {AssertStmt{std::move(*assert_call)}};
            }
            return {ExprStmt{std::move(e)}};
        }
        if (e.as<NewObject>() != nullptr) {
            return {ExprStmt{std::move(e)}};
        }
        throw NoMatch{};
    }

    void expect_stmt_end()
    {
        if (!cur().is(";")) {
            throw NoMatch{};
        }
        ++pos_;
    }

    static std::optional<std::string> dotted_name(const Expr& e)
    {
        if (const auto* v = e.as<VarRef>()) {
            return v->name;
        }
        if (const auto* f = e.as<FieldAccess>()) {
            auto inner = dotted_name(*f->receiver);
            if (inner) {
                return *inner + "." + f->field;
            }
        }
        return std::nullopt;
    }

    static std::optional<AssertCall> as_assert_call(const MethodCall& call)
    {
        const bool assert_name = call.method.rfind("assert", 0) == 0 || call.method == "fail";
        if (!assert_name) {
            return std::nullopt;
        }
        std::string qualifier;
        if (call.receiver) {
            auto name = dotted_name(**call.receiver);
            if (!name) {
                return std::nullopt;
            }
            auto last = name->substr(name->rfind('.') == std::string::npos ? 0 : name->rfind('.') + 1);
            if (last.empty() || !std::isupper(static_cast<unsigned char>(last[0]))) {
                return std::nullopt;
            }
            qualifier = *name;
        }
        return AssertCall{qualifier, call.method, call.args};
    }

    Statement try_catch()
    {
        ++pos_; // try
        if (!cur().is("{")) {
            throw NoMatch{}; // try-with-resources
        }
        ++pos_;
        TryCatch tc;
        tc.body = block_statements();
        ++pos_; // }
        if (!cur().is("catch")) {
            throw NoMatch{};
        }
        ++pos_;
        if (!cur().is("(")) {
            throw NoMatch{};
        }
        ++pos_;
        while (cur().is("final")) {
            ++pos_;
        }
        auto type = try_type();
        if (!type || cur().kind != TokenKind::Ident || !ahead(1).is(")")) {
            throw NoMatch{}; // multi-catch and friends
        }
        tc.caught_type = *type;
        tc.catch_var = std::string(cur().text);
        pos_ += 2;
        if (!cur().is("{")) {
            throw NoMatch{};
        }
        ++pos_;
        tc.catch_body = block_statements();
        ++pos_; // }
        if (cur().is("catch") || cur().is("finally")) {
            throw NoMatch{};
        }
        return {std::move(tc)};
    }

    Statement opaque_statement()
    {
        std::size_t begin_tok = pos_;
        int depth = 0;
        while (true) {
            const Token& tok = cur();
            if (tok.kind == TokenKind::End) {
                throw ParseError(tok.offset, "';' or '}' ending statement");
            }
            if (tok.is("(") || tok.is("[") || tok.is("{")) {
                ++depth;
            } else if (tok.is(")") || tok.is("]") || tok.is("}")) {
                if (depth == 0) {
                    break; // enclosing block closes; statement ends before it
                }
                --depth;
                if (depth == 0 && tok.is("}")) {
                    const Token& next = ahead(1);
                    if (next.is("else") || next.is("catch") || next.is("finally") ||
                        (next.is("while") && toks_[begin_tok].is("do"))) {
                        ++pos_;
                        continue;
                    }
                    if (next.is(";")) {
                        ++pos_;
                    }
                    ++pos_;
                    break;
                }
            } else if (tok.is(";") && depth == 0) {
                ++pos_;
                break;
            }
            ++pos_;
        }
        if (pos_ == begin_tok) {
            throw ParseError(cur().offset, "statement");
        }
        const Token& last = toks_[pos_ - 1];
        std::size_t begin = toks_[begin_tok].offset;
        std::size_t end = last.offset + last.text.size();
        return {OpaqueStmt{std::string(src_.substr(begin, end - begin))}};
    }

    std::vector<Expr> arguments()
    {
        std::vector<Expr> args;
        ++pos_; // (
        if (cur().is(")")) {
            ++pos_;
            return args;
        }
        while (true) {
            args.push_back(expression());
            if (cur().is(",")) {
                ++pos_;
                continue;
            }
            if (cur().is(")")) {
                ++pos_;
                return args;
            }
            throw NoMatch{};
        }
    }

    Expr expression()
    {
        Expr e = unary();
        while (cur().is(".")) {
            if (e.as<Cast>() != nullptr) {
                throw NoMatch{}; // needs parentheses we do not model
            }
            ++pos_;
            if (cur().kind != TokenKind::Ident) {
                throw NoMatch{}; // generic method call, etc.
            }
            std::string member(cur().text);
            ++pos_;
            if (cur().is("(")) {
                MethodCall call;
                call.receiver = Box<Expr>(std::move(e));
                call.method = std::move(member);
                call.args = arguments();
                e = Expr{std::move(call)};
            } else {
                e = Expr{FieldAccess{Box<Expr>(std::move(e)), std::move(member)}};
            }
        }
        return e;
    }

    static bool starts_operand(const Token& tok)
    {
        switch (tok.kind) {
        case TokenKind::Ident:
            return !is_reserved(tok.text) || tok.text == "new" || tok.text == "super";
        case TokenKind::Int:
        case TokenKind::Long:
        case TokenKind::Float:
        case TokenKind::Double:
        case TokenKind::Char:
        case TokenKind::String:
            return true;
        default:
            return tok.is("(");
        }
    }

    static bool numeric(TokenKind k)
    {
        return k == TokenKind::Int || k == TokenKind::Long || k == TokenKind::Float || k == TokenKind::Double;
    }

    Expr unary()
    {
        if (cur().is("-") && numeric(ahead(1).kind) && ahead(1).offset == cur().offset + 1) {
            Literal lit = literal(ahead(1));
            lit.text = "-" + lit.text;
            pos_ += 2;
            return {std::move(lit)};
        }
        if (cur().is("(")) {
            ++pos_;
            auto type = try_type();
            if (!type || !cur().is(")")) {
                throw NoMatch{};
            }
            ++pos_;
            if (!(starts_operand(cur()) || (cur().is("-") && numeric(ahead(1).kind)))) {
                throw NoMatch{};
            }
            Expr operand = expression();
            return {Cast{*type, Box<Expr>(std::move(operand))}};
        }
        return primary();
    }

    static Literal literal(const Token& tok)
    {
        LiteralType type = LiteralType::Int;
        switch (tok.kind) {
        case TokenKind::Int: type = LiteralType::Int; break;
        case TokenKind::Long: type = LiteralType::Long; break;
        case TokenKind::Float: type = LiteralType::Float; break;
        case TokenKind::Double: type = LiteralType::Double; break;
        case TokenKind::Char: type = LiteralType::Char; break;
        case TokenKind::String: type = LiteralType::String; break;
        default:
            if (tok.text == "null") {
                type = LiteralType::Null;
            } else {
                type = LiteralType::Boolean;
            }
        }
        return {type, std::string(tok.text)};
    }

    Expr primary()
    {
        const Token& tok = cur();
        switch (tok.kind) {
        case TokenKind::Int:
        case TokenKind::Long:
        case TokenKind::Float:
        case TokenKind::Double:
        case TokenKind::Char:
        case TokenKind::String:
            ++pos_;
            return {literal(tok)};
        case TokenKind::Ident:
            break;
        default:
            throw NoMatch{};
        }
        if (tok.is("true") || tok.is("false") || tok.is("null")) {
            ++pos_;
            return {literal(tok)};
        }
        if (tok.is("new")) {
            ++pos_;
            auto type = try_type();
            if (!type || !cur().is("(")) {
                throw NoMatch{}; // arrays, anonymous generics, ...
            }
            NewObject obj;
            obj.type = *type;
            obj.args = arguments();
            if (cur().is("{")) {
                throw NoMatch{}; // anonymous class
            }
            return {std::move(obj)};
        }
        if (is_reserved(tok.text) && !tok.is("super")) {
            throw NoMatch{};
        }
        std::string name(tok.text);
        ++pos_;
        if (cur().is("(")) {
            MethodCall call;
            call.method = std::move(name);
            call.args = arguments();
            return {std::move(call)};
        }
        return {VarRef{std::move(name)}};
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

TestMethod parse_test_method(std::string_view source)
{
    return Parser(source, detail::lex(source)).test_method();
}

Expr parse_expression(std::string_view source)
{
    return Parser(source, detail::lex(source)).standalone_expression();
}

Statement parse_statement(std::string_view source)
{
    return Parser(source, detail::lex(source)).standalone_statement();
}

UnitContext parse_signature(std::string_view sig)
{
    return Parser(sig, detail::lex(sig)).signature();
}

std::optional<Literal> literal_from_text(std::string_view text)
{
    try {
        Expr e = parse_expression(text);
        if (const auto* lit = e.as<Literal>()) {
            return *lit;
        }
    } catch (const ParseError&) {
    }
    return std::nullopt;
}

} // namespace oracleforge::testlang
