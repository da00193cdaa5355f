#include "oracleforge/candidates.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace oracleforge::candidates {

using oracles::Equals;
using testlang::Statement;
using testlang::VarRef;

namespace {

const std::vector<GlobalEntry> kNoGlobalEntries;
const std::vector<Expr> kNoLocalEntries;

std::optional<testlang::LiteralType> literal_type_for(const std::string& type_name)
{
    using testlang::LiteralType;
    static const std::map<std::string, LiteralType> kTypes = {
        {"int", LiteralType::Int},         {"long", LiteralType::Long},   {"double", LiteralType::Double},
        {"float", LiteralType::Float},     {"boolean", LiteralType::Boolean}, {"char", LiteralType::Char},
        {"String", LiteralType::String},
    };
    auto it = kTypes.find(type_name);
    if (it == kTypes.end()) {
        return std::nullopt;
    }
    return it->second;
}

void add_local(LocalValueTable& table, const std::string& type, Expr value)
{
    auto& list = table.entries[type];
    if (std::find(list.begin(), list.end(), value) == list.end()) {
        list.push_back(std::move(value));
    }
}

void walk_expr(const Expr& e, LocalValueTable& table)
{
    std::visit(
        [&table](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Literal>) {
                add_local(table, testlang::literal_type_name(node), Expr{node});
            } else if constexpr (std::is_same_v<T, testlang::MethodCall>) {
                if (node.receiver) {
                    walk_expr(**node.receiver, table);
                }
                for (const auto& a : node.args) {
                    walk_expr(a, table);
                }
            } else if constexpr (std::is_same_v<T, testlang::FieldAccess>) {
                walk_expr(*node.receiver, table);
            } else if constexpr (std::is_same_v<T, testlang::NewObject>) {
                for (const auto& a : node.args) {
                    walk_expr(a, table);
                }
            } else if constexpr (std::is_same_v<T, testlang::Cast>) {
                walk_expr(*node.operand, table);
            }
        },
        e.node);
}

void walk_statements(const std::vector<Statement>& stmts, LocalValueTable& table,
                     const std::optional<std::string>& exclude)
{
    for (const auto& s : stmts) {
        if (const auto* d = s.as<testlang::VarDecl>()) {
            if (!exclude || d->name != *exclude) {
                add_local(table, testlang::erase_type(d->declared_type), Expr{VarRef{d->name}});
            }
            if (d->init) {
                walk_expr(*d->init, table);
            }
        } else if (const auto* a = s.as<testlang::Assign>()) {
            walk_expr(a->value, table);
        } else if (const auto* e = s.as<testlang::ExprStmt>()) {
            walk_expr(e->expr, table);
        } else if (const auto* tc = s.as<testlang::TryCatch>()) {
            walk_statements(tc->body, table, exclude);
            walk_statements(tc->catch_body, table, exclude);
        }
    }
}

} // namespace

GlobalConstantTable::GlobalConstantTable(std::size_t k, std::map<std::string, std::vector<GlobalEntry>> entries)
    : k_(k), entries_(std::move(entries))
{
}

const std::vector<GlobalEntry>& GlobalConstantTable::get(const std::string& erased_type) const
{
    auto it = entries_.find(erased_type);
    return it == entries_.end() ? kNoGlobalEntries : it->second;
}

GlobalConstantTable GlobalConstantTable::truncated(std::size_t k) const
{
    auto copy = entries_;
    for (auto& [type, list] : copy) {
        if (list.size() > k) {
            list.resize(k);
        }
    }
    return GlobalConstantTable(k, std::move(copy));
}

void GlobalConstantCounter::add(const AssertionForm& form)
{
    const auto* eq = std::get_if<Equals>(&form.form);
    if (eq == nullptr) {
        return;
    }
    const auto* lit = eq->expected.as<Literal>();
    if (lit == nullptr || lit->type == testlang::LiteralType::Null) {
        return;
    }
    ++counts_[testlang::literal_type_name(*lit)][lit->text];
}

void GlobalConstantCounter::merge(const GlobalConstantCounter& other)
{
    for (const auto& [type, texts] : other.counts_) {
        for (const auto& [text, n] : texts) {
            counts_[type][text] += n;
        }
    }
}

GlobalConstantTable GlobalConstantCounter::finish(std::size_t k) const
{
    std::map<std::string, std::vector<GlobalEntry>> entries;
    for (const auto& [type, texts] : counts_) {
        auto lit_type = literal_type_for(type);
        std::vector<GlobalEntry> list;
        for (const auto& [text, n] : texts) {
            list.push_back({Literal{lit_type.value_or(testlang::LiteralType::Int), text}, n});
        }
        std::stable_sort(list.begin(), list.end(), [](const GlobalEntry& a, const GlobalEntry& b) {
            if (a.count != b.count) {
                return a.count > b.count;
            }
            return a.value.text < b.value.text;
        });
        if (list.size() > k) {
            list.resize(k);
        }
        entries.emplace(type, std::move(list));
    }
    return GlobalConstantTable(k, std::move(entries));
}

GlobalConstantTable build_global_constant_table(const std::vector<AssertionForm>& corpus, std::size_t k)
{
    GlobalConstantCounter counter;
    for (const auto& form : corpus) {
        counter.add(form);
    }
    return counter.finish(k);
}

void write_vocab(std::ostream& out, const GlobalConstantTable& table)
{
    out << "oracle-forge-vocab v1 k=" << table.k() << "\n";
    for (const auto& [type, list] : table.entries()) {
        for (std::size_t rank = 0; rank < list.size(); ++rank) {
            out << type << '\t' << rank << '\t' << list[rank].value.text << '\t' << list[rank].count << '\n';
        }
    }
}

GlobalConstantTable read_vocab(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw VocabFormatError("vocab file is empty");
    }
    const std::string header = "oracle-forge-vocab v1 k=";
    if (line.rfind(header, 0) != 0) {
        throw VocabFormatError("bad vocab header: " + line);
    }
    std::size_t k = 0;
    try {
        std::size_t used = 0;
        k = std::stoull(line.substr(header.size()), &used);
        if (header.size() + used != line.size()) {
            throw VocabFormatError("bad k in vocab header: " + line);
        }
    } catch (const std::logic_error&) {
        throw VocabFormatError("bad k in vocab header: " + line);
    }

    std::map<std::string, std::vector<GlobalEntry>> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        auto where = " at line " + std::to_string(lineno);
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        auto t3 = line.rfind('\t');
        if (t2 == std::string::npos || t3 <= t2) {
            throw VocabFormatError("expected 4 tab-separated fields" + where);
        }
        std::string type = line.substr(0, t1);
        std::string text = line.substr(t2 + 1, t3 - t2 - 1);
        std::size_t rank = 0;
        std::size_t count = 0;
        try {
            rank = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
            count = std::stoull(line.substr(t3 + 1));
        } catch (const std::logic_error&) {
            throw VocabFormatError("bad rank or count" + where);
        }
        auto lit = testlang::literal_from_text(text);
        if (!lit || testlang::literal_type_name(*lit) != type) {
            throw VocabFormatError("literal '" + text + "' is not of type " + type + where);
        }
        auto& list = entries[type];
        if (rank != list.size()) {
            throw VocabFormatError("ranks must be consecutive from 0" + where);
        }
        if (list.size() >= k) {
            throw VocabFormatError("more than k entries for type " + type + where);
        }
        list.push_back({*lit, count});
    }
    return GlobalConstantTable(k, std::move(entries));
}

const std::vector<Expr>& LocalValueTable::get(const std::string& erased_type) const
{
    auto it = entries.find(erased_type);
    return it == entries.end() ? kNoLocalEntries : it->second;
}

LocalValueTable create_local_value_table(const TestPrefix& prefix, const std::optional<std::string>& exclude_var)
{
    LocalValueTable table;
    walk_statements(prefix.statements, table, exclude_var);
    return table;
}

std::string_view to_string(RetValKind kind)
{
    switch (kind) {
    case RetValKind::Boolean: return "boolean";
    case RetValKind::PrimitiveNonBoolean: return "primitive-non-boolean";
    case RetValKind::Object: return "object";
    }
    return "object";
}

std::string_view to_string(Provenance p)
{
    switch (p) {
    case Provenance::Structural: return "structural";
    case Provenance::Global: return "global";
    case Provenance::Local: return "local";
    }
    return "structural";
}

RetVal extract_ret_val(const TestPrefix& prefix)
{
    if (prefix.empty()) {
        throw NoAssignment("empty prefix");
    }
    const auto& last = prefix.statements.back();
    RetVal rv;
    if (const auto* d = last.as<testlang::VarDecl>(); d != nullptr && d->init) {
        rv.var_name = d->name;
        rv.declared_type = d->declared_type;
    } else if (const auto* a = last.as<testlang::Assign>()) {
        rv.var_name = a->target;
        for (auto it = prefix.statements.rbegin(); it != prefix.statements.rend(); ++it) {
            if (const auto* decl = it->as<testlang::VarDecl>(); decl != nullptr && decl->name == a->target) {
                rv.declared_type = decl->declared_type;
                break;
            }
        }
        if (rv.declared_type.empty()) {
            throw NoAssignment("assigned variable '" + a->target + "' has no declaration in the prefix");
        }
    } else {
        throw NoAssignment("last statement is not an assignment: " + testlang::render_statement(last));
    }
    const auto& t = rv.declared_type;
    if (t == "boolean") {
        rv.kind = RetValKind::Boolean;
    } else if (testlang::is_primitive_type(t)) {
        rv.kind = RetValKind::PrimitiveNonBoolean;
    } else {
        rv.kind = RetValKind::Object;
    }
    return rv;
}

bool CandidateSet::contains(const AssertionForm& form) const
{
    return std::any_of(candidates.begin(), candidates.end(), [&](const Candidate& c) { return c.form == form; });
}

std::vector<std::string> CandidateSet::rendered() const
{
    std::vector<std::string> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(oracles::render_assertion(c.form));
    }
    return out;
}

CandidateSet create_candidate_templates(const GlobalConstantTable& global, std::size_t k, const TestPrefix& prefix)
{
    const RetVal ret = extract_ret_val(prefix);
    CandidateSet cs;
    if (ret.declared_type == "void") {
        return cs;
    }
    const Expr ret_expr{VarRef{ret.var_name}};
    auto add = [&cs](AssertionForm form, Provenance p, std::optional<std::size_t> rank) {
        if (!cs.contains(form)) {
            cs.candidates.push_back({std::move(form), p, rank});
        }
    };

    if (ret.kind == RetValKind::Object) {
        add({oracles::NotNull{ret_expr}}, Provenance::Structural, std::nullopt);
        add({oracles::Null{ret_expr}}, Provenance::Structural, std::nullopt);
    } else if (ret.kind == RetValKind::Boolean) {
        add({oracles::True{ret_expr}}, Provenance::Structural, std::nullopt);
        add({oracles::False{ret_expr}}, Provenance::Structural, std::nullopt);
    }

    const std::string type = testlang::erase_type(ret.declared_type);
    const auto& globals = global.get(type);
    for (std::size_t rank = 0; rank < std::min(k, globals.size()); ++rank) {
        add({Equals{Expr{globals[rank].value}, ret_expr}}, Provenance::Global, rank);
    }

    const auto local = create_local_value_table(prefix, ret.var_name);
    for (const auto& value : local.get(type)) {
        add({Equals{value, ret_expr}}, Provenance::Local, std::nullopt);
    }
    return cs;
}

} // namespace oracleforge::candidates
