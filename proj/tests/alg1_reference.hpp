#pragma once

// Random prefixes described as plain data, and a second implementation of the
// candidate template procedure that works only from that description. It does
// not call into the library, so agreement with create_candidate_templates is
// meaningful.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracleforge::testing {

struct GenValue {
    std::string type_key; // "int", "String", "boolean", "Widget", "long", "nulltype"
    std::string text;     // literal text or variable name
};

struct GenPrefix {
    std::string source;              // a complete test method
    std::string ret_declared_type;   // as written
    std::vector<GenValue> appearance; // every local value in textual order, ret var excluded
};

struct GenCorpusEntry {
    std::string type_key;
    std::string text;
};

// Declared types the generator uses for the returned value, with their
// erased lookup key and kind.
struct RetTypeInfo {
    std::string declared;
    std::string key;
    enum Kind { Boolean, Primitive, Object } kind;
};

inline const std::vector<RetTypeInfo>& ret_types()
{
    static const std::vector<RetTypeInfo> kTypes = {
        {"boolean", "boolean", RetTypeInfo::Boolean}, {"int", "int", RetTypeInfo::Primitive},
        {"Integer", "int", RetTypeInfo::Object},      {"String", "String", RetTypeInfo::Object},
        {"Widget", "Widget", RetTypeInfo::Object},    {"List<String>", "List", RetTypeInfo::Object},
        {"long", "long", RetTypeInfo::Primitive},     {"Boolean", "boolean", RetTypeInfo::Object},
    };
    return kTypes;
}

inline std::string random_literal(std::mt19937_64& rng, const std::string& key)
{
    std::uniform_int_distribution<int> small(-3, 12);
    if (key == "int") {
        return std::to_string(small(rng));
    }
    if (key == "long") {
        return std::to_string(small(rng)) + "L";
    }
    if (key == "boolean") {
        return rng() % 2 ? "true" : "false";
    }
    if (key == "String") {
        static const char* kWords[] = {"\"a\"", "\"foo\"", "\"\"", "\"x y\"", "\"0XT\""};
        return kWords[rng() % 5];
    }
    return "null";
}

inline GenPrefix random_prefix(std::mt19937_64& rng)
{
    static const std::vector<std::string> kLocalKeys = {"int", "String", "boolean", "Widget", "long", "nulltype"};
    static const std::map<std::string, std::vector<std::string>> kDeclSpellings = {
        {"int", {"int", "Integer"}},     {"String", {"String", "java.lang.String"}},
        {"boolean", {"boolean"}},        {"Widget", {"Widget", "com.acme.Widget"}},
        {"long", {"long", "Long"}},
    };

    GenPrefix g;
    const auto& rt = ret_types()[rng() % ret_types().size()];
    g.ret_declared_type = rt.declared;
    const bool split_assign = rng() % 4 == 0;

    std::string body;
    if (split_assign) {
        body += "  " + rt.declared + " result;\n";
    }
    body += "  Target target = new Target();\n";
    // `target` is a declared local of type Target.
    g.appearance.push_back({"Target", "target"});

    const int n_values = static_cast<int>(rng() % 7);
    int var_counter = 0;
    for (int i = 0; i < n_values; ++i) {
        const auto& key = kLocalKeys[rng() % kLocalKeys.size()];
        const bool as_var = key != "nulltype" && rng() % 2 == 0;
        if (as_var) {
            const auto& spellings = kDeclSpellings.at(key);
            std::string type = spellings[rng() % spellings.size()];
            std::string name = "v" + std::to_string(var_counter++);
            g.appearance.push_back({key, name});
            if (key == "Widget") {
                body += "  " + type + " " + name + " = new Widget();\n";
            } else {
                std::string lit = random_literal(rng, key);
                body += "  " + type + " " + name + " = " + lit + ";\n";
                g.appearance.push_back({key, lit});
            }
        } else {
            std::string lit = random_literal(rng, key);
            body += "  target.use(" + lit + ");\n";
            g.appearance.push_back({lit == "null" ? "nulltype" : key, lit});
        }
    }

    std::string arg;
    if (rng() % 3 == 0) {
        arg = random_literal(rng, rng() % 2 ? "int" : "String");
        g.appearance.push_back({arg[0] == '"' ? "String" : "int", arg});
    }
    if (split_assign) {
        body += "  result = target.compute(" + arg + ");\n";
    } else {
        body += "  " + rt.declared + " result = target.compute(" + arg + ");\n";
    }
    g.source = "public void testGenerated() {\n" + body + "  assertNotNull(target);\n}\n";
    return g;
}

inline std::vector<GenCorpusEntry> random_corpus(std::mt19937_64& rng)
{
    std::vector<GenCorpusEntry> corpus;
    const int n = 20 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
        static const std::vector<std::string> kKeys = {"int", "int", "int", "String", "boolean", "long"};
        const auto& key = kKeys[rng() % kKeys.size()];
        corpus.push_back({key, random_literal(rng, key)});
    }
    return corpus;
}

// Expected candidates, rendered, for a prefix ending in `result = ...`.
inline std::vector<std::string> reference_candidates(const GenPrefix& g, const std::vector<GenCorpusEntry>& corpus,
                                                     std::size_t k)
{
    const RetTypeInfo* rt = nullptr;
    for (const auto& t : ret_types()) {
        if (t.declared == g.ret_declared_type) {
            rt = &t;
        }
    }
    std::vector<std::string> out;
    auto push = [&out](const std::string& s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(s);
        }
    };
    if (rt->kind == RetTypeInfo::Object) {
        push("assertNotNull(result)");
        push("assertNull(result)");
    } else if (rt->kind == RetTypeInfo::Boolean) {
        push("assertTrue(result)");
        push("assertFalse(result)");
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& e : corpus) {
        if (e.type_key == rt->key && e.text != "null") {
            ++counts[e.text];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        push("assertEquals(" + ranked[i].first + ", result)");
    }
    for (const auto& v : g.appearance) {
        if (v.type_key == rt->key) {
            push("assertEquals(" + v.text + ", result)");
        }
    }
    return out;
}

} // namespace oracleforge::testing
