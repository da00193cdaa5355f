#include "oracleforge/ranking.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>

namespace oracleforge::ranking {

using nlohmann::json;
using testlang::Expr;
using testlang::Literal;
using testlang::LiteralType;
using testlang::MethodCall;

std::string_view to_string(Task t)
{
    return t == Task::Exception ? "exception" : "assertion";
}

std::string_view to_string(Decision d)
{
    switch (d) {
    case Decision::ExceptionOracle: return "exception";
    case Decision::AssertionOracle: return "assertion";
    case Decision::PrefixOnly: return "prefix-only";
    }
    return "prefix-only";
}

double checked_score(double v)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("score " + std::to_string(v) + " is outside [0, 1]");
    }
    return v;
}

double report_round(double v)
{
    return std::round(v * 1e6) / 1e6;
}

namespace {

bool is_index_name(const std::string& n)
{
    return n == "i" || n == "index" || n == "pos";
}

bool negative_int_literal(const Expr& e)
{
    const auto* lit = e.as<Literal>();
    return lit != nullptr && (lit->type == LiteralType::Int || lit->type == LiteralType::Long) &&
           !lit->text.empty() && lit->text[0] == '-';
}

// Looks for a null argument anywhere, or a negative literal passed to an
// index-like parameter of the focal method.
struct ArgumentScan {
    const UnitContext& ctx;
    bool null_argument = false;
    bool negative_index = false;

    void args(const std::vector<Expr>& list)
    {
        for (const auto& a : list) {
            const Expr* inner = &a;
            while (const auto* c = inner->as<testlang::Cast>()) {
                inner = &*c->operand;
            }
            if (const auto* lit = inner->as<Literal>(); lit != nullptr && lit->type == LiteralType::Null) {
                null_argument = true;
            }
            expr(a);
        }
    }

    void expr(const Expr& e)
    {
        std::visit(
            [this](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, MethodCall>) {
                    if (node.receiver) {
                        expr(**node.receiver);
                    }
                    if (node.method == ctx.method_name) {
                        for (std::size_t i = 0; i < node.args.size() && i < ctx.params.size(); ++i) {
                            if (is_index_name(ctx.params[i].name) && negative_int_literal(node.args[i])) {
                                negative_index = true;
                            }
                        }
                    }
                    args(node.args);
                } else if constexpr (std::is_same_v<T, testlang::NewObject>) {
                    args(node.args);
                } else if constexpr (std::is_same_v<T, testlang::FieldAccess>) {
                    expr(*node.receiver);
                } else if constexpr (std::is_same_v<T, testlang::Cast>) {
                    expr(*node.operand);
                }
            },
            e.node);
    }

    void statements(const std::vector<testlang::Statement>& stmts)
    {
        for (const auto& s : stmts) {
            if (const auto* d = s.as<testlang::VarDecl>(); d != nullptr && d->init) {
                expr(*d->init);
            } else if (const auto* a = s.as<testlang::Assign>()) {
                expr(a->value);
            } else if (const auto* x = s.as<testlang::ExprStmt>()) {
                expr(x->expr);
            } else if (const auto* tc = s.as<testlang::TryCatch>()) {
                statements(tc->body);
            }
        }
    }
};

std::string throws_tag_type(std::string_view doc)
{
    for (std::string_view tag : {"@throws", "@exception"}) {
        auto pos = doc.find(tag);
        if (pos == std::string_view::npos) {
            continue;
        }
        pos += tag.size();
        while (pos < doc.size() && std::isspace(static_cast<unsigned char>(doc[pos]))) {
            ++pos;
        }
        std::size_t end = pos;
        while (end < doc.size() && (std::isalnum(static_cast<unsigned char>(doc[end])) || doc[end] == '_' ||
                                    doc[end] == '.' || doc[end] == '$')) {
            ++end;
        }
        if (end > pos) {
            return std::string(doc.substr(pos, end - pos));
        }
    }
    return {};
}

} // namespace

bool docstring_mentions_throw(std::string_view doc)
{
    std::string token;
    auto flush = [&token]() {
        bool hit = token == "@throws" || token == "throws" || token == "throw" ||
                   (token.size() >= 9 && token.compare(token.size() - 9, 9, "exception") == 0);
        token.clear();
        return hit;
    };
    for (char ch : doc) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || ch == '@' || ch == '_') {
            token += static_cast<char>(std::tolower(c));
        } else if (flush()) {
            return true;
        }
    }
    return flush();
}

double builtin_heuristic_score(const ScoreRequest& r, const HeuristicWeights& w)
{
    if (r.task == Task::Exception) {
        double s = w.exception_prior;
        if (r.context != nullptr && docstring_mentions_throw(r.context->docstring)) {
            s += w.doc_throws;
        }
        if (r.prefix != nullptr && r.context != nullptr) {
            ArgumentScan scan{*r.context};
            scan.statements(r.prefix->statements);
            if (scan.null_argument || scan.negative_index) {
                s += w.suspicious_argument;
            }
        }
        return std::min(1.0, s);
    }
    if (r.candidate == nullptr) {
        throw std::invalid_argument("assertion scoring needs a candidate");
    }
    double s = 0;
    switch (r.candidate->provenance) {
    case candidates::Provenance::Local: s = w.local; break;
    case candidates::Provenance::Global: s = w.global; break;
    case candidates::Provenance::Structural: s = w.structural; break;
    }
    if (r.candidate->global_rank) {
        s += w.rank_bonus / (1.0 + static_cast<double>(*r.candidate->global_rank));
    }
    return std::min(1.0, s);
}

std::vector<double> HeuristicScorer::score(const std::vector<ScoreRequest>& requests)
{
    std::vector<double> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
        out.push_back(builtin_heuristic_score(r, w_));
    }
    return out;
}

json request_frame(std::uint64_t id, const ScoreRequest& r)
{
    json j;
    j["id"] = id;
    j["v"] = 1;
    j["task"] = to_string(r.task);
    j["prefix"] = r.prefix ? testlang::render_statements(r.prefix->statements, 0) : "";
    j["signature"] = r.context ? r.context->signature : "";
    j["docstring"] = r.context ? r.context->docstring : "";
    if (r.task == Task::Assertion && r.candidate != nullptr) {
        j["candidate"] = oracles::render_assertion(r.candidate->form);
    }
    return j;
}

ResponseFrame parse_response_frame(std::string_view line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error&) {
        throw ProtocolError("scorer sent a frame that is not JSON: " + std::string(line.substr(0, 200)));
    }
    if (!j.is_object()) {
        throw ProtocolError("scorer frame is not an object");
    }
    auto id = j.find("id");
    if (id == j.end() || !id->is_number_unsigned()) {
        throw ProtocolError("scorer frame has no unsigned id");
    }
    ResponseFrame f;
    f.id = id->get<std::uint64_t>();
    if (auto err = j.find("error"); err != j.end()) {
        f.error = err->is_string() ? err->get<std::string>() : err->dump();
        return f;
    }
    auto score = j.find("score");
    if (score == j.end() || !score->is_number()) {
        throw ProtocolError("scorer frame " + std::to_string(f.id) + " has neither score nor error");
    }
    double v = score->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ProtocolError("scorer frame " + std::to_string(f.id) + " has score " + score->dump() +
                            " outside [0, 1]");
    }
    f.score = v;
    return f;
}

FallbackScorer::FallbackScorer(std::unique_ptr<Scorer> primary, std::unique_ptr<Scorer> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback))
{
}

std::vector<double> FallbackScorer::score(const std::vector<ScoreRequest>& requests)
{
    {
        std::lock_guard lock(mu_);
        if (degraded_) {
            return fallback_->score(requests);
        }
    }
    try {
        return primary_->score(requests);
    } catch (const ScorerError& e) {
        std::lock_guard lock(mu_);
        if (!degraded_) {
            std::cerr << "warning: " << primary_->name() << " scorer failed (" << e.what()
                      << "); using " << fallback_->name() << " from here on\n";
            degraded_ = true;
        }
    }
    return fallback_->score(requests);
}

std::string FallbackScorer::name() const
{
    return primary_->name() + "+" + fallback_->name();
}

bool FallbackScorer::degraded() const
{
    std::lock_guard lock(mu_);
    return degraded_;
}

ScorerSpec parse_scorer_spec(const std::string& text)
{
    ScorerSpec spec;
    if (text == "heuristic" || text.empty()) {
        return spec;
    }
    if (text.rfind("exec:", 0) == 0 || text.rfind("tcp:", 0) == 0 || text.rfind("http://", 0) == 0) {
        if (text.rfind("exec:", 0) == 0 && text.size() == 5) {
            throw std::invalid_argument("scorer 'exec:' needs a command");
        }
        spec.kind = "external";
        spec.external.endpoint = text;
        return spec;
    }
    throw std::invalid_argument("unknown scorer '" + text + "' (expected heuristic, exec:<cmd>, tcp:<host>:<port> "
                                "or http://<host>:<port>)");
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec)
{
    if (spec.kind == "heuristic") {
        return std::make_unique<HeuristicScorer>(spec.seed);
    }
    auto external = std::make_unique<ExternalScorer>(spec.external);
    if (spec.fallback_heuristic) {
        return std::make_unique<FallbackScorer>(std::move(external), std::make_unique<HeuristicScorer>(spec.seed));
    }
    return external;
}

void RankerConfig::validate() const
{
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must be in [0, 1], got " + std::to_string(threshold));
    }
    if (!(exception_cutoff >= 0.0 && exception_cutoff <= 1.0)) {
        throw std::invalid_argument("exception_cutoff must be in [0, 1], got " + std::to_string(exception_cutoff));
    }
}

ExceptionDecision classify_exception(const TestPrefix& p, const UnitContext& c, Scorer& s, const RankerConfig& cfg)
{
    ScoreRequest r{Task::Exception, &p, &c, nullptr};
    auto scores = s.score({r});
    if (scores.size() != 1) {
        throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for 1 request");
    }
    ExceptionDecision d;
    d.score = scores[0];
    d.label = d.score >= cfg.exception_cutoff ? 1 : 0;
    return d;
}

std::vector<RankedCandidate> rank_with_scores(const CandidateSet& cs, const std::vector<double>& scores)
{
    if (scores.size() != cs.size()) {
        throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(cs.size()) + " candidates");
    }
    std::vector<RankedCandidate> ranked;
    ranked.reserve(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
        ranked.push_back({cs.candidates[i], scores[i]});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) { return a.score > b.score; });
    return ranked;
}

std::vector<RankedCandidate> rank_assertions(const TestPrefix& p, const UnitContext& c, const CandidateSet& cs,
                                             Scorer& s)
{
    if (cs.empty()) {
        throw std::invalid_argument("cannot rank an empty candidate set");
    }
    std::vector<ScoreRequest> requests;
    requests.reserve(cs.size());
    for (const auto& cand : cs.candidates) {
        requests.push_back({Task::Assertion, &p, &c, &cand});
    }
    return rank_with_scores(cs, s.score(requests));
}

std::optional<std::string> documented_exception_type(const UnitContext& c)
{
    auto tag = throws_tag_type(c.docstring);
    if (!tag.empty()) {
        return tag;
    }
    if (!c.throws.empty()) {
        return c.throws.front();
    }
    return std::nullopt;
}

InferenceResult infer_oracle(const TestPrefix& p, const UnitContext& c, const RankerConfig& cfg, Scorer& s,
                             const candidates::GlobalConstantTable& g)
{
    InferenceResult r;
    auto exc = classify_exception(p, c, s, cfg);
    r.exception_score = exc.score;
    if (exc.label == 1) {
        r.decision = Decision::ExceptionOracle;
        r.exception_type = documented_exception_type(c);
        return r;
    }
    CandidateSet cs;
    try {
        cs = candidates::create_candidate_templates(g, cfg.k, p);
    } catch (const candidates::NoAssignment&) {
        r.note = "no-assignment";
        return r;
    }
    if (cs.empty()) {
        r.note = "no-candidates";
        return r;
    }
    r.ranked = rank_assertions(p, c, cs, s);
    const auto& top = r.ranked.front();
    if (top.score >= cfg.threshold) {
        r.decision = Decision::AssertionOracle;
        r.assertion = top.candidate.form;
        r.assertion_score = top.score;
    } else {
        r.note = "below-threshold";
    }
    return r;
}

oracles::Oracle to_oracle(const InferenceResult& r)
{
    if (r.decision == Decision::ExceptionOracle) {
        return oracles::Oracle{oracles::ExpectedException{r.exception_type}};
    }
    if (r.decision == Decision::AssertionOracle && r.assertion) {
        return oracles::Oracle{*r.assertion};
    }
    throw std::logic_error("a prefix-only result carries no oracle");
}

testlang::TestMethod render_inferred(const TestPrefix& p, const InferenceResult& r, const std::string& name)
{
    if (r.decision == Decision::PrefixOnly) {
        return oracles::prefix_test(p, name);
    }
    return oracles::render_oracle_test(p, to_oracle(r), name);
}

json to_json(const InferenceResult& r)
{
    json j;
    j["decision"] = to_string(r.decision);
    j["exception_score"] = report_round(r.exception_score);
    if (r.decision == Decision::ExceptionOracle) {
        j["exception_type"] = r.exception_type ? json(*r.exception_type) : json(nullptr);
    }
    if (r.assertion) {
        j["assertion"] = oracles::render_assertion(*r.assertion);
        j["score"] = report_round(r.assertion_score);
    }
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    j["ranked"] = json::array();
    for (const auto& rc : r.ranked) {
        json e;
        e["candidate"] = oracles::render_assertion(rc.candidate.form);
        e["provenance"] = candidates::to_string(rc.candidate.provenance);
        e["score"] = report_round(rc.score);
        j["ranked"].push_back(std::move(e));
    }
    return j;
}

} // namespace oracleforge::ranking
