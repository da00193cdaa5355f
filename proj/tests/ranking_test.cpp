#include "oracleforge/datasets.hpp"
#include "oracleforge/ranking.hpp"

#include "alg1_reference.hpp"
#include "fixture_util.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace oracleforge;
using namespace oracleforge::ranking;
using nlohmann::json;
namespace fx = oracleforge::testing;

namespace {

TestPrefix prefix_of(const std::string& body)
{
    return oracles::strip_oracles(testlang::parse_test_method("public void t() {\n" + body + "\n}")).prefix;
}

UnitContext context(const std::string& signature, const std::string& doc = "")
{
    return datasets::strip_implementation(signature, doc);
}

double exception_score(const std::string& body, const UnitContext& c)
{
    auto p = prefix_of(body);
    return builtin_heuristic_score(ScoreRequest{Task::Exception, &p, &c, nullptr});
}

Candidate candidate(const std::string& text, candidates::Provenance prov, std::optional<std::size_t> rank = {})
{
    auto stmt = testlang::parse_statement(text);
    auto form = oracles::classify_assertion(stmt.as<testlang::AssertStmt>()->call);
    return Candidate{std::get<oracles::InGrammar>(form).form, prov, rank};
}

// Scores candidates by a fixed table; everything else gets 0.
class TableScorer : public Scorer {
public:
    explicit TableScorer(std::vector<double> scores) : scores_(std::move(scores)) {}
    std::vector<double> score(const std::vector<ScoreRequest>& rs) override
    {
        std::vector<double> out;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            out.push_back(rs[i].task == Task::Exception ? exception_ : scores_.at(i));
        }
        return out;
    }
    std::string name() const override { return "table"; }
    double exception_ = 0;

private:
    std::vector<double> scores_;
};

class FailingScorer : public Scorer {
public:
    std::vector<double> score(const std::vector<ScoreRequest>&) override { throw ScorerUnavailable("down"); }
    std::string name() const override { return "failing"; }
};

candidates::GlobalConstantTable table_for(const std::vector<fx::GenCorpusEntry>& corpus, std::size_t k)
{
    candidates::GlobalConstantCounter counter;
    for (const auto& e : corpus) {
        auto stmt = testlang::parse_statement("assertEquals(" + e.text + ", x);");
        counter.add(std::get<oracles::InGrammar>(oracles::classify_assertion(stmt.as<testlang::AssertStmt>()->call)).form);
    }
    return counter.finish(k);
}

} // namespace

TEST(DocstringMentionsThrow, Tokens)
{
    EXPECT_TRUE(docstring_mentions_throw("@throws IOException when closed"));
    EXPECT_TRUE(docstring_mentions_throw("This method Throws if empty"));
    EXPECT_TRUE(docstring_mentions_throw("may throw."));
    EXPECT_TRUE(docstring_mentions_throw("raises an IllegalArgumentException"));
    EXPECT_TRUE(docstring_mentions_throw("see exception"));
    EXPECT_FALSE(docstring_mentions_throw("Removes the value stored at the given position."));
    EXPECT_FALSE(docstring_mentions_throw("throwable objects are thrown elsewhere"));
    EXPECT_FALSE(docstring_mentions_throw(""));
}

TEST(HeuristicScore, ExceptionTask)
{
    auto plain = context("public void removeValue(int i)", "/** Removes a value. */");
    EXPECT_DOUBLE_EQ(exception_score("kv.removeValue(0);", plain), 0.2);
    EXPECT_DOUBLE_EQ(exception_score("kv.removeValue(-1);", plain), 0.4);
    EXPECT_DOUBLE_EQ(exception_score("kv.other(-1);", plain), 0.2);
    EXPECT_DOUBLE_EQ(exception_score("kv.put(null);", plain), 0.4);
    EXPECT_DOUBLE_EQ(exception_score("kv.put((String) null);", plain), 0.4);

    auto documented = context("public static Number createNumber(String str)", "/** @throws NumberFormatException */");
    EXPECT_DOUBLE_EQ(exception_score("NumberUtils.createNumber(\"0XT\");", documented), 0.7);
    EXPECT_NEAR(exception_score("NumberUtils.createNumber(null);", documented), 0.9, 1e-12);

    auto pos = context("public E get(int pos)", "/** @throws IndexOutOfBoundsException */");
    EXPECT_NEAR(exception_score("list.get(-3);", pos), 0.9, 1e-12);

    HeuristicWeights heavy;
    heavy.exception_prior = 0.9;
    auto p = prefix_of("kv.put(null);");
    EXPECT_DOUBLE_EQ(builtin_heuristic_score(ScoreRequest{Task::Exception, &p, &documented, nullptr}, heavy), 1.0);
}

TEST(HeuristicScore, AssertionTask)
{
    auto p = prefix_of("int int0 = kv.itemCount();");
    auto c = context("public int itemCount()");
    auto score = [&](const Candidate& cand) {
        return builtin_heuristic_score(ScoreRequest{Task::Assertion, &p, &c, &cand});
    };
    EXPECT_DOUBLE_EQ(score(candidate("assertEquals(0, int0);", candidates::Provenance::Global, 0)), 0.5);
    EXPECT_DOUBLE_EQ(score(candidate("assertEquals(1, int0);", candidates::Provenance::Global, 1)), 0.4);
    EXPECT_DOUBLE_EQ(score(candidate("assertEquals(2, int0);", candidates::Provenance::Local)), 0.5);
    EXPECT_DOUBLE_EQ(score(candidate("assertNotNull(int0);", candidates::Provenance::Structural)), 0.4);
    EXPECT_THROW(builtin_heuristic_score(ScoreRequest{Task::Assertion, &p, &c, nullptr}), std::invalid_argument);
}

TEST(RankWithScores, StableDescending)
{
    CandidateSet cs;
    cs.candidates = {candidate("assertEquals(0, x);", candidates::Provenance::Global, 0),
                     candidate("assertEquals(1, x);", candidates::Provenance::Global, 1),
                     candidate("assertEquals(2, x);", candidates::Provenance::Local)};
    auto ranked = rank_with_scores(cs, {0.5, 0.9, 0.5});
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(oracles::render_assertion(ranked[0].candidate.form), "assertEquals(1, x)");
    EXPECT_EQ(oracles::render_assertion(ranked[1].candidate.form), "assertEquals(0, x)");
    EXPECT_EQ(oracles::render_assertion(ranked[2].candidate.form), "assertEquals(2, x)");
    EXPECT_THROW(rank_with_scores(cs, {0.5}), ProtocolError);

    auto p = prefix_of("int x = f();");
    auto c = context("public int f()");
    HeuristicScorer h;
    EXPECT_THROW(rank_assertions(p, c, CandidateSet{}, h), std::invalid_argument);
}

TEST(RankerConfig, Validation)
{
    RankerConfig ok;
    EXPECT_NO_THROW(ok.validate());
    RankerConfig bad;
    bad.threshold = 1.5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.threshold = std::nan("");
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    RankerConfig cut;
    cut.exception_cutoff = -0.1;
    EXPECT_THROW(cut.validate(), std::invalid_argument);
}

TEST(CheckedScore, Range)
{
    EXPECT_EQ(checked_score(0.0), 0.0);
    EXPECT_EQ(checked_score(1.0), 1.0);
    EXPECT_THROW(checked_score(1.0000001), std::invalid_argument);
    EXPECT_THROW(checked_score(-0.1), std::invalid_argument);
    EXPECT_THROW(checked_score(std::nan("")), std::invalid_argument);
}

TEST(DocumentedExceptionType, TagThenThrowsClause)
{
    EXPECT_EQ(documented_exception_type(context("public void f()", "/** @throws IllegalStateException if closed */")),
              std::optional<std::string>("IllegalStateException"));
    EXPECT_EQ(documented_exception_type(context("public void f()", "/** @exception java.io.IOException x */")),
              std::optional<std::string>("java.io.IOException"));
    EXPECT_EQ(documented_exception_type(context("public void f() throws IOException, SQLException", "/** x */")),
              std::optional<std::string>("IOException"));
    EXPECT_EQ(documented_exception_type(context("public void f()", "/** may throw */")), std::nullopt);
}

TEST(InferOracle, KeyedValuesPicksZero)
{
    auto raw = datasets::parse_raw_sample(fx::read_lines(fx::fixture_path("keyed_values.jsonl")).at(0));
    auto test = testlang::parse_test_method(raw.test);
    auto p = oracles::strip_oracles(test).prefix;
    auto c = datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name);
    std::istringstream vin(fx::read_fixture("fixture.vocab"));
    auto g = candidates::read_vocab(vin);
    HeuristicScorer h;
    auto r = infer_oracle(p, c, RankerConfig{}, h, g);
    EXPECT_EQ(r.decision, Decision::AssertionOracle);
    ASSERT_TRUE(r.assertion);
    EXPECT_EQ(oracles::render_assertion(*r.assertion), "assertEquals(0, int0)");
    EXPECT_DOUBLE_EQ(r.assertion_score, 0.5);
    EXPECT_DOUBLE_EQ(r.exception_score, 0.2);

    RankerConfig strict;
    strict.threshold = 1.0;
    auto none = infer_oracle(p, c, strict, h, g);
    EXPECT_EQ(none.decision, Decision::PrefixOnly);
    EXPECT_EQ(none.note, "below-threshold");
    EXPECT_EQ(render_inferred(p, none, "t"), oracles::prefix_test(p, "t"));
}

TEST(InferOracle, CreateNumberIsExceptional)
{
    auto raw = datasets::parse_raw_sample(fx::read_lines(fx::fixture_path("create_number.jsonl")).at(0));
    auto p = oracles::strip_oracles(testlang::parse_test_method(raw.test)).prefix;
    auto c = datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name);
    HeuristicScorer h;
    auto r = infer_oracle(p, c, RankerConfig{}, h, candidates::GlobalConstantTable{});
    EXPECT_EQ(r.decision, Decision::ExceptionOracle);
    EXPECT_DOUBLE_EQ(r.exception_score, 0.7);
    EXPECT_EQ(r.exception_type, std::optional<std::string>("NumberFormatException"));
    EXPECT_EQ(testlang::render_test_method(render_inferred(p, r, "testCreateNumber")),
              fx::read_fixture("golden/create_number.java"));

    RankerConfig high;
    high.exception_cutoff = 0.71;
    EXPECT_NE(infer_oracle(p, c, high, h, candidates::GlobalConstantTable{}).decision, Decision::ExceptionOracle);
}

TEST(InferOracle, Notes)
{
    HeuristicScorer h;
    auto c = context("public void f()");
    EXPECT_EQ(infer_oracle(prefix_of("f();"), c, RankerConfig{}, h, {}).note, "no-assignment");
    EXPECT_EQ(infer_oracle(prefix_of("int x = f();"), c, RankerConfig{}, h, {}).note, "no-candidates");
}

TEST(InferOracle, ThresholdIsMonotone)
{
    // Raising the threshold only ever turns assertions into prefix-only results.
    std::mt19937_64 rng(11);
    auto c = context("public int compute(Object arg)");
    auto corpus = fx::random_corpus(rng);
    HeuristicScorer h;
    for (int i = 0; i < 200; ++i) {
        auto gp = fx::random_prefix(rng);
        auto p = prefix_of(gp.source);
        for (std::size_t k : {0u, 2u, 8u}) {
            auto g = table_for(corpus, k);
            bool previously_prefix_only = false;
            for (double theta : {0.0, 0.3, 0.4, 0.45, 0.5, 0.6, 1.0}) {
                RankerConfig cfg;
                cfg.threshold = theta;
                cfg.k = k;
                auto r = infer_oracle(p, c, cfg, h, g);
                bool prefix_only = r.decision == Decision::PrefixOnly;
                EXPECT_FALSE(previously_prefix_only && !prefix_only) << gp.source;
                previously_prefix_only = prefix_only;
            }
        }
    }
}

TEST(InferOracle, DeterministicAndExceptionOverridesAssertion)
{
    auto raw = datasets::parse_raw_sample(fx::read_lines(fx::fixture_path("keyed_values.jsonl")).at(0));
    auto p = oracles::strip_oracles(testlang::parse_test_method(raw.test)).prefix;
    auto c = datasets::strip_implementation(raw.focal_method, raw.docstring, raw.class_name);
    HeuristicScorer h;
    auto a = to_json(infer_oracle(p, c, RankerConfig{}, h, {}));
    auto b = to_json(infer_oracle(p, c, RankerConfig{}, h, {}));
    EXPECT_EQ(a.dump(), b.dump());

    TableScorer t({0.1, 0.2, 0.3});
    t.exception_ = 0.5;
    auto r = infer_oracle(p, c, RankerConfig{}, t, {});
    EXPECT_EQ(r.decision, Decision::ExceptionOracle);
    EXPECT_TRUE(r.ranked.empty());
}

TEST(FallbackScorer, DegradesOnceAndStays)
{
    FallbackScorer f(std::make_unique<FailingScorer>(), std::make_unique<HeuristicScorer>());
    auto p = prefix_of("f();");
    auto c = context("public void f()");
    EXPECT_FALSE(f.degraded());
    auto s = f.score({ScoreRequest{Task::Exception, &p, &c, nullptr}});
    EXPECT_TRUE(f.degraded());
    EXPECT_EQ(s, std::vector<double>{0.2});
    EXPECT_EQ(f.name(), "failing+heuristic");
}

TEST(ScorerSpec, Parsing)
{
    EXPECT_EQ(parse_scorer_spec("heuristic").kind, "heuristic");
    auto exec = parse_scorer_spec("exec:python3 serve.py");
    EXPECT_EQ(exec.kind, "external");
    EXPECT_EQ(exec.external.endpoint, "exec:python3 serve.py");
    EXPECT_EQ(parse_scorer_spec("tcp:127.0.0.1:9000").kind, "external");
    EXPECT_EQ(parse_scorer_spec("http://localhost:8080/score").kind, "external");
    EXPECT_THROW(parse_scorer_spec("exec:"), std::invalid_argument);
    EXPECT_THROW(parse_scorer_spec("transformer"), std::invalid_argument);
}

TEST(ProtocolFrames, RequestShape)
{
    auto p = prefix_of("Stack s = new Stack();\ns.pop();");
    auto c = context("public Object pop()", "/** Pops. */");
    auto exc = request_frame(7, ScoreRequest{Task::Exception, &p, &c, nullptr});
    EXPECT_EQ(exc, json::parse(R"j({"id":7,"v":1,"task":"exception","prefix":"Stack s = new Stack();\ns.pop();\n",
                                   "signature":"public Object pop()","docstring":"/** Pops. */"})j"));
    auto cand = candidate("assertTrue(b);", candidates::Provenance::Structural);
    auto as = request_frame(8, ScoreRequest{Task::Assertion, &p, &c, &cand});
    EXPECT_EQ(as["task"], "assertion");
    EXPECT_EQ(as["candidate"], "assertTrue(b)");
}

TEST(ProtocolFrames, ResponseValidation)
{
    auto ok = parse_response_frame(R"({"id":3,"score":0.25})");
    EXPECT_EQ(ok.id, 3u);
    EXPECT_EQ(ok.score, std::optional<double>(0.25));
    auto err = parse_response_frame(R"({"id":4,"error":"bad frame"})");
    EXPECT_EQ(err.error, std::optional<std::string>("bad frame"));
    for (const char* bad : {"nope", "[]", R"({"score":0.5})", R"({"id":-1,"score":0.5})", R"({"id":1,"score":1.5})",
                            R"({"id":1,"score":-0.5})", R"({"id":1,"score":"high"})", R"({"id":1})"}) {
        EXPECT_THROW(parse_response_frame(bad), ProtocolError) << bad;
    }
}
