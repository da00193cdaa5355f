#include "fixture_util.hpp"

#include "oracleforge/oracles.hpp"

#include <gtest/gtest.h>

using namespace oracleforge::oracles;
using namespace oracleforge::testlang;
using oracleforge::testing::grammar_fixtures;

namespace {

AssertCall call_of(const std::string& text)
{
    auto s = parse_statement(text);
    const auto* a = s.as<AssertStmt>();
    if (a == nullptr) {
        throw std::runtime_error("not an assertion: " + text);
    }
    return a->call;
}

Expr ex(const std::string& text) { return parse_expression(text); }

TestPrefix prefix_of(const std::vector<std::string>& lines)
{
    TestPrefix p;
    for (const auto& l : lines) {
        p.statements.push_back(parse_statement(l));
    }
    return p;
}

std::optional<OutOfGrammarReason> reason_of(const Classification& c)
{
    if (const auto* o = std::get_if<OutOfGrammar>(&c)) {
        return o->reason;
    }
    return std::nullopt;
}

bool contains_oracle_construct(const std::vector<Statement>& stmts)
{
    for (const auto& s : stmts) {
        if (s.as<AssertStmt>() != nullptr) {
            return true;
        }
        if (const auto* tc = s.as<TryCatch>()) {
            if (tc->has_fail_call() || contains_oracle_construct(tc->body) ||
                contains_oracle_construct(tc->catch_body)) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

TEST(ClassifyAssertion, ReferenceExamples)
{
    auto t = classify_assertion(call_of("assertTrue(s.isEmpty());"));
    ASSERT_TRUE(std::holds_alternative<InGrammar>(t));
    EXPECT_EQ(std::get<InGrammar>(t).form, (AssertionForm{True{ex("s.isEmpty()")}}));

    EXPECT_EQ(reason_of(classify_assertion(call_of("assertThat(x, is(4));"))),
              OutOfGrammarReason::UnsupportedMethod);
    EXPECT_EQ(reason_of(classify_assertion(call_of("assertEquals(id1.hashCode(), id2.hashCode());"))),
              OutOfGrammarReason::ExpectedNotConstOrVar);
}

TEST(ClassifyAssertion, EqualsCanonicalizesConstantFirst)
{
    auto c = classify_assertion(call_of("assertEquals(x.size(), 4);"));
    ASSERT_TRUE(std::holds_alternative<InGrammar>(c));
    EXPECT_EQ(std::get<InGrammar>(c).form, (AssertionForm{Equals{ex("4"), ex("x.size()")}}));
    EXPECT_EQ(render_assertion(std::get<InGrammar>(c).form), "assertEquals(4, x.size())");

    auto v = classify_assertion(call_of("assertEquals(a, b);"));
    EXPECT_EQ(std::get<InGrammar>(v).form, (AssertionForm{Equals{ex("a"), ex("b")}}));
}

TEST(ClassifyAssertion, ArityAndDeltaForm)
{
    EXPECT_EQ(reason_of(classify_assertion(call_of("assertEquals(1.0, x, 0.01);"))), OutOfGrammarReason::Arity);
    EXPECT_EQ(reason_of(classify_assertion(call_of("assertTrue(\"msg\", b);"))), OutOfGrammarReason::Arity);
    EXPECT_EQ(reason_of(classify_assertion(call_of("assertNull();"))), OutOfGrammarReason::Arity);
}

TEST(ClassifyAssertion, ExhaustivePartition)
{
    const std::vector<std::string> supported = {"assertEquals", "assertTrue", "assertFalse", "assertNull",
                                                "assertNotNull"};
    const std::vector<std::string> others = {"assertThat", "assertSame", "assertNotSame", "assertArrayEquals",
                                             "assertNotEquals", "fail", "assertEqual", "asserttrue"};
    for (const auto& name : supported) {
        AssertCall c{"", name, {ex("x")}};
        if (name == "assertEquals") {
            c.args.push_back(ex("y"));
        }
        EXPECT_TRUE(std::holds_alternative<InGrammar>(classify_assertion(c))) << name;
    }
    for (const auto& name : others) {
        for (std::size_t n = 0; n <= 3; ++n) {
            AssertCall c{"", name, std::vector<Expr>(n, ex("x"))};
            EXPECT_EQ(reason_of(classify_assertion(c)), OutOfGrammarReason::UnsupportedMethod) << name;
        }
    }
}

TEST(StripOracles, StackPopExceptional)
{
    auto t = parse_test_method(R"(public void testPopEmpty() {
  try {
    Stack s = new Stack();
    s.pop();
    Assert.fail();
  } catch (Exception e) {
  }
})");
    auto r = strip_oracles(t);
    EXPECT_EQ(r.kind, StripKind::ExpectedException);
    EXPECT_EQ(r.prefix, prefix_of({"Stack s = new Stack();", "s.pop();"}));
    ASSERT_EQ(r.oracles.size(), 1u);
    EXPECT_EQ(r.oracles[0], (Oracle{ExpectedException{}}));
    EXPECT_EQ(r.per_oracle_prefixes.size(), 1u);
}

TEST(StripOracles, StackPopRegular)
{
    auto t = parse_test_method(R"(public void testPop() {
  Stack s = new Stack();
  s.push(1);
  s.pop();
  assertTrue(s.isEmpty());
})");
    auto r = strip_oracles(t);
    EXPECT_EQ(r.kind, StripKind::Assertions);
    EXPECT_EQ(r.prefix.statements.size(), 3u);
    ASSERT_EQ(r.oracles.size(), 1u);
    EXPECT_EQ(r.oracles[0], (Oracle{AssertionForm{True{ex("s.isEmpty()")}}}));
}

TEST(StripOracles, PerAssertionPrefixes)
{
    auto t = parse_test_method(R"(public void testMultipleAssertions() {
  Account a = new Account("alice");
  assertNotNull(a);
  int b = a.getBalance();
  assertEquals(0, b);
})");
    auto r = strip_oracles(t);
    ASSERT_EQ(r.per_oracle_prefixes.size(), 2u);
    EXPECT_EQ(r.per_oracle_prefixes[0].prefix, prefix_of({"Account a = new Account(\"alice\");"}));
    EXPECT_EQ(r.per_oracle_prefixes[1].prefix,
              prefix_of({"Account a = new Account(\"alice\");", "int b = a.getBalance();"}));
    EXPECT_EQ(r.per_oracle_prefixes[1].oracle, (Oracle{AssertionForm{Equals{ex("0"), ex("b")}}}));
}

TEST(StripOracles, TypedExceptionSources)
{
    auto verified = strip_oracles(parse_test_method(R"(public void testStack() {
  try {
    NumberUtils.createNumber("0XT");
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, NumberFormatException);
  }
})"));
    EXPECT_EQ(verified.oracles[0], (Oracle{ExpectedException{"NumberFormatException"}}));

    auto caught = strip_oracles(parse_test_method(R"(public void testIt() {
  try {
    it.next();
    fail();
  } catch (NoSuchElementException ex) {
  }
})"));
    EXPECT_EQ(caught.oracles[0], (Oracle{ExpectedException{"NoSuchElementException"}}));
}

TEST(StripOracles, OutOfGrammarIsRejectedNotOracle)
{
    auto r = strip_oracles(parse_test_method(R"(public void testX() {
  Foo f = new Foo();
  assertThat(f, notNullValue());
  assertEquals(f.a(), f.b());
})"));
    EXPECT_EQ(r.kind, StripKind::Assertions);
    EXPECT_TRUE(r.oracles.empty());
    ASSERT_EQ(r.rejected.size(), 2u);
    EXPECT_EQ(r.rejected[0].reason, OutOfGrammarReason::UnsupportedMethod);
    EXPECT_EQ(r.rejected[1].reason, OutOfGrammarReason::ExpectedNotConstOrVar);
}

TEST(StripOracles, NoOracle)
{
    auto r = strip_oracles(parse_test_method("public void testN(){ Foo f = new Foo(); f.run(); }"));
    EXPECT_EQ(r.kind, StripKind::NoOracle);
    EXPECT_TRUE(r.oracles.empty());
    EXPECT_EQ(r.prefix.statements.size(), 2u);
}

TEST(StripOracles, ExclusivityAndPurityOnFixtures)
{
    for (const auto& f : grammar_fixtures()) {
        SCOPED_TRACE(f.id);
        auto r = strip_oracles(parse_test_method(f.source));
        ASSERT_FALSE(r.oracles.empty());
        bool any_exc = false;
        bool any_assert = false;
        for (const auto& o : r.oracles) {
            (o.is_exception() ? any_exc : any_assert) = true;
        }
        EXPECT_FALSE(any_exc && any_assert);
        EXPECT_FALSE(contains_oracle_construct(r.prefix.statements));
        for (const auto& po : r.per_oracle_prefixes) {
            EXPECT_FALSE(contains_oracle_construct(po.prefix.statements));
        }
        if (any_exc) {
            EXPECT_EQ(r.per_oracle_prefixes.size(), 1u);
        } else {
            EXPECT_EQ(r.per_oracle_prefixes.size(), r.oracles.size());
        }
        bool is_exc_category = f.category.rfind("exception", 0) == 0;
        EXPECT_EQ(any_exc, is_exc_category);
        EXPECT_EQ(f.category == "multi", r.oracles.size() > 1);
    }
}

TEST(RenderOracleTest, KeyedValuesAssertion)
{
    auto p = prefix_of({"KeyedValues kv;", "kv = new KeyedValues();", "Short short0 = new Short((short) 2);",
                        "kv.insertValue(0, short0, 2);", "kv.removeValue(0);"});
    auto t = render_oracle_test(p, Oracle{AssertionForm{Equals{ex("0"), ex("kv.itemCount()")}}}, "testKeyedValues");
    auto text = render_test_method(t);
    EXPECT_NE(text.find("  assertEquals(0, kv.itemCount());\n}\n"), std::string::npos) << text;
}

TEST(RenderOracleTest, CreateNumberShape)
{
    auto p = prefix_of({"NumberUtils.createNumber(\"0XT\");"});
    auto t = render_oracle_test(p, Oracle{ExpectedException{"NumberFormatException"}}, "test0");
    EXPECT_EQ(render_test_method(t), R"(public void test0() {
  try {
    NumberUtils.createNumber("0XT");
    fail("expecting exception");
  } catch (Exception e) {
    verifyException(e, NumberFormatException);
  }
}
)");
}

TEST(RenderOracleTest, UnspecifiedExceptionHasEmptyCatch)
{
    auto t = render_oracle_test(prefix_of({"Stack s = new Stack();", "s.pop();"}), Oracle{ExpectedException{}},
                                "test1");
    EXPECT_NE(render_test_method(t).find("} catch (Exception e) {\n  }\n"), std::string::npos);
}

TEST(RenderOracleTest, CatchVariableAvoidsPrefixNames)
{
    auto t = render_oracle_test(prefix_of({"Event e = new Event();", "e.fire();"}),
                                Oracle{ExpectedException{"IllegalStateException"}}, "test2");
    auto text = render_test_method(t);
    EXPECT_NE(text.find("catch (Exception e0)"), std::string::npos) << text;
    EXPECT_NE(text.find("verifyException(e0, IllegalStateException)"), std::string::npos) << text;
}

TEST(RenderOracleTest, Errors)
{
    EXPECT_THROW(render_oracle_test(TestPrefix{}, Oracle{ExpectedException{}}, "t"), InvalidOracle);
    auto p = prefix_of({"Foo f = new Foo();"});
    EXPECT_THROW(render_oracle_test(p, Oracle{AssertionForm{True{ex("g.ok()")}}}, "t"), InvalidOracle);
    EXPECT_THROW(render_oracle_test(p, Oracle{AssertionForm{Equals{ex("y"), ex("f.get()")}}}, "t"), InvalidOracle);
    // Static receivers are class names, not variables.
    EXPECT_NO_THROW(render_oracle_test(p, Oracle{AssertionForm{True{ex("Foo.ready(f)")}}}, "t"));
}

TEST(RenderOracleTest, InversionOnFixtures)
{
    std::size_t checked = 0;
    for (const auto& f : grammar_fixtures()) {
        SCOPED_TRACE(f.id);
        auto r = strip_oracles(parse_test_method(f.source));
        for (const auto& po : r.per_oracle_prefixes) {
            if (po.prefix.empty()) {
                continue;
            }
            auto rendered = render_oracle_test(po.prefix, po.oracle, "test" + std::to_string(checked));
            auto reparsed = parse_test_method(render_test_method(rendered));
            EXPECT_EQ(reparsed, rendered);
            auto back = strip_oracles(reparsed);
            EXPECT_EQ(back.prefix, po.prefix);
            EXPECT_EQ(back.oracles, std::vector<Oracle>{po.oracle});
            ++checked;
        }
    }
    EXPECT_GE(checked, 50u);
}

TEST(NormalizeTestName, Examples)
{
    auto t = parse_test_method("public void testThrowsException(){ Foo f = new Foo(); f.run(); }");
    auto n3 = normalize_test_name(t, 3);
    EXPECT_EQ(n3.name, "test3");
    EXPECT_EQ(n3.statements, t.statements);

    auto t0 = parse_test_method("public void test0(){ int x = 1; }");
    EXPECT_EQ(normalize_test_name(t0, 0), t0);
}

TEST(NormalizeTestName, OnlyNameTokenChanges)
{
    for (const auto& f : grammar_fixtures()) {
        auto t = parse_test_method(f.source);
        auto before = render_test_method(t);
        auto after = render_test_method(normalize_test_name(t, 7));
        auto pos = before.find(t.name + "(");
        ASSERT_NE(pos, std::string::npos);
        EXPECT_EQ(after, before.substr(0, pos) + "test7" + before.substr(pos + t.name.size())) << f.id;
    }
}

TEST(LabelException, Examples)
{
    EXPECT_EQ(label_exception(parse_test_method(
                  "public void t(){ try { Stack s = new Stack(); s.pop(); Assert.fail(); } catch (Exception e) { } }")),
              1);
    EXPECT_EQ(label_exception(parse_test_method(
                  "public void t(){ Stack s = new Stack(); s.push(1); s.pop(); assertTrue(s.isEmpty()); }")),
              0);
    EXPECT_EQ(label_exception(parse_test_method("public void t(){ Foo f = new Foo(); }")), 0);
    // A try/catch without fail() is not an expected-exception oracle.
    EXPECT_EQ(label_exception(parse_test_method("public void t(){ try { f(); } catch (Exception e) { } }")), 0);
}
