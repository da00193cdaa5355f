#include "oracleforge/ast_json.hpp"
#include "oracleforge/candidates.hpp"
#include "oracleforge/datasets.hpp"
#include "oracleforge/evalharness.hpp"
#include "oracleforge/oracles.hpp"
#include "oracleforge/ranking.hpp"
#include "oracleforge/testlang.hpp"

#include "cli.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace oracleforge;
using nlohmann::json;

namespace {

py::object to_py(const json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::handle& o)
{
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

const char* kind_name(oracles::StripKind k)
{
    switch (k) {
    case oracles::StripKind::ExpectedException:
        return "expected-exception";
    case oracles::StripKind::Assertions:
        return "assertions";
    case oracles::StripKind::NoOracle:
        return "no-oracle";
    }
    return "";
}

candidates::GlobalConstantTable vocab_from_text(const std::string& text)
{
    if (text.empty()) {
        return {};
    }
    std::istringstream in(text);
    return candidates::read_vocab(in);
}

std::string prefix_text(const oracles::TestPrefix& p)
{
    return testlang::render_statements(p.statements, 0);
}

py::object strip(const std::string& source)
{
    auto r = oracles::strip_oracles(testlang::parse_test_method(source));
    json oracles_out = json::array();
    for (const auto& o : r.oracles) {
        oracles_out.push_back(to_json(o));
    }
    json rejected = json::array();
    for (const auto& x : r.rejected) {
        rejected.push_back({{"assertion", testlang::render_assert_call(x.call)},
                            {"reason", std::string(oracles::to_string(x.reason))}});
    }
    return to_py({{"kind", kind_name(r.kind)},
                  {"prefix", prefix_text(r.prefix)},
                  {"oracles", oracles_out},
                  {"rejected", rejected},
                  {"nested_assertions_removed", r.nested_assertions_removed}});
}

std::vector<std::string> candidates_for(const std::string& test, const std::string& vocab, std::size_t k)
{
    auto prefix = oracles::strip_oracles(testlang::parse_test_method(test)).prefix;
    return candidates::create_candidate_templates(vocab_from_text(vocab), k, prefix).rendered();
}

py::object infer(const std::string& test, const std::string& focal_method, const std::string& docstring,
                 const std::string& class_name, const std::string& vocab, double threshold, std::size_t k,
                 double exception_cutoff, const std::string& scorer, bool fallback_heuristic, int timeout_ms)
{
    ranking::RankerConfig cfg{threshold, k, exception_cutoff};
    cfg.validate();
    auto spec = ranking::parse_scorer_spec(scorer);
    spec.fallback_heuristic = fallback_heuristic;
    spec.external.timeout_ms = timeout_ms;
    auto table = vocab_from_text(vocab);
    auto method = testlang::parse_test_method(test);
    auto prefix = oracles::strip_oracles(method).prefix;
    auto context = datasets::strip_implementation(focal_method, docstring, class_name);

    json out;
    {
        py::gil_scoped_release nogil;
        auto s = ranking::make_scorer(spec);
        auto r = ranking::infer_oracle(prefix, context, cfg, *s, table);
        out = {{"result", ranking::to_json(r)},
               {"test", testlang::render_test_method(ranking::render_inferred(prefix, r, method.name))}};
    }
    return to_py(out);
}

std::string build_vocab(const std::vector<std::string>& lines, std::size_t k, unsigned jobs)
{
    std::ostringstream joined;
    for (const auto& l : lines) {
        joined << l << '\n';
    }
    std::istringstream in(joined.str());
    std::ostringstream out;
    {
        py::gil_scoped_release nogil;
        candidates::write_vocab(out, datasets::build_vocab(in, k, datasets::BuildOptions{jobs}));
    }
    return out.str();
}

evalharness::Outcome outcome(const std::string& s)
{
    if (s == "pass") {
        return evalharness::Outcome::Pass;
    }
    if (s == "fail") {
        return evalharness::Outcome::Fail;
    }
    throw std::invalid_argument("outcome must be \"pass\" or \"fail\", got \"" + s + "\"");
}

py::object aggregate(const py::list& records)
{
    evalharness::MetricsReport m;
    for (const auto& r : records) {
        m.add(evalharness::parse_execution_record(from_py(r).dump()));
    }
    m.finish();
    return to_py(m.to_json());
}

py::object coverage(const std::vector<std::string>& assertions)
{
    evalharness::CoverageReport c;
    for (const auto& a : assertions) {
        c.add_text(a);
    }
    auto j = c.to_json();
    return to_py(j);
}

py::tuple run_cli(const std::vector<std::string>& args, const std::string& input)
{
    std::istringstream in(input);
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release nogil;
        code = cli::run(args, in, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Test oracle generation: parsing, candidates, ranking and evaluation";

    auto base = py::register_exception<ranking::ScorerError>(m, "ScorerError");
    py::register_exception<ranking::ScorerUnavailable>(m, "ScorerUnavailable", base.ptr());
    py::register_exception<ranking::ProtocolError>(m, "ProtocolError", base.ptr());
    py::register_exception<testlang::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<candidates::VocabFormatError>(m, "VocabFormatError", PyExc_ValueError);
    py::register_exception<evalharness::BadRecord>(m, "BadRecord", PyExc_ValueError);

    m.def("parse_test", [](const std::string& s) { return to_py(to_json(testlang::parse_test_method(s))); },
          py::arg("source"));
    m.def("render_test", [](const std::string& s) { return testlang::render_test_method(testlang::parse_test_method(s)); },
          py::arg("source"));
    m.def("strip_oracles", &strip, py::arg("source"));
    m.def("candidates", &candidates_for, py::arg("test"), py::arg("vocab") = "", py::arg("k") = 8);
    m.def("infer", &infer, py::arg("test"), py::arg("focal_method"), py::arg("docstring") = "",
          py::arg("class_name") = "", py::arg("vocab") = "", py::arg("threshold") = 0.5, py::arg("k") = 8,
          py::arg("exception_cutoff") = 0.5, py::arg("scorer") = "heuristic", py::arg("fallback_heuristic") = false,
          py::arg("timeout_ms") = 10000);
    m.def("build_vocab", &build_vocab, py::arg("lines"), py::arg("k") = 8, py::arg("jobs") = 1);
    m.def("judge",
          [](const std::string& buggy, const std::string& fixed) {
              return std::string(evalharness::to_string(evalharness::judge(outcome(buggy), outcome(fixed))));
          },
          py::arg("buggy"), py::arg("fixed"));
    m.def("aggregate", &aggregate, py::arg("records"));
    m.def("coverage", &coverage, py::arg("assertions"));
    m.def("classification_metrics",
          [](const std::vector<int>& p, const std::vector<int>& t) {
              return to_py(evalharness::classification_metrics(p, t).to_json());
          },
          py::arg("predicted"), py::arg("truth"));
    m.def("weighted_coin", &evalharness::weighted_coin, py::arg("n"), py::arg("q_negative"), py::arg("seed") = 0);
    m.def("canonical_whitespace", [](const std::string& s) { return evalharness::canonical_whitespace(s); },
          py::arg("text"));
    m.def("run_cli", &run_cli, py::arg("args"), py::arg("input") = "");

    m.attr("__version__") = "0.1.0";
}
