#pragma once

// Two-stage oracle inference: an exception classifier, then a ranker over the
// candidate assertions with a confidence threshold.

#include "oracleforge/candidates.hpp"
#include "oracleforge/oracles.hpp"
#include "oracleforge/testlang.hpp"

#include "json.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracleforge::ranking {

using candidates::Candidate;
using candidates::CandidateSet;
using oracles::AssertionForm;
using oracles::TestPrefix;
using testlang::UnitContext;

enum class Task { Exception, Assertion };

std::string_view to_string(Task t);

class ScorerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The endpoint cannot be reached, died, or timed out.
class ScorerUnavailable : public ScorerError {
public:
    using ScorerError::ScorerError;
};

// The endpoint answered with something that breaks the protocol.
class ProtocolError : public ScorerError {
public:
    using ScorerError::ScorerError;
};

// Throws std::invalid_argument unless 0 <= v <= 1.
double checked_score(double v);

struct ScoreRequest {
    Task task = Task::Exception;
    const TestPrefix* prefix = nullptr;
    const UnitContext* context = nullptr;
    const Candidate* candidate = nullptr; // assertion task only
};

class Scorer {
public:
    virtual ~Scorer() = default;

    // One score per request, in request order.
    virtual std::vector<double> score(const std::vector<ScoreRequest>& requests) = 0;
    virtual std::string name() const = 0;
};

struct HeuristicWeights {
    double exception_prior = 0.2;
    double doc_throws = 0.5;
    double suspicious_argument = 0.2;
    double local = 0.5;
    double global = 0.3;
    double structural = 0.4;
    double rank_bonus = 0.2; // divided by 1 + global rank
};

// Exception task: prior, plus a bonus when the docstring mentions throwing,
// plus a bonus for a null argument or a negative literal passed to a focal
// parameter named i, index or pos. Assertion task: provenance weight plus a
// rank bonus for global constants.
double builtin_heuristic_score(const ScoreRequest& r, const HeuristicWeights& w = {});

// True when a lower-cased docstring token is @throws, throws, throw or ends in
// "exception".
bool docstring_mentions_throw(std::string_view docstring);

class HeuristicScorer : public Scorer {
public:
    explicit HeuristicScorer(std::uint64_t seed = 0, HeuristicWeights w = {}) : seed_(seed), w_(w) {}

    std::vector<double> score(const std::vector<ScoreRequest>& requests) override;
    std::string name() const override { return "heuristic"; }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_; // the heuristic is deterministic; kept for the binding descriptor
    HeuristicWeights w_;
};

struct ExternalOptions {
    std::string endpoint;    // exec:<command> | tcp:<host>:<port> | http://<host>:<port>[/path]
    int timeout_ms = 10000;  // per response
    unsigned max_in_flight = 16;
};

// Protocol v1 frames.
nlohmann::json request_frame(std::uint64_t id, const ScoreRequest& r);

struct ResponseFrame {
    std::uint64_t id = 0;
    std::optional<double> score;
    std::optional<std::string> error;
};

// Throws ProtocolError on malformed frames or scores outside [0, 1].
ResponseFrame parse_response_frame(std::string_view line);

class ExternalScorer : public Scorer {
public:
    explicit ExternalScorer(ExternalOptions opts);
    ~ExternalScorer() override;

    std::vector<double> score(const std::vector<ScoreRequest>& requests) override;
    std::string name() const override { return "external"; }

    class Transport;

private:
    ExternalOptions opts_;
    std::mutex mu_;
    std::unique_ptr<Transport> transport_;
    std::uint64_t next_id_ = 1;
};

// Uses `primary` until it raises ScorerError, then `fallback` from then on.
class FallbackScorer : public Scorer {
public:
    FallbackScorer(std::unique_ptr<Scorer> primary, std::unique_ptr<Scorer> fallback);

    std::vector<double> score(const std::vector<ScoreRequest>& requests) override;
    std::string name() const override;

    bool degraded() const;

private:
    std::unique_ptr<Scorer> primary_;
    std::unique_ptr<Scorer> fallback_;
    mutable std::mutex mu_;
    bool degraded_ = false;
};

struct ScorerSpec {
    std::string kind = "heuristic"; // "heuristic" or "external"
    ExternalOptions external;
    bool fallback_heuristic = false;
    std::uint64_t seed = 0;
};

// Accepts "heuristic", or an endpoint string as in ExternalOptions.
ScorerSpec parse_scorer_spec(const std::string& text);
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec);

struct RankerConfig {
    double threshold = 0.5;
    std::size_t k = 8;
    double exception_cutoff = 0.5;

    // Throws std::invalid_argument naming the bad field.
    void validate() const;
};

struct ExceptionDecision {
    int label = 0;
    double score = 0;
};

ExceptionDecision classify_exception(const TestPrefix& p, const UnitContext& c, Scorer& s, const RankerConfig& cfg);

struct RankedCandidate {
    Candidate candidate;
    double score = 0;
};

// Descending score; ties keep candidate-set order. Throws std::invalid_argument
// on an empty set.
std::vector<RankedCandidate> rank_assertions(const TestPrefix& p, const UnitContext& c, const CandidateSet& cs,
                                             Scorer& s);

// Ranks with already computed scores.
std::vector<RankedCandidate> rank_with_scores(const CandidateSet& cs, const std::vector<double>& scores);

enum class Decision { ExceptionOracle, AssertionOracle, PrefixOnly };

std::string_view to_string(Decision d);

struct InferenceResult {
    Decision decision = Decision::PrefixOnly;
    std::optional<AssertionForm> assertion;
    double assertion_score = 0;
    std::vector<RankedCandidate> ranked;
    double exception_score = 0;
    std::optional<std::string> exception_type; // for ExceptionOracle
    std::string note;                          // e.g. "no-assignment", "below-threshold"
};

// Exception type named by the first @throws/@exception tag of the docstring,
// else the first type of the signature's throws clause.
std::optional<std::string> documented_exception_type(const UnitContext& c);

InferenceResult infer_oracle(const TestPrefix& p, const UnitContext& c, const RankerConfig& cfg, Scorer& s,
                             const candidates::GlobalConstantTable& g);

oracles::Oracle to_oracle(const InferenceResult& r); // precondition: not PrefixOnly

// The inferred test; PrefixOnly yields the bare prefix.
testlang::TestMethod render_inferred(const TestPrefix& p, const InferenceResult& r, const std::string& name);

nlohmann::json to_json(const InferenceResult& r);

// Rounds to 6 decimals for stable textual output.
double report_round(double v);

} // namespace oracleforge::ranking
