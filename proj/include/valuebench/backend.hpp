#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "valuebench/prompting.hpp"
#include "valuebench/survey.hpp"

namespace valuebench {

// Bump when the leading-space or boundary convention changes; part of every
// cache key so stale records are never reused.
inline constexpr const char* kScoringConventionVersion = "v1";

struct ScoredToken {
    std::string text;
    double logprob = 0;  // natural log, <= 0
};

// Per-token log-probabilities of a continuation conditioned on its context.
struct TokenScoredContinuation {
    std::vector<ScoredToken> tokens;
    int context_token_count = 0;
    int continuation_token_count = 0;
    std::string strategy;  // "echo" | "diff" | "mock"
    bool boundary_warning = false;

    double total_logprob() const;
};

struct BackendDescriptor {
    std::string backend_id;
    std::string endpoint;  // URL or "mock"
    std::string model_id;
    std::map<std::string, std::string> request_params;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual const std::string& model_id() const = 0;
    virtual TokenScoredContinuation score(const std::string& context,
                                          const std::string& continuation) = 0;
};

// Validates preconditions, then delegates to the backend.
TokenScoredContinuation score_continuation(Backend& backend, const std::string& context,
                                           const std::string& continuation);

// Deterministic lookup-table backend. Entries are either seeded explicitly
// (unit tests) or derived from human answer distributions so that scoring +
// normalization reproduces the target distribution exactly.
class MockBackend : public Backend {
public:
    enum class Mode { identity, reversed, uniform };

    explicit MockBackend(std::string model_id, double floor = 1e-9);

    const std::string& model_id() const override { return model_id_; }
    TokenScoredContinuation score(const std::string& context,
                                  const std::string& continuation) override;

    // Explicit per-token seeding.
    void seed(const std::string& context, const std::string& continuation,
              std::vector<double> token_logprobs);

    // Single-token continuations with logprob ln(target_k). Zero entries are
    // floored and the distribution renormalized.
    void seed_from_distribution(const PromptBundle& bundle,
                                const HumanDistribution& target);

    // Seed every (question, country) pair of the survey from its human
    // distribution (optionally reversed or uniform), using the same prompt
    // rendering the probe uses.
    void seed_from_survey(const Survey& survey, const std::string& template_text,
                          const GroupingConfig& config,
                          const std::vector<std::string>& countries, Mode mode,
                          const std::optional<ChatProfile>& profile = std::nullopt,
                          const RenderOptions& options = {});

    int calls() const { return calls_; }

private:
    std::string model_id_;
    double floor_;
    std::map<std::pair<std::string, std::string>, std::vector<double>> table_;
    int calls_ = 0;
    std::mutex mutex_;
};

struct HttpBackendOptions {
    std::string endpoint;  // e.g. http://host:port ; path fixed to /v1/completions
    std::string model_id;
    std::string api_key;            // sent as Bearer token when non-empty
    int max_retries = 3;
    int backoff_initial_ms = 100;   // doubles per retry
    int timeout_seconds = 60;
    std::string strategy = "auto";  // "auto" | "echo" | "diff"
};

// Client for the completions wire format with echoed token logprobs.
// Primary strategy sends context+continuation in one request (echo=true,
// logprobs=1) and takes the trailing tokens; the diff fallback subtracts
// total log-likelihoods of two requests.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);
    ~HttpBackend() override;

    const std::string& model_id() const override;
    TokenScoredContinuation score(const std::string& context,
                                  const std::string& continuation) override;

    // Strategy actually in use ("echo" until a fallback is triggered).
    std::string current_strategy() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor,
                                      const HttpBackendOptions& http_options);

}  // namespace valuebench
