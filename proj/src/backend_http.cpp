#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "valuebench/backend.hpp"
#include "valuebench/errors.hpp"

namespace valuebench {

namespace {
using nlohmann::json;

struct EchoedLogprobs {
    std::vector<std::string> tokens;
    std::vector<double> logprobs;   // first entry may be NaN (unconditioned token)
    std::vector<long> text_offsets;
};

EchoedLogprobs parse_logprobs(const json& response) {
    EchoedLogprobs out;
    try {
        const auto& lp = response.at("choices").at(0).at("logprobs");
        out.tokens = lp.at("tokens").get<std::vector<std::string>>();
        for (const auto& v : lp.at("token_logprobs")) {
            out.logprobs.push_back(v.is_null() ? std::nan("") : v.get<double>());
        }
        out.text_offsets = lp.at("text_offset").get<std::vector<long>>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("completions response missing logprobs: ") + e.what());
    }
    if (out.tokens.size() != out.logprobs.size() ||
        out.tokens.size() != out.text_offsets.size()) {
        throw BackendError("completions response logprob arrays have mismatched lengths");
    }
    return out;
}

double total_conditioned_logprob(const EchoedLogprobs& lp) {
    double sum = 0;
    for (double v : lp.logprobs) {
        if (!std::isnan(v)) sum += v;
    }
    return sum;
}

}  // namespace

struct HttpBackend::Impl {
    HttpBackendOptions opt;
    std::string strategy;  // "echo" or "diff"
    std::mutex strategy_mutex;

    explicit Impl(HttpBackendOptions o) : opt(std::move(o)) {
        strategy = (opt.strategy == "diff") ? "diff" : "echo";
    }

    json post_completions(const json& request) {
        std::string body = request.dump();
        int attempt = 0;
        int backoff = opt.backoff_initial_ms;
        for (;;) {
            httplib::Client client(opt.endpoint);
            client.set_connection_timeout(opt.timeout_seconds, 0);
            client.set_read_timeout(opt.timeout_seconds, 0);
            httplib::Headers headers;
            if (!opt.api_key.empty()) {
                headers.emplace("Authorization", "Bearer " + opt.api_key);
            }
            auto res = client.Post("/v1/completions", headers, body, "application/json");

            std::string error_message;
            bool retryable = false;
            if (!res) {
                error_message = "connection failed: " + httplib::to_string(res.error());
                retryable = true;
            } else if (res->status >= 500) {
                error_message = "server error " + std::to_string(res->status);
                retryable = true;
            } else if (res->status >= 400) {
                // Client errors are not retryable; an echo rejection signals
                // the diff fallback.
                std::string lower = res->body;
                for (char& ch : lower) ch = static_cast<char>(std::tolower(ch));
                if (request.value("echo", false) && lower.find("echo") != std::string::npos) {
                    throw EchoUnsupportedError("endpoint rejected echo request: " + res->body);
                }
                throw BackendError("request rejected (" + std::to_string(res->status) +
                                   "): " + res->body, false);
            } else {
                try {
                    return json::parse(res->body);
                } catch (const json::exception& e) {
                    error_message = std::string("unparseable response body: ") + e.what();
                    retryable = true;
                }
            }

            if (attempt >= opt.max_retries) {
                throw BackendError(error_message + " (after " + std::to_string(attempt) +
                                   " retries)", true);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
            ++attempt;
        }
    }

    json completions_request(const std::string& text, bool echo) const {
        return json{{"model", opt.model_id}, {"prompt", text}, {"max_tokens", 0},
                    {"echo", echo}, {"logprobs", 1}, {"temperature", 0}};
    }

    TokenScoredContinuation score_echo(const std::string& context,
                                       const std::string& continuation) {
        json response = post_completions(completions_request(context + continuation, true));
        EchoedLogprobs lp = parse_logprobs(response);

        const long boundary = static_cast<long>(context.size());
        TokenScoredContinuation out;
        out.strategy = "echo";
        bool clean_split = false;
        for (std::size_t i = 0; i < lp.tokens.size(); ++i) {
            if (lp.text_offsets[i] < boundary) {
                ++out.context_token_count;
                continue;
            }
            if (lp.text_offsets[i] == boundary) clean_split = true;
            if (std::isnan(lp.logprobs[i])) {
                throw BackendError("continuation token without a logprob (empty context?)");
            }
            out.tokens.push_back({lp.tokens[i], lp.logprobs[i]});
        }
        out.boundary_warning = !clean_split;
        out.continuation_token_count = static_cast<int>(out.tokens.size());
        if (out.tokens.empty()) {
            throw BackendError("no tokens attributed to the continuation");
        }
        return out;
    }

    TokenScoredContinuation score_diff(const std::string& context,
                                       const std::string& continuation) {
        // No echo flag: servers that reject echo still return prompt logprobs.
        EchoedLogprobs full =
            parse_logprobs(post_completions(completions_request(context + continuation, false)));
        EchoedLogprobs ctx =
            parse_logprobs(post_completions(completions_request(context, false)));
        double diff = total_conditioned_logprob(full) - total_conditioned_logprob(ctx);

        TokenScoredContinuation out;
        out.strategy = "diff";
        out.context_token_count = static_cast<int>(ctx.tokens.size());
        // Totals can disagree by a rounding hair when the boundary re-tokenizes.
        out.boundary_warning = diff > 0;
        out.tokens.push_back({continuation, std::min(diff, 0.0)});
        out.continuation_token_count = 1;
        return out;
    }
};

HttpBackend::HttpBackend(HttpBackendOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

HttpBackend::~HttpBackend() = default;

const std::string& HttpBackend::model_id() const { return impl_->opt.model_id; }

std::string HttpBackend::current_strategy() const {
    std::lock_guard<std::mutex> lock(impl_->strategy_mutex);
    return impl_->strategy;
}

TokenScoredContinuation HttpBackend::score(const std::string& context,
                                           const std::string& continuation) {
    std::string strategy;
    {
        std::lock_guard<std::mutex> lock(impl_->strategy_mutex);
        strategy = impl_->strategy;
    }
    if (strategy == "echo") {
        try {
            return impl_->score_echo(context, continuation);
        } catch (const EchoUnsupportedError&) {
            if (impl_->opt.strategy == "echo") throw;  // pinned, no fallback
            std::lock_guard<std::mutex> lock(impl_->strategy_mutex);
            impl_->strategy = "diff";
        }
    }
    return impl_->score_diff(context, continuation);
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor,
                                      const HttpBackendOptions& http_options) {
    if (descriptor.endpoint == "mock") {
        return std::make_unique<MockBackend>(descriptor.model_id);
    }
    HttpBackendOptions opt = http_options;
    opt.endpoint = descriptor.endpoint;
    opt.model_id = descriptor.model_id;
    return std::make_unique<HttpBackend>(std::move(opt));
}

}  // namespace valuebench
