#include <algorithm>
#include <cmath>

#include "valuebench/backend.hpp"
#include "valuebench/errors.hpp"

namespace valuebench {

double TokenScoredContinuation::total_logprob() const {
    double sum = 0;
    for (const auto& t : tokens) sum += t.logprob;
    return sum;
}

TokenScoredContinuation score_continuation(Backend& backend, const std::string& context,
                                           const std::string& continuation) {
    if (continuation.empty()) {
        throw InvariantError("continuation must be non-empty");
    }
    return backend.score(context, continuation);
}

MockBackend::MockBackend(std::string model_id, double floor)
    : model_id_(std::move(model_id)), floor_(floor) {}

TokenScoredContinuation MockBackend::score(const std::string& context,
                                           const std::string& continuation) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find({context, continuation});
    if (it == table_.end()) {
        throw BackendError("mock backend has no entry for this (context, continuation)");
    }
    ++calls_;

    TokenScoredContinuation out;
    out.strategy = "mock";
    out.context_token_count = static_cast<int>(context.size());
    if (it->second.size() == 1) {
        out.tokens.push_back({continuation, it->second[0]});
    } else {
        // Split the continuation text evenly across the seeded logprobs so
        // token texts stay plausible.
        std::size_t n = it->second.size();
        std::size_t step = std::max<std::size_t>(1, continuation.size() / n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t begin = std::min(i * step, continuation.size());
            std::size_t end = (i + 1 == n) ? continuation.size()
                                           : std::min((i + 1) * step, continuation.size());
            out.tokens.push_back({continuation.substr(begin, end - begin), it->second[i]});
        }
    }
    out.continuation_token_count = static_cast<int>(out.tokens.size());
    return out;
}

void MockBackend::seed(const std::string& context, const std::string& continuation,
                       std::vector<double> token_logprobs) {
    std::lock_guard<std::mutex> lock(mutex_);
    table_[{context, continuation}] = std::move(token_logprobs);
}

void MockBackend::seed_from_distribution(const PromptBundle& bundle,
                                         const HumanDistribution& target) {
    const auto& probs = target.probabilities;
    if (probs.size() != bundle.answer_texts.size()) {
        throw InvariantError("target distribution size does not match bundle for question " +
                             bundle.question_id);
    }
    // Floor zero (or sub-floor) entries and renormalize; ln of the result
    // becomes the single-token logprob, so normalization downstream is the
    // identity on the target.
    std::vector<double> floored(probs.size());
    double sum = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        floored[k] = std::max(probs[k], floor_);
        sum += floored[k];
    }
    for (std::size_t k = 0; k < probs.size(); ++k) {
        seed(bundle.context_text, bundle.answer_texts[k], {std::log(floored[k] / sum)});
    }
}

void MockBackend::seed_from_survey(const Survey& survey, const std::string& template_text,
                                   const GroupingConfig& config,
                                   const std::vector<std::string>& countries, Mode mode,
                                   const std::optional<ChatProfile>& profile,
                                   const RenderOptions& options) {
    for (const auto& question : survey.questions) {
        for (const auto& country : countries) {
            auto it = question.human_responses.find(country);
            if (it == question.human_responses.end()) continue;

            HumanDistribution target = it->second;
            if (mode == Mode::reversed) {
                std::reverse(target.probabilities.begin(), target.probabilities.end());
            } else if (mode == Mode::uniform) {
                double u = 1.0 / static_cast<double>(target.probabilities.size());
                std::fill(target.probabilities.begin(), target.probabilities.end(), u);
            }

            PromptBundle bundle = render_prompt(question, country, template_text, config, options);
            if (profile) bundle = apply_chat(bundle, *profile);
            seed_from_distribution(bundle, target);
        }
    }
}

}  // namespace valuebench
