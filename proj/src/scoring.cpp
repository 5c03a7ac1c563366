#include "valuebench/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "valuebench/errors.hpp"

namespace valuebench {

double answer_loglikelihood(const TokenScoredContinuation& scored) {
    if (scored.tokens.empty() || scored.continuation_token_count < 1) {
        throw InvariantError("continuation has no scored tokens");
    }
    double sum = 0;
    for (const auto& t : scored.tokens) sum += t.logprob;
    return sum;
}

std::vector<double> normalize(const std::vector<double>& loglikes) {
    if (loglikes.size() < 2) {
        throw InvariantError("normalize requires K >= 2 log-likelihoods");
    }
    for (double x : loglikes) {
        if (!std::isfinite(x)) {
            throw InvariantError("non-finite log-likelihood");
        }
    }
    // Max-subtraction keeps exp() in range for candidate log-likelihoods in
    // the -10^4 range.
    double max = *std::max_element(loglikes.begin(), loglikes.end());
    std::vector<double> probs(loglikes.size());
    double sum = 0;
    for (std::size_t i = 0; i < loglikes.size(); ++i) {
        probs[i] = std::exp(loglikes[i] - max);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

ScoreLadder make_ladder(std::size_t k) {
    if (k < 2) {
        throw InvariantError("score ladder requires K >= 2");
    }
    ScoreLadder ladder;
    ladder.scores.resize(k);
    // Mirror the lower half so antisymmetry s_k = -s_{K+1-k} holds bit-exactly
    // (the middle entry of an odd ladder is exactly 0).
    for (std::size_t i = 0; i < k / 2; ++i) {
        double s = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(k - 1);
        ladder.scores[i] = s;
        ladder.scores[k - 1 - i] = -s;
    }
    if (k % 2 == 1) ladder.scores[k / 2] = 0.0;
    return ladder;
}

double mean_score(const std::vector<double>& dist, const ScoreLadder& ladder) {
    if (dist.size() != ladder.scores.size()) {
        throw InvariantError("distribution and ladder lengths differ");
    }
    double sum = 0;
    for (double p : dist) sum += p;
    if (std::abs(sum - 1.0) > 1e-6) {
        throw InvariantError("distribution is not normalized (sum " + std::to_string(sum) + ")");
    }
    double m = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) m += dist[i] * ladder.scores[i];
    return std::clamp(m, -1.0, 1.0);
}

}  // namespace valuebench
