#pragma once

#include <string>
#include <vector>

#include "valuebench/backend.hpp"

namespace valuebench {

struct AnswerDistribution {
    std::vector<double> probabilities;
    std::string question_id;
    std::string country;
    std::string model_id;
};

// K scores regularly spaced over [-1, 1]; scores[k] = -1 + 2k/(K-1).
struct ScoreLadder {
    std::vector<double> scores;
};

struct MeanScoreRecord {
    double value = 0;
    std::string source;  // "model" | "human"
    std::string question_id;
    std::string country;
    std::string model_id;  // model source only
};

// Sum of the continuation tokens' logprobs. Throws InvariantError on an
// empty continuation.
double answer_loglikelihood(const TokenScoredContinuation& scored);

// Softmax over candidate log-likelihoods via max-subtraction; sums to 1
// within 1e-12 and is invariant under adding a constant to all inputs.
// Throws InvariantError on non-finite input or K < 2.
std::vector<double> normalize(const std::vector<double>& loglikes);

ScoreLadder make_ladder(std::size_t k);  // throws InvariantError for k < 2

// Expectation of the ladder under dist. dist must sum to 1 within 1e-6.
double mean_score(const std::vector<double>& dist, const ScoreLadder& ladder);

}  // namespace valuebench
