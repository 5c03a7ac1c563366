#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "valuebench/registry.hpp"
#include "valuebench/scoring.hpp"
#include "valuebench/survey.hpp"

namespace valuebench {

// Mean scores keyed by (source, country, question); source is a model id
// or "human".
class ScoreMatrix {
public:
    using Key = std::tuple<std::string, std::string, std::string>;

    void insert(const MeanScoreRecord& record);  // throws InvariantError on duplicates
    std::optional<double> get(const std::string& source, const std::string& country,
                              const std::string& question_id) const;

    std::vector<std::string> model_ids() const;
    std::vector<std::string> countries_for(const std::string& source) const;
    const std::map<Key, double>& records() const { return records_; }

private:
    std::map<Key, double> records_;
};

struct CorrelationResult {
    double coefficient = 0;
    int n = 0;
    std::string model_id;
    std::string country;
    std::optional<std::string> category;
    std::optional<std::string> group_label;
};

struct DivergenceCase {
    std::string question_id;
    std::string country;
    std::string model_id;
    std::string category;
    std::string model_top_text;
    double model_top_prob = 0;
    std::string human_top_text;
    double human_top_prob = 0;
    bool agree = false;
    double divergence = 0;  // |model mean - human mean|
};

struct BoxplotStats {
    std::string source;    // model id or "human"
    std::string category;
    std::string span;      // "countries" | "questions"
    int n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

struct ChatComparisonRow {
    std::string family;
    std::string base_model;
    std::string chat_model;
    std::string country;
    double base_coefficient = 0;
    double chat_coefficient = 0;
    double delta = 0;
};

struct ChatComparison {
    std::vector<ChatComparisonRow> rows;
    std::vector<std::string> unmatched;  // chat models with no usable base
};

// Product-moment correlation. Throws on length mismatch, n < 2, or a
// constant input (degenerate variance is an error, never a silent NaN).
double pearson(std::span<const double> xs, std::span<const double> ys);

// Pairs model and human mean scores question-by-question for one country,
// optionally filtered to a category or a category group.
CorrelationResult correlate(const ScoreMatrix& matrix, const Survey& survey,
                            const GroupingConfig& config, const std::string& model_id,
                            const std::string& country,
                            const std::optional<std::string>& category = std::nullopt,
                            const std::optional<std::string>& group_label = std::nullopt);

// Unweighted mean of per-country coefficients within each continent.
std::map<std::pair<std::string, std::string>, double> aggregate_by_continent(
    const std::vector<CorrelationResult>& results, const GroupingConfig& config);

// Same averaging, but by Western / Non-Western membership.
std::map<std::pair<std::string, std::string>, double> aggregate_by_western(
    const std::vector<CorrelationResult>& results, const GroupingConfig& config);

ChatComparison compare_chat_vs_base(const std::vector<CorrelationResult>& results,
                                    const ModelRegistry& registry);

// Ranked by |model mean - human mean| descending; ties broken by question
// id, then country (lexicographic) so reports are byte-stable.
std::vector<DivergenceCase> divergence_cases(
    const std::map<std::pair<std::string, std::string>, AnswerDistribution>& model_dists,
    const Survey& survey, std::size_t limit);

// Five-number summaries of mean scores per (source, category), with points
// taken across countries and, as a second variant, across questions.
std::vector<BoxplotStats> category_boxplot_stats(const ScoreMatrix& matrix,
                                                 const Survey& survey);

// Inclusive linear interpolation on sorted data.
double quantile_inclusive(std::vector<double> values, double p);

}  // namespace valuebench
