#include "valuebench/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "valuebench/errors.hpp"

namespace valuebench {

void ScoreMatrix::insert(const MeanScoreRecord& record) {
    std::string source = record.source == "human" ? std::string("human") : record.model_id;
    Key key{source, record.country, record.question_id};
    auto [it, inserted] = records_.emplace(key, record.value);
    if (!inserted) {
        throw InvariantError("duplicate mean-score record for (" + source + ", " +
                             record.country + ", " + record.question_id + ")");
    }
}

std::optional<double> ScoreMatrix::get(const std::string& source, const std::string& country,
                                       const std::string& question_id) const {
    auto it = records_.find(Key{source, country, question_id});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ScoreMatrix::model_ids() const {
    std::set<std::string> ids;
    for (const auto& [key, value] : records_) {
        const auto& source = std::get<0>(key);
        if (source != "human") ids.insert(source);
    }
    return {ids.begin(), ids.end()};
}

std::vector<std::string> ScoreMatrix::countries_for(const std::string& source) const {
    std::set<std::string> out;
    for (const auto& [key, value] : records_) {
        if (std::get<0>(key) == source) out.insert(std::get<1>(key));
    }
    return {out.begin(), out.end()};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InvariantError("pearson: length mismatch");
    }
    const std::size_t n = xs.size();
    if (n < 2) {
        throw InsufficientPairsError("pearson requires at least 2 pairs");
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) {
        throw DegenerateVarianceError("pearson: an input has zero variance");
    }
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationResult correlate(const ScoreMatrix& matrix, const Survey& survey,
                            const GroupingConfig& config, const std::string& model_id,
                            const std::string& country,
                            const std::optional<std::string>& category,
                            const std::optional<std::string>& group_label) {
    std::vector<double> model_means;
    std::vector<double> human_means;
    for (const auto& question : survey.questions) {
        if (category && question.category != *category) continue;
        if (group_label && category_group_of(question.category, config) != *group_label) {
            continue;
        }
        auto m = matrix.get(model_id, country, question.id);
        auto h = matrix.get("human", country, question.id);
        if (!m || !h) continue;
        model_means.push_back(*m);
        human_means.push_back(*h);
    }
    if (model_means.size() < 2) {
        std::string scope = category.value_or(group_label.value_or("all questions"));
        throw InsufficientPairsError("fewer than 2 (model, human) pairs for " + model_id +
                                     " / " + country + " / " + scope);
    }

    CorrelationResult result;
    try {
        result.coefficient = pearson(model_means, human_means);
    } catch (const DegenerateVarianceError& e) {
        throw DegenerateVarianceError(std::string(e.what()) + " [" + model_id + " / " +
                                      country + "]");
    }
    result.n = static_cast<int>(model_means.size());
    result.model_id = model_id;
    result.country = country;
    result.category = category;
    result.group_label = group_label;
    return result;
}

namespace {

std::map<std::pair<std::string, std::string>, double> average_by(
    const std::vector<CorrelationResult>& results,
    const std::function<std::string(const std::string&)>& bucket_of) {
    std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
    for (const auto& r : results) {
        if (r.category || r.group_label) continue;  // country-level results only
        auto& slot = sums[{r.model_id, bucket_of(r.country)}];
        slot.first += r.coefficient;
        slot.second += 1;
    }
    std::map<std::pair<std::string, std::string>, double> out;
    for (const auto& [key, sum_count] : sums) {
        out[key] = sum_count.first / sum_count.second;
    }
    return out;
}

}  // namespace

std::map<std::pair<std::string, std::string>, double> aggregate_by_continent(
    const std::vector<CorrelationResult>& results, const GroupingConfig& config) {
    for (const auto& r : results) {
        if (!r.category && !r.group_label && !config.continent_of.count(r.country)) {
            throw InvariantError("unmapped country: " + r.country);
        }
    }
    return average_by(results,
                      [&](const std::string& c) { return config.continent_of.at(c); });
}

std::map<std::pair<std::string, std::string>, double> aggregate_by_western(
    const std::vector<CorrelationResult>& results, const GroupingConfig& config) {
    return average_by(results, [&](const std::string& c) {
        return config.is_western(c) ? std::string("Western") : std::string("Non-Western");
    });
}

ChatComparison compare_chat_vs_base(const std::vector<CorrelationResult>& results,
                                    const ModelRegistry& registry) {
    // coefficient per (model, country), country-level results only
    std::map<std::pair<std::string, std::string>, double> coef;
    for (const auto& r : results) {
        if (r.category || r.group_label) continue;
        coef[{r.model_id, r.country}] = r.coefficient;
    }
    std::set<std::string> models_present;
    for (const auto& [key, value] : coef) models_present.insert(key.first);

    ChatComparison out;
    for (const auto& entry : registry.entries()) {
        if (!entry.is_chat || !models_present.count(entry.model_id)) continue;
        if (!entry.base_model_id || !registry.find(*entry.base_model_id) ||
            !models_present.count(*entry.base_model_id)) {
            out.unmatched.push_back(entry.model_id);
            continue;
        }
        bool any = false;
        for (const auto& [key, chat_coef] : coef) {
            if (key.first != entry.model_id) continue;
            auto base_it = coef.find({*entry.base_model_id, key.second});
            if (base_it == coef.end()) continue;
            ChatComparisonRow row;
            row.family = entry.family;
            row.base_model = *entry.base_model_id;
            row.chat_model = entry.model_id;
            row.country = key.second;
            row.base_coefficient = base_it->second;
            row.chat_coefficient = chat_coef;
            row.delta = chat_coef - base_it->second;
            out.rows.push_back(std::move(row));
            any = true;
        }
        if (!any) out.unmatched.push_back(entry.model_id);
    }
    return out;
}

std::vector<DivergenceCase> divergence_cases(
    const std::map<std::pair<std::string, std::string>, AnswerDistribution>& model_dists,
    const Survey& survey, std::size_t limit) {
    std::vector<DivergenceCase> cases;
    for (const auto& [key, dist] : model_dists) {
        const auto& [question_id, country] = key;
        const Question* question = survey.find_question(question_id);
        if (!question) continue;
        auto hit = question->human_responses.find(country);
        if (hit == question->human_responses.end()) continue;
        const auto& human = hit->second.probabilities;
        const auto& model = dist.probabilities;
        if (model.size() != human.size()) {
            throw InvariantError("distribution size mismatch for " + question_id + "/" + country);
        }

        auto argmax = [](const std::vector<double>& v) {
            return static_cast<std::size_t>(
                std::max_element(v.begin(), v.end()) - v.begin());
        };
        std::size_t mi = argmax(model);
        std::size_t hi = argmax(human);

        ScoreLadder ladder = make_ladder(model.size());
        DivergenceCase c;
        c.question_id = question_id;
        c.country = country;
        c.model_id = dist.model_id;
        c.category = question->category;
        c.model_top_text = question->candidates[mi];
        c.model_top_prob = model[mi];
        c.human_top_text = question->candidates[hi];
        c.human_top_prob = human[hi];
        c.agree = (mi == hi);
        c.divergence = std::abs(mean_score(model, ladder) - mean_score(human, ladder));
        cases.push_back(std::move(c));
    }

    std::sort(cases.begin(), cases.end(), [](const DivergenceCase& a, const DivergenceCase& b) {
        if (a.divergence != b.divergence) return a.divergence > b.divergence;
        if (a.question_id != b.question_id) return a.question_id < b.question_id;
        return a.country < b.country;
    });
    if (cases.size() > limit) cases.resize(limit);
    return cases;
}

double quantile_inclusive(std::vector<double> values, double p) {
    if (values.empty()) {
        throw InvariantError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return values[lo];
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<BoxplotStats> category_boxplot_stats(const ScoreMatrix& matrix,
                                                 const Survey& survey) {
    std::set<std::string> categories;
    for (const auto& q : survey.questions) categories.insert(q.category);

    std::vector<std::string> sources{"human"};
    for (const auto& id : matrix.model_ids()) sources.push_back(id);

    std::vector<BoxplotStats> out;
    for (const auto& source : sources) {
        for (const auto& category : categories) {
            // Per-country points: each country's average over the category's
            // questions. Per-question variant: each question's average over
            // countries.
            std::map<std::string, std::pair<double, int>> by_country;
            std::map<std::string, std::pair<double, int>> by_question;
            for (const auto& q : survey.questions) {
                if (q.category != category) continue;
                for (const auto& [country, dist] : q.human_responses) {
                    auto v = matrix.get(source, country, q.id);
                    if (!v) continue;
                    by_country[country].first += *v;
                    by_country[country].second += 1;
                    by_question[q.id].first += *v;
                    by_question[q.id].second += 1;
                }
            }
            auto emit = [&](const std::map<std::string, std::pair<double, int>>& points,
                            const std::string& span) {
                if (points.empty()) return;
                std::vector<double> values;
                for (const auto& [key, sum_count] : points) {
                    values.push_back(sum_count.first / sum_count.second);
                }
                BoxplotStats stats;
                stats.source = source;
                stats.category = category;
                stats.span = span;
                stats.n = static_cast<int>(values.size());
                stats.min = quantile_inclusive(values, 0.0);
                stats.q1 = quantile_inclusive(values, 0.25);
                stats.median = quantile_inclusive(values, 0.5);
                stats.q3 = quantile_inclusive(values, 0.75);
                stats.max = quantile_inclusive(values, 1.0);
                out.push_back(std::move(stats));
            };
            emit(by_country, "countries");
            emit(by_question, "questions");
        }
    }
    return out;
}

}  // namespace valuebench
