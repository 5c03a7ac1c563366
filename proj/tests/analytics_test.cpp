#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "valuebench/analytics.hpp"
#include "valuebench/errors.hpp"

using namespace valuebench;
namespace tu = valuebench::testutil;

namespace {

// Textbook two-pass oracle, independent of the implementation under test.
double pearson_oracle(const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cov += (xs[i] - mx) * (ys[i] - my);
        vx += (xs[i] - mx) * (xs[i] - mx);
        vy += (ys[i] - my) * (ys[i] - my);
    }
    return cov / (std::sqrt(vx) * std::sqrt(vy));
}

// Independent quantile oracle: sort, then linearly interpolate on (n-1)p.
double quantile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double idx = p * (v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] * (1.0 - (idx - lo)) + v[lo + 1] * (idx - lo);
}

Survey tiny_survey() {
    Survey s;
    s.survey_id = "tiny";
    s.countries = {"USA", "KOR"};
    for (int i = 0; i < 4; ++i) {
        Question q;
        q.id = "q" + std::to_string(i);
        q.category = (i < 2) ? "ETHICAL VALUES AND NORMS" : "SCIENCE & TECHNOLOGY";
        q.text = "t";
        q.candidates = {"a", "b", "c"};
        double base = 0.2 + 0.15 * i;
        q.human_responses["USA"] = HumanDistribution{{base, 0.3, 0.7 - base}};
        q.human_responses["KOR"] = HumanDistribution{{0.7 - base, 0.3, base}};
        s.questions.push_back(q);
    }
    return s;
}

GroupingConfig tiny_config() {
    GroupingConfig c = tu::small_config();
    c.category_groups["SCIENCE & TECHNOLOGY"] = "social systems and progress";
    return c;
}

ScoreMatrix matrix_with(const Survey& survey, const std::string& model_id, bool reversed) {
    ScoreMatrix m;
    for (const auto& q : survey.questions) {
        ScoreLadder ladder = make_ladder(q.candidates.size());
        for (const auto& [country, dist] : q.human_responses) {
            MeanScoreRecord h{mean_score(dist.probabilities, ladder), "human", q.id, country, ""};
            m.insert(h);
            std::vector<double> p = dist.probabilities;
            if (reversed) std::reverse(p.begin(), p.end());
            MeanScoreRecord mm{mean_score(p, ladder), "model", q.id, country, model_id};
            m.insert(mm);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("pearson identities") {
    std::vector<double> xs = {1, 2, 3, 4};
    std::vector<double> neg = {-1, -2, -3, -4};
    CHECK(pearson(xs, xs) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(xs, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson matches the hand vector from the oracle") {
    std::vector<double> xs = {1, 2, 3, 4};
    std::vector<double> ys = {1.1, 1.9, 3.2, 3.8};
    CHECK(std::abs(pearson(xs, ys) - pearson_oracle(xs, ys)) < 1e-12);
}

TEST_CASE("pearson error paths") {
    std::vector<double> xs = {1, 2, 3};
    CHECK_THROWS_AS(pearson(xs, std::vector<double>{1, 2}), InvariantError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}),
                    InsufficientPairsError);
    CHECK_THROWS_AS(pearson(std::vector<double>{5, 5, 5}, xs), DegenerateVarianceError);
}

TEST_CASE("pearson oracle equivalence and affine behavior over random pairs") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coef(0.1, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 5 + rng() % 205;
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = val(rng);
            ys[i] = val(rng);
        }
        double r = pearson(xs, ys);
        CHECK(std::abs(r - pearson_oracle(xs, ys)) < 1e-12);

        double a = coef(rng), b = val(rng);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = a * xs[i] + b;
        CHECK(std::abs(pearson(scaled, ys) - r) < 1e-12);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = -a * xs[i] + b;
        CHECK(std::abs(pearson(scaled, ys) + r) < 1e-12);
    }
}

TEST_CASE("correlate: identity model gives 1, reversed gives -1") {
    Survey survey = tiny_survey();
    GroupingConfig config = tiny_config();

    ScoreMatrix identity = matrix_with(survey, "m", false);
    auto r = correlate(identity, survey, config, "m", "USA");
    CHECK(r.coefficient == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.n == 4);

    // Spot-check the negation on each question before trusting the -1.
    ScoreMatrix reversed = matrix_with(survey, "m", true);
    for (const auto& q : survey.questions) {
        double h = *reversed.get("human", "USA", q.id);
        double m = *reversed.get("m", "USA", q.id);
        CHECK(std::abs(m + h) < 1e-12);
    }
    auto rr = correlate(reversed, survey, config, "m", "USA");
    CHECK(rr.coefficient == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("correlate filters by category and group, and needs 2+ pairs") {
    Survey survey = tiny_survey();
    GroupingConfig config = tiny_config();
    ScoreMatrix m = matrix_with(survey, "m", false);

    auto cat = correlate(m, survey, config, "m", "USA",
                         std::string("ETHICAL VALUES AND NORMS"));
    CHECK(cat.n == 2);
    auto grp = correlate(m, survey, config, "m", "USA", std::nullopt,
                         std::string("social systems and progress"));
    CHECK(grp.n == 2);

    Survey one = survey;
    one.questions.resize(1);
    ScoreMatrix m1 = matrix_with(one, "m", false);
    CHECK_THROWS_AS(correlate(m1, one, config, "m", "USA"), InsufficientPairsError);
}

TEST_CASE("correlate is permutation-invariant in question order") {
    Survey survey = tiny_survey();
    GroupingConfig config = tiny_config();
    ScoreMatrix m = matrix_with(survey, "m", true);
    double before = correlate(m, survey, config, "m", "KOR").coefficient;
    std::reverse(survey.questions.begin(), survey.questions.end());
    CHECK(correlate(m, survey, config, "m", "KOR").coefficient == before);
}

TEST_CASE("aggregate_by_continent averages per-country coefficients") {
    GroupingConfig config = tiny_config();
    config.continent_of = {{"USA", "North America"}, {"CAN", "North America"}, {"KOR", "Asia"}};
    std::vector<CorrelationResult> results;
    results.push_back({0.2, 5, "m", "USA", std::nullopt, std::nullopt});
    results.push_back({0.4, 5, "m", "CAN", std::nullopt, std::nullopt});
    results.push_back({0.9, 5, "m", "KOR", std::nullopt, std::nullopt});

    auto means = aggregate_by_continent(results, config);
    CHECK(means.at({"m", "North America"}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(means.at({"m", "Asia"}) == 0.9);  // singleton mean is the value itself

    // Identical coefficients collapse to that value exactly.
    for (auto& r : results) r.coefficient = 1.0;
    auto all_one = aggregate_by_continent(results, config);
    for (const auto& [key, v] : all_one) CHECK(v == 1.0);

    results.push_back({0.5, 5, "m", "XXX", std::nullopt, std::nullopt});
    CHECK_THROWS_AS(aggregate_by_continent(results, config), InvariantError);
}

TEST_CASE("aggregate_by_western splits on the configured set") {
    GroupingConfig config = tiny_config();
    std::vector<CorrelationResult> results;
    results.push_back({0.6, 5, "m", "USA", std::nullopt, std::nullopt});
    results.push_back({0.2, 5, "m", "KOR", std::nullopt, std::nullopt});
    auto means = aggregate_by_western(results, config);
    CHECK(means.at({"m", "Western"}) == 0.6);
    CHECK(means.at({"m", "Non-Western"}) == 0.2);
}

TEST_CASE("compare_chat_vs_base pairs families and lists unmatched chat models") {
    std::vector<ModelRegistryEntry> entries = {
        {"base-x", "x", 7, 100, false, std::nullopt, ""},
        {"chat-x", "x", 7, 100, true, std::string("base-x"), ""},
        {"chat-orphan", "y", 7, 100, true, std::nullopt, ""},
    };
    ModelRegistry registry(entries);

    std::vector<CorrelationResult> results;
    results.push_back({0.1, 5, "base-x", "USA", std::nullopt, std::nullopt});
    results.push_back({0.5, 5, "chat-x", "USA", std::nullopt, std::nullopt});
    results.push_back({0.3, 5, "chat-orphan", "USA", std::nullopt, std::nullopt});

    auto cmp = compare_chat_vs_base(results, registry);
    REQUIRE(cmp.rows.size() == 1);
    CHECK(cmp.rows[0].family == "x");
    CHECK(cmp.rows[0].delta == doctest::Approx(0.4).epsilon(1e-12));
    REQUIRE(cmp.unmatched.size() == 1);
    CHECK(cmp.unmatched[0] == "chat-orphan");

    // Empty results, empty table.
    auto empty = compare_chat_vs_base({}, registry);
    CHECK(empty.rows.empty());
}

TEST_CASE("divergence cases rank by mean-score gap with agree flags") {
    Survey survey;
    survey.survey_id = "s";
    survey.countries = {"USA", "KOR"};
    Question tax;
    tax.id = "tax-cheating";
    tax.category = "ETHICAL VALUES AND NORMS";
    tax.text = "t";
    tax.candidates = {"Never justifiable", "Neutral", "Justifiable"};
    tax.human_responses["USA"] = HumanDistribution{{0.82, 0.10, 0.08}};
    Question sex = tax;
    sex.id = "premarital-sex";
    sex.human_responses.clear();
    sex.human_responses["KOR"] = HumanDistribution{{0.85, 0.05, 0.10}};
    Question same = tax;
    same.id = "zz-identical";
    survey.questions = {tax, sex, same};

    std::map<std::pair<std::string, std::string>, AnswerDistribution> model;
    model[{"tax-cheating", "USA"}] = {{0.97, 0.02, 0.01}, "tax-cheating", "USA", "m"};
    model[{"premarital-sex", "KOR"}] = {{0.20, 0.15, 0.65}, "premarital-sex", "KOR", "m"};
    model[{"zz-identical", "USA"}] = {{0.82, 0.10, 0.08}, "zz-identical", "USA", "m"};

    auto cases = divergence_cases(model, survey, 10);
    REQUIRE(cases.size() == 3);
    CHECK(cases[0].question_id == "premarital-sex");  // biggest gap first
    CHECK_FALSE(cases[0].agree);
    CHECK(cases[0].model_top_text == "Justifiable");
    CHECK(cases[0].human_top_text == "Never justifiable");

    CHECK(cases[1].question_id == "tax-cheating");
    CHECK(cases[1].agree);
    CHECK(cases[1].model_top_text == "Never justifiable");
    CHECK(cases[1].model_top_prob == 0.97);
    CHECK(cases[1].human_top_prob == 0.82);

    CHECK(cases[2].question_id == "zz-identical");  // zero divergence ranks last
    CHECK(cases[2].divergence == 0.0);

    auto limited = divergence_cases(model, survey, 1);
    CHECK(limited.size() == 1);
}

TEST_CASE("boxplot stats use inclusive quartiles") {
    Survey survey = tiny_survey();
    ScoreMatrix m = matrix_with(survey, "m", false);
    auto stats = category_boxplot_stats(m, survey);
    CHECK_FALSE(stats.empty());
    for (const auto& s : stats) {
        CHECK(s.min <= s.q1);
        CHECK(s.q1 <= s.median);
        CHECK(s.median <= s.q3);
        CHECK(s.q3 <= s.max);
    }

    // Evenly spaced data is its own five-number summary.
    CHECK(quantile_inclusive({0, 1, 2, 3, 4}, 0.0) == 0);
    CHECK(quantile_inclusive({0, 1, 2, 3, 4}, 0.25) == 1);
    CHECK(quantile_inclusive({0, 1, 2, 3, 4}, 0.5) == 2);
    CHECK(quantile_inclusive({0, 1, 2, 3, 4}, 0.75) == 3);
    CHECK(quantile_inclusive({0, 1, 2, 3, 4}, 1.0) == 4);

    // Single data point repeats across the summary.
    CHECK(quantile_inclusive({0.7}, 0.25) == 0.7);
    CHECK(quantile_inclusive({0.7}, 0.75) == 0.7);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> sample(7);
        for (auto& v : sample) v = val(rng);
        for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(std::abs(quantile_inclusive(sample, p) - quantile_oracle(sample, p)) < 1e-12);
        }
    }
}

TEST_CASE("score matrix rejects duplicate keys") {
    ScoreMatrix m;
    MeanScoreRecord r{0.5, "model", "q1", "USA", "m"};
    m.insert(r);
    CHECK_THROWS_AS(m.insert(r), InvariantError);
}
