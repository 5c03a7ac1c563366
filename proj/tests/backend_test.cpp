#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "valuebench/backend.hpp"
#include "valuebench/errors.hpp"
#include "valuebench/scoring.hpp"

using namespace valuebench;
namespace tu = valuebench::testutil;

TEST_CASE("mock backend replays its seed table") {
    MockBackend mock("mock-base");
    mock.seed("ctx", " A) Yes", {-0.5, -1.0});
    auto result = score_continuation(mock, "ctx", " A) Yes");
    CHECK(result.total_logprob() == -1.5);
    CHECK(result.continuation_token_count == 2);
    CHECK(result.strategy == "mock");
}

TEST_CASE("empty continuation is a precondition error") {
    MockBackend mock("mock-base");
    CHECK_THROWS_AS(score_continuation(mock, "ctx", ""), InvariantError);
}

TEST_CASE("mock scoring is deterministic call to call") {
    MockBackend mock("mock-base");
    mock.seed("ctx", " A) Yes", {-0.25, -0.75});
    auto a = score_continuation(mock, "ctx", " A) Yes");
    auto b = score_continuation(mock, "ctx", " A) Yes");
    CHECK(a.total_logprob() == b.total_logprob());
    CHECK(a.tokens.size() == b.tokens.size());
}

TEST_CASE("unseeded lookups fail loudly") {
    MockBackend mock("mock-base");
    CHECK_THROWS_AS(score_continuation(mock, "ctx", " A) Yes"), BackendError);
}

TEST_CASE("distribution-seeded mock reproduces its target after normalization") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    MockBackend mock("mock-base");
    mock.seed_from_distribution(bundle, HumanDistribution{{0.82, 0.10, 0.08}});

    std::vector<double> loglikes;
    for (const auto& answer : bundle.answer_texts) {
        loglikes.push_back(answer_loglikelihood(score_continuation(mock, bundle.context_text, answer)));
    }
    auto p = normalize(loglikes);
    CHECK(std::abs(p[0] - 0.82) < 1e-12);
    CHECK(std::abs(p[1] - 0.10) < 1e-12);
    CHECK(std::abs(p[2] - 0.08) < 1e-12);
}

TEST_CASE("uniform target gives equal logprobs") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "KOR", tu::kTemplate, tu::small_config());
    MockBackend mock("mock-base");
    mock.seed_from_distribution(bundle, HumanDistribution{{1.0 / 3, 1.0 / 3, 1.0 / 3}});
    auto a = score_continuation(mock, bundle.context_text, bundle.answer_texts[0]);
    auto b = score_continuation(mock, bundle.context_text, bundle.answer_texts[1]);
    auto c = score_continuation(mock, bundle.context_text, bundle.answer_texts[2]);
    CHECK(a.total_logprob() == b.total_logprob());
    CHECK(b.total_logprob() == c.total_logprob());
}

TEST_CASE("zero entries are floored and renormalized") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    const double floor = 1e-9;
    MockBackend mock("mock-base", floor);
    mock.seed_from_distribution(bundle, HumanDistribution{{0.6, 0.4, 0.0}});

    // Independent recomputation of the floored renormalization.
    double sum = 0.6 + 0.4 + floor;
    std::vector<double> expected = {0.6 / sum, 0.4 / sum, floor / sum};

    std::vector<double> loglikes;
    for (const auto& answer : bundle.answer_texts) {
        loglikes.push_back(score_continuation(mock, bundle.context_text, answer).total_logprob());
    }
    auto p = normalize(loglikes);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - expected[i]) < 1e-8);
    // And the floored output stays within 1e-8 of the original target.
    CHECK(std::abs(p[0] - 0.6) < 1e-8);
    CHECK(std::abs(p[1] - 0.4) < 1e-8);
}

TEST_CASE("survey-wide seeding covers every (question, country, candidate)") {
    Survey survey;
    survey.survey_id = "s";
    survey.countries = {"USA", "KOR"};
    survey.questions = {tu::death_penalty_question()};
    GroupingConfig config = tu::small_config();

    MockBackend mock("mock-base");
    mock.seed_from_survey(survey, tu::kTemplate, config, survey.countries,
                          MockBackend::Mode::identity);
    for (const auto& country : survey.countries) {
        auto bundle = render_prompt(survey.questions[0], country, tu::kTemplate, config);
        std::vector<double> loglikes;
        for (const auto& answer : bundle.answer_texts) {
            loglikes.push_back(
                score_continuation(mock, bundle.context_text, answer).total_logprob());
        }
        auto p = normalize(loglikes);
        const auto& target = survey.questions[0].human_responses.at(country).probabilities;
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - target[i]) < 1e-12);
    }
}

TEST_CASE("reversed seeding flips the distribution") {
    Survey survey;
    survey.survey_id = "s";
    survey.countries = {"USA"};
    survey.questions = {tu::death_penalty_question()};
    GroupingConfig config = tu::small_config();

    MockBackend mock("mock-base");
    mock.seed_from_survey(survey, tu::kTemplate, config, survey.countries,
                          MockBackend::Mode::reversed);
    auto bundle = render_prompt(survey.questions[0], "USA", tu::kTemplate, config);
    std::vector<double> loglikes;
    for (const auto& answer : bundle.answer_texts) {
        loglikes.push_back(score_continuation(mock, bundle.context_text, answer).total_logprob());
    }
    auto p = normalize(loglikes);
    CHECK(std::abs(p[0] - 0.08) < 1e-12);
    CHECK(std::abs(p[2] - 0.82) < 1e-12);
}
