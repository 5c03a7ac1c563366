#include <doctest.h>

#include "test_util.hpp"
#include "valuebench/errors.hpp"
#include "valuebench/prompting.hpp"

using namespace valuebench;
namespace tu = valuebench::testutil;

TEST_CASE("render_prompt produces the lettered choice line and answer cue") {
    Question q = tu::death_penalty_question();
    GroupingConfig config = tu::small_config();
    PromptBundle bundle = render_prompt(q, "USA", tu::kTemplate, config);

    CHECK(bundle.context_text ==
          "Question: Is the death penalty justifiable?\n"
          "Choices: A) Never Justifiable, B) Neutral, C) Justifiable\n"
          "In United States, Answer:");
    REQUIRE(bundle.answer_texts.size() == 3);
    CHECK(bundle.answer_texts[0] == " A) Never Justifiable");
    CHECK(bundle.answer_texts[1] == " B) Neutral");
    CHECK(bundle.answer_texts[2] == " C) Justifiable");
    CHECK(bundle.question_id == "death-penalty");
    CHECK_FALSE(bundle.chat_wrapped);
}

TEST_CASE("contexts for two countries differ only in the country span") {
    Question q = tu::death_penalty_question();
    GroupingConfig config = tu::small_config();
    auto usa = render_prompt(q, "USA", tu::kTemplate, config);
    auto kor = render_prompt(q, "KOR", tu::kTemplate, config);

    CHECK(usa.answer_texts == kor.answer_texts);
    std::string a = usa.context_text, b = kor.context_text;
    std::size_t pa = a.find("United States");
    std::size_t pb = b.find("South Korea");
    REQUIRE(pa != std::string::npos);
    REQUIRE(pb != std::string::npos);
    CHECK(a.substr(0, pa) == b.substr(0, pb));
    CHECK(a.substr(pa + 13) == b.substr(pb + 11));
}

TEST_CASE("missing placeholder is an error") {
    Question q = tu::death_penalty_question();
    CHECK_THROWS_AS(render_prompt(q, "USA", "Question: {Question}\n{Choices}\nAnswer:",
                                  tu::small_config()),
                    InvariantError);
}

TEST_CASE("multiline choice rendering is opt-in") {
    Question q = tu::death_penalty_question();
    RenderOptions options;
    options.multiline_choices = true;
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config(), options);
    CHECK(bundle.context_text.find("A) Never Justifiable\nB) Neutral") != std::string::npos);
}

TEST_CASE("rendering is deterministic byte for byte") {
    Question q = tu::death_penalty_question();
    auto a = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    auto b = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    CHECK(a.context_text == b.context_text);
    CHECK(a.answer_texts == b.answer_texts);
}

TEST_CASE("context + answer concatenation is well-formed for every candidate") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    for (const auto& answer : bundle.answer_texts) {
        std::string full = bundle.context_text + answer;
        CHECK(full.find("Answer: ") != std::string::npos);  // cue then one space
    }
}

TEST_CASE("apply_chat wraps the context and leaves answers alone") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());

    ChatProfile identity{"identity", std::nullopt, "{prompt}"};
    auto same = apply_chat(bundle, identity);
    CHECK(same.context_text == bundle.context_text);
    CHECK(same.answer_texts == bundle.answer_texts);
    CHECK(same.chat_wrapped);

    ChatProfile wrapped{"inst", std::string("SYS\n"), "[INST] {prompt} [/INST]"};
    auto chat = apply_chat(bundle, wrapped);
    CHECK(chat.context_text == "SYS\n[INST] " + bundle.context_text + " [/INST]");
    CHECK(chat.answer_texts == bundle.answer_texts);

    CHECK_THROWS_AS(apply_chat(chat, wrapped), InvariantError);
}

TEST_CASE("chat profile without {prompt} is rejected") {
    Question q = tu::death_penalty_question();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    ChatProfile bad{"bad", std::nullopt, "no placeholder"};
    CHECK_THROWS_AS(apply_chat(bundle, bad), InvariantError);
}

TEST_CASE("shipped template and chat profiles load") {
    std::string tmpl = load_prompt_template(tu::template_path());
    CHECK(tmpl.find("{Question}") != std::string::npos);
    ChatProfile p = load_chat_profile(tu::data_dir() / "chat_profiles" / "llama2_chat.json");
    CHECK(p.profile_id == "llama2-chat");
    CHECK(p.system_preamble.has_value());
}

TEST_CASE("labels continue past Z for many candidates") {
    Question q = tu::death_penalty_question();
    q.candidates.assign(28, "x");
    q.human_responses.clear();
    auto bundle = render_prompt(q, "USA", tu::kTemplate, tu::small_config());
    CHECK(bundle.answer_texts[25].substr(0, 4) == " Z) ");
    CHECK(bundle.answer_texts[26].substr(0, 5) == " AA) ");
    CHECK(bundle.answer_texts[27].substr(0, 5) == " AB) ");
}
