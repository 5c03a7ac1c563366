#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "valuebench/survey.hpp"

namespace valuebench {

struct PromptBundle {
    std::string context_text;               // up to and including the answer cue
    std::vector<std::string> answer_texts;  // " A) ...", " B) ...", candidate order
    std::string country;
    std::string question_id;
    bool chat_wrapped = false;
};

struct ChatProfile {
    std::string profile_id;
    std::optional<std::string> system_preamble;
    std::string turn_markup;  // must contain {prompt}
};

struct RenderOptions {
    bool multiline_choices = false;  // default: single comma-separated line
};

// Template placeholders: {Question}, {Choices}, {Country}. Throws
// InvariantError when a required placeholder is missing.
PromptBundle render_prompt(const Question& question, const std::string& country,
                           const std::string& template_text,
                           const GroupingConfig& config,
                           const RenderOptions& options = {});

// Wraps the context per profile; answer texts are untouched. Applying a
// profile to an already-wrapped bundle throws InvariantError.
PromptBundle apply_chat(const PromptBundle& bundle, const ChatProfile& profile);

std::string load_prompt_template(const std::filesystem::path& path);
ChatProfile load_chat_profile(const std::filesystem::path& path);

}  // namespace valuebench
