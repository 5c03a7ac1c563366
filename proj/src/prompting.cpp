#include "valuebench/prompting.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "valuebench/errors.hpp"

namespace valuebench {

namespace {

using nlohmann::json;

std::string candidate_label(std::size_t index) {
    // A), B), ... Z), AA), AB), ...
    std::string letters;
    std::size_t n = index;
    do {
        letters.insert(letters.begin(), static_cast<char>('A' + n % 26));
        n = n / 26;
    } while (n-- > 0);
    return letters + ")";
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

PromptBundle render_prompt(const Question& question, const std::string& country,
                           const std::string& template_text, const GroupingConfig& config,
                           const RenderOptions& options) {
    for (const char* placeholder : {"{Question}", "{Choices}", "{Country}"}) {
        if (template_text.find(placeholder) == std::string::npos) {
            throw InvariantError(std::string("prompt template missing placeholder ") +
                                 placeholder);
        }
    }

    std::string choices;
    PromptBundle bundle;
    for (std::size_t k = 0; k < question.candidates.size(); ++k) {
        std::string labeled = candidate_label(k) + " " + question.candidates[k];
        if (k > 0) choices += options.multiline_choices ? "\n" : ", ";
        choices += labeled;
        // Fixed single leading space so subword tokenization of the first
        // answer token is identical across candidates and backends.
        bundle.answer_texts.push_back(" " + labeled);
    }

    std::string context = template_text;
    // Strip a single trailing newline so the context ends on the answer cue.
    if (!context.empty() && context.back() == '\n') context.pop_back();
    replace_all(context, "{Question}", question.text);
    replace_all(context, "{Choices}", choices);
    replace_all(context, "{Country}", config.display_name(country));

    bundle.context_text = std::move(context);
    bundle.country = country;
    bundle.question_id = question.id;
    return bundle;
}

PromptBundle apply_chat(const PromptBundle& bundle, const ChatProfile& profile) {
    if (bundle.chat_wrapped) {
        throw InvariantError("bundle for question " + bundle.question_id +
                             " is already chat-wrapped");
    }
    if (profile.turn_markup.find("{prompt}") == std::string::npos) {
        throw InvariantError("chat profile " + profile.profile_id +
                             " turn_markup missing {prompt}");
    }
    std::string wrapped = profile.turn_markup;
    std::size_t pos = wrapped.find("{prompt}");
    wrapped.replace(pos, 8, bundle.context_text);
    if (profile.system_preamble) {
        wrapped = *profile.system_preamble + wrapped;
    }

    PromptBundle out = bundle;
    out.context_text = std::move(wrapped);
    out.chat_wrapped = true;
    return out;
}

std::string load_prompt_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open template: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ChatProfile load_chat_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open chat profile: " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("chat profile is not valid JSON: ") + e.what());
    }
    ChatProfile profile;
    try {
        profile.profile_id = j.at("profile_id").get<std::string>();
        profile.turn_markup = j.at("turn_markup").get<std::string>();
        if (j.contains("system_preamble")) {
            profile.system_preamble = j.at("system_preamble").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("chat profile schema mismatch: ") + e.what());
    }
    return profile;
}

}  // namespace valuebench
