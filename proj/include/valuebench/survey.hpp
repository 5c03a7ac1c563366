#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace valuebench {

// Empirical answer frequencies of one country for one question.
// Entries are nonnegative and sum to 1 within 1e-6.
struct HumanDistribution {
    std::vector<double> probabilities;
};

struct Question {
    std::string id;
    std::string category;
    std::string text;
    // Candidate answer texts, ordered from the score -1 end to the +1 end.
    // Letter labels (A), B), ...) are positional and assigned at render time.
    std::vector<std::string> candidates;
    std::map<std::string, HumanDistribution> human_responses;  // ISO alpha-3 -> dist

    std::size_t num_candidates() const { return candidates.size(); }
};

struct Survey {
    std::string survey_id;
    std::map<std::string, std::string> metadata;
    std::vector<std::string> countries;
    std::vector<Question> questions;

    const Question* find_question(const std::string& id) const;
};

struct GroupingConfig {
    std::map<std::string, std::string> continent_of;    // country -> continent
    std::vector<std::string> western;                   // country codes
    std::map<std::string, std::string> category_groups; // category -> group label
    std::map<std::string, std::string> country_names;   // country -> display name

    bool is_western(const std::string& country) const;
    // Display name for prompts; falls back to the code if unmapped.
    std::string display_name(const std::string& country) const;
};

struct ValidationReport {
    std::map<std::string, int> per_category_counts;
    std::map<std::string, int> per_country_coverage;  // country -> #questions answered
    std::map<int, int> k_histogram;
    int total_questions = 0;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool probe_ready() const { return violations.empty(); }
};

// Parses and checks type invariants; throws ParseError / InvariantError
// (the latter names the offending question id and field).
Survey load_survey(const std::filesystem::path& path);
Survey parse_survey(const std::string& json_text);
std::string serialize_survey(const Survey& survey);

GroupingConfig load_grouping_config(const std::filesystem::path& path);

// Pure; never throws — problems land in the report.
ValidationReport validate_survey(const Survey& survey, const GroupingConfig& config);

// One of the two group labels; throws InvariantError for unknown categories.
std::string category_group_of(const std::string& category, const GroupingConfig& config);

}  // namespace valuebench
