#include "valuebench/survey.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "valuebench/errors.hpp"

namespace valuebench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kDistributionSumTolerance = 1e-6;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_question_invariants(const Question& q) {
    if (q.candidates.size() < 2) {
        throw InvariantError("question " + q.id + ": candidates must have K >= 2 entries");
    }
    for (const auto& [country, dist] : q.human_responses) {
        if (dist.probabilities.size() != q.candidates.size()) {
            throw InvariantError("question " + q.id + ": human_responses[" + country +
                                 "] has " + std::to_string(dist.probabilities.size()) +
                                 " entries, expected " + std::to_string(q.candidates.size()));
        }
        double sum = 0;
        for (double p : dist.probabilities) {
            if (!(p >= 0)) {
                throw InvariantError("question " + q.id + ": human_responses[" + country +
                                     "] has a negative entry");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kDistributionSumTolerance) {
            throw InvariantError("question " + q.id + ": human_responses[" + country +
                                 "] sums to " + std::to_string(sum) + ", expected 1");
        }
    }
}

}  // namespace

const Question* Survey::find_question(const std::string& id) const {
    for (const auto& q : questions) {
        if (q.id == id) return &q;
    }
    return nullptr;
}

bool GroupingConfig::is_western(const std::string& country) const {
    return std::find(western.begin(), western.end(), country) != western.end();
}

std::string GroupingConfig::display_name(const std::string& country) const {
    auto it = country_names.find(country);
    return it != country_names.end() ? it->second : country;
}

Survey parse_survey(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("survey file is not valid JSON: ") + e.what());
    }

    Survey survey;
    try {
        survey.survey_id = j.at("survey_id").get<std::string>();
        if (j.contains("metadata")) {
            for (const auto& [k, v] : j.at("metadata").items()) {
                survey.metadata[k] = v.get<std::string>();
            }
        }
        survey.countries = j.at("countries").get<std::vector<std::string>>();
        for (const auto& jq : j.at("questions")) {
            Question q;
            q.id = jq.at("id").get<std::string>();
            q.category = jq.at("category").get<std::string>();
            q.text = jq.at("text").get<std::string>();
            q.candidates = jq.at("candidates").get<std::vector<std::string>>();
            for (const auto& [country, probs] : jq.at("human_responses").items()) {
                q.human_responses[country] =
                    HumanDistribution{probs.get<std::vector<double>>()};
            }
            survey.questions.push_back(std::move(q));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("survey schema mismatch: ") + e.what());
    }

    std::set<std::string> seen_ids;
    std::set<std::string> declared(survey.countries.begin(), survey.countries.end());
    for (const auto& q : survey.questions) {
        if (!seen_ids.insert(q.id).second) {
            throw InvariantError("question " + q.id + ": duplicate id");
        }
        check_question_invariants(q);
        for (const auto& [country, dist] : q.human_responses) {
            if (!declared.count(country)) {
                throw InvariantError("question " + q.id + ": human_responses country " +
                                     country + " missing from survey countries list");
            }
        }
    }
    return survey;
}

Survey load_survey(const std::filesystem::path& path) {
    return parse_survey(read_text_file(path));
}

std::string serialize_survey(const Survey& survey) {
    ordered_json j;
    j["survey_id"] = survey.survey_id;
    j["metadata"] = ordered_json::object();
    for (const auto& [k, v] : survey.metadata) j["metadata"][k] = v;
    j["countries"] = survey.countries;
    j["questions"] = ordered_json::array();
    for (const auto& q : survey.questions) {
        ordered_json jq;
        jq["id"] = q.id;
        jq["category"] = q.category;
        jq["text"] = q.text;
        jq["candidates"] = q.candidates;
        jq["human_responses"] = ordered_json::object();
        for (const auto& [country, dist] : q.human_responses) {
            jq["human_responses"][country] = dist.probabilities;
        }
        j["questions"].push_back(std::move(jq));
    }
    return j.dump(1);
}

GroupingConfig load_grouping_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("grouping config is not valid JSON: ") + e.what());
    }
    GroupingConfig config;
    try {
        for (const auto& [k, v] : j.at("continent_of").items()) {
            config.continent_of[k] = v.get<std::string>();
        }
        config.western = j.at("western").get<std::vector<std::string>>();
        for (const auto& [k, v] : j.at("category_groups").items()) {
            config.category_groups[k] = v.get<std::string>();
        }
        if (j.contains("country_names")) {
            for (const auto& [k, v] : j.at("country_names").items()) {
                config.country_names[k] = v.get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("grouping config schema mismatch: ") + e.what());
    }

    std::set<std::string> labels;
    for (const auto& [cat, label] : config.category_groups) labels.insert(label);
    if (labels.size() > 2) {
        throw InvariantError("category_groups uses more than two group labels");
    }
    return config;
}

ValidationReport validate_survey(const Survey& survey, const GroupingConfig& config) {
    ValidationReport report;
    report.total_questions = static_cast<int>(survey.questions.size());
    if (survey.questions.empty()) {
        report.warnings.push_back("survey has zero questions");
    }

    for (const auto& q : survey.questions) {
        report.per_category_counts[q.category] += 1;
        report.k_histogram[static_cast<int>(q.num_candidates())] += 1;
        for (const auto& [country, dist] : q.human_responses) {
            report.per_country_coverage[country] += 1;
            double sum = 0;
            bool negative = false;
            for (double p : dist.probabilities) {
                if (p < 0) negative = true;
                sum += p;
            }
            if (negative) {
                report.violations.push_back("question " + q.id + ": negative probability for " +
                                            country);
            }
            if (std::abs(sum - 1.0) > kDistributionSumTolerance) {
                report.violations.push_back("question " + q.id + ": distribution for " +
                                            country + " sums to " + std::to_string(sum));
            }
        }
        if (q.candidates.size() < 2) {
            report.violations.push_back("question " + q.id + ": fewer than 2 candidates");
        }
        if (!config.category_groups.count(q.category)) {
            report.violations.push_back("question " + q.id + ": category \"" + q.category +
                                        "\" not in declared category list");
        }
    }

    for (const auto& country : survey.countries) {
        if (!config.continent_of.count(country)) {
            report.violations.push_back("unmapped country: " + country +
                                        " has no continent assignment");
        }
    }
    return report;
}

std::string category_group_of(const std::string& category, const GroupingConfig& config) {
    auto it = config.category_groups.find(category);
    if (it == config.category_groups.end()) {
        throw InvariantError("unknown category: " + category);
    }
    return it->second;
}

}  // namespace valuebench
