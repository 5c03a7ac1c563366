#include "valuebench/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "valuebench/analytics.hpp"
#include "valuebench/backend.hpp"
#include "valuebench/cache.hpp"
#include "valuebench/digest.hpp"
#include "valuebench/errors.hpp"
#include "valuebench/prompting.hpp"
#include "valuebench/registry.hpp"
#include "valuebench/reporting.hpp"
#include "valuebench/scoring.hpp"
#include "valuebench/survey.hpp"

namespace valuebench {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
}

struct ProbeTask {
    std::size_t bundle_index;
    std::size_t candidate_index;
    std::string question_id;
    std::string country;
};

}  // namespace

std::string compute_run_id(const std::filesystem::path& survey_path,
                           const std::string& model_id, const std::string& endpoint_kind,
                           const std::filesystem::path& template_path,
                           const std::optional<std::filesystem::path>& chat_profile_path) {
    std::string payload = sha256_file(survey_path);
    payload += '\x1f';
    payload += model_id;
    payload += '\x1f';
    payload += endpoint_kind;
    payload += '\x1f';
    payload += sha256_file(template_path);
    payload += '\x1f';
    payload += chat_profile_path ? sha256_file(*chat_profile_path) : std::string("none");
    payload += '\x1f';
    payload += kScoringConventionVersion;
    return sha256_hex(payload).substr(0, 16);
}

int cmd_validate(const ValidateOptions& options) {
    if (!std::filesystem::exists(options.survey_path) ||
        !std::filesystem::exists(options.grouping_path)) {
        std::cerr << "validate: input file missing\n";
        return kExitUsage;
    }

    ValidationReport report;
    try {
        Survey survey = load_survey(options.survey_path);
        GroupingConfig config = load_grouping_config(options.grouping_path);
        report = validate_survey(survey, config);
    } catch (const std::exception& e) {
        report.violations.push_back(e.what());
    }

    ordered_json j;
    j["probe_ready"] = report.probe_ready();
    j["total_questions"] = report.total_questions;
    j["per_category_counts"] = report.per_category_counts;
    j["per_country_coverage"] = report.per_country_coverage;
    j["k_histogram"] = ordered_json::object();
    for (const auto& [k, n] : report.k_histogram) j["k_histogram"][std::to_string(k)] = n;
    j["violations"] = report.violations;
    j["warnings"] = report.warnings;
    write_text(options.out_dir / "validation_report.json", j.dump(1) + "\n");

    for (const auto& v : report.violations) std::cerr << "violation: " << v << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "validated " << report.total_questions << " questions across "
              << report.per_category_counts.size() << " categories; "
              << report.violations.size() << " violation(s)\n";
    return report.probe_ready() ? kExitOk : kExitFindings;
}

int cmd_probe(const ProbeOptions& options) {
    Survey survey = load_survey(options.survey_path);
    GroupingConfig config = load_grouping_config(options.grouping_path);
    ModelRegistry registry = load_model_registry(options.registry_path);
    std::string template_text = load_prompt_template(options.template_path);

    const ModelRegistryEntry* entry = registry.find(options.model_id);
    if (!entry) {
        throw UsageError("model " + options.model_id + " is not in the registry");
    }

    std::optional<ChatProfile> profile;
    if (options.chat_profile_path) {
        profile = load_chat_profile(*options.chat_profile_path);
    } else if (entry->is_chat) {
        std::cerr << "warning: " << options.model_id
                  << " is a chat model but no chat profile was given\n";
    }

    std::vector<std::string> countries =
        options.countries.empty() ? survey.countries : options.countries;
    std::set<std::string> declared(survey.countries.begin(), survey.countries.end());
    std::size_t known = 0;
    for (const auto& c : countries) {
        if (declared.count(c)) {
            ++known;
        } else {
            std::cerr << "warning: probing country " << c
                      << " not declared in the survey\n";
        }
    }
    if (known == 0) {
        throw UsageError("none of the requested countries appear in the survey");
    }

    RenderOptions render_options{options.multiline_choices};

    std::unique_ptr<Backend> backend;
    const bool is_mock = options.endpoint == "mock";
    if (is_mock) {
        auto mock = std::make_unique<MockBackend>(options.model_id);
        MockBackend::Mode mode = MockBackend::Mode::identity;
        if (options.mock_mode == "reversed") mode = MockBackend::Mode::reversed;
        else if (options.mock_mode == "uniform") mode = MockBackend::Mode::uniform;
        else if (options.mock_mode != "identity") {
            throw UsageError("unknown mock mode: " + options.mock_mode);
        }
        mock->seed_from_survey(survey, template_text, config, countries, mode, profile,
                               render_options);
        backend = std::move(mock);
    } else {
        HttpBackendOptions http;
        http.endpoint = options.endpoint;
        http.model_id = options.model_id;
        http.max_retries = options.max_retries;
        http.backoff_initial_ms = options.backoff_initial_ms;
        http.timeout_seconds = options.timeout_seconds;
        http.strategy = options.wire_strategy;
        if (const char* key = std::getenv("VALUEBENCH_API_KEY")) http.api_key = key;
        backend = std::make_unique<HttpBackend>(std::move(http));
    }

    // Render every (question, country) bundle up front; tasks then fan out
    // per candidate.
    std::vector<PromptBundle> bundles;
    std::vector<ProbeTask> tasks;
    for (const auto& question : survey.questions) {
        for (const auto& country : countries) {
            if (!question.human_responses.count(country)) continue;
            PromptBundle bundle = render_prompt(question, country, template_text, config,
                                                render_options);
            if (profile) bundle = apply_chat(bundle, *profile);
            std::size_t bi = bundles.size();
            for (std::size_t k = 0; k < bundle.answer_texts.size(); ++k) {
                tasks.push_back({bi, k, question.id, country});
            }
            bundles.push_back(std::move(bundle));
        }
    }

    CacheStore cache(options.cache_dir / ("ledger_" + options.model_id + ".jsonl"));
    if (cache.truncated_lines() > 0) {
        std::cerr << "warning: skipped " << cache.truncated_lines()
                  << " truncated cache line(s)\n";
    }
    if (cache.corrupt_records() > 0) {
        std::cerr << "warning: dropped " << cache.corrupt_records()
                  << " corrupt cache record(s)\n";
    }

    std::string started_at = iso_timestamp();
    std::vector<std::optional<TokenScoredContinuation>> results(tasks.size());
    std::vector<std::string> failures(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<long> backend_calls{0};
    std::atomic<int> cache_hits{0};

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const ProbeTask& task = tasks[i];
            const PromptBundle& bundle = bundles[task.bundle_index];
            const std::string& continuation = bundle.answer_texts[task.candidate_index];
            try {
                std::string key = CacheStore::make_key(options.model_id, bundle.context_text,
                                                       continuation,
                                                       kScoringConventionVersion);
                if (auto hit = cache.get(key)) {
                    ++cache_hits;
                    results[i] = std::move(*hit);
                    continue;
                }
                if (options.max_backend_calls > 0 &&
                    backend_calls.fetch_add(1) >= options.max_backend_calls) {
                    failures[i] = "backend call budget exhausted";
                    continue;
                }
                if (options.max_backend_calls <= 0) ++backend_calls;
                results[i] = cached_score(cache, *backend, bundle.context_text, continuation);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    {
        int n_threads = std::max(1, options.concurrency);
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int failed = 0;
    std::vector<std::string> failure_summaries;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (results[i]) continue;
        ++failed;
        if (failure_summaries.size() < 20) {
            failure_summaries.push_back(tasks[i].question_id + "/" + tasks[i].country +
                                        "#" + std::to_string(tasks[i].candidate_index) +
                                        ": " + failures[i]);
        }
    }

    std::string run_id = compute_run_id(options.survey_path, options.model_id,
                                        is_mock ? "mock" : "http", options.template_path,
                                        options.chat_profile_path);

    std::filesystem::create_directories(options.out_dir);
    ordered_json manifest;
    manifest["run_id"] = run_id;
    manifest["model_id"] = options.model_id;
    manifest["endpoint"] = options.endpoint;
    manifest["convention"] = kScoringConventionVersion;
    manifest["survey_digest"] = sha256_file(options.survey_path);
    manifest["template_digest"] = sha256_file(options.template_path);
    manifest["chat_profile_digest"] =
        options.chat_profile_path ? sha256_file(*options.chat_profile_path) : "none";
    manifest["leading_space_convention"] = "single leading space per answer continuation";
    manifest["started_at"] = started_at;
    manifest["finished_at"] = iso_timestamp();
    manifest["counts"] = {{"questions", survey.questions.size()},
                          {"countries", countries.size()},
                          {"records", tasks.size()},
                          {"cache_hits", cache_hits.load()},
                          {"backend_calls", backend_calls.load()},
                          {"failures", failed}};
    manifest["failure_sample"] = failure_summaries;
    write_text(options.out_dir / ("manifest_" + options.model_id + ".json"),
               manifest.dump(1) + "\n");

    if (failed > 0) {
        std::cerr << "probe: " << failed << " of " << tasks.size()
                  << " scores failed; raw-scores file not written\n";
        for (const auto& s : failure_summaries) std::cerr << "  " << s << "\n";
        return kExitBackend;
    }

    // One line per (question, country, candidate), canonical order, fixed
    // field order, 17-significant-digit loglikes: resumed and uninterrupted
    // runs emit identical bytes.
    std::ostringstream raw;
    raw << "{\"type\":\"header\",\"run_id\":" << json(run_id).dump()
        << ",\"convention\":" << json(std::string(kScoringConventionVersion)).dump()
        << ",\"model_id\":" << json(options.model_id).dump() << "}\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& v = *results[i];
        raw << "{\"type\":\"record\",\"question_id\":" << json(tasks[i].question_id).dump()
            << ",\"country\":" << json(tasks[i].country).dump()
            << ",\"candidate_index\":" << tasks[i].candidate_index
            << ",\"loglike\":" << format_double17(v.total_logprob())
            << ",\"num_tokens\":" << v.continuation_token_count
            << ",\"strategy\":" << json(v.strategy).dump()
            << ",\"boundary_warning\":" << (v.boundary_warning ? "true" : "false") << "}\n";
    }
    write_text(options.out_dir / ("raw_scores_" + options.model_id + ".jsonl"), raw.str());

    std::cout << "probed " << tasks.size() << " (question, country, candidate) records ("
              << cache_hits.load() << " cache hits, " << backend_calls.load()
              << " backend calls)\n";
    return kExitOk;
}

namespace {

struct RawScores {
    std::string run_id;
    std::string model_id;
    // (question, country) -> per-candidate loglikes
    std::map<std::pair<std::string, std::string>, std::vector<std::optional<double>>> loglikes;
};

RawScores load_raw_scores(const std::filesystem::path& path, const Survey& survey) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open raw scores: " + path.string());

    RawScores raw;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            if (j.at("convention").get<std::string>() != kScoringConventionVersion) {
                throw InvariantError("raw scores " + path.string() +
                                     " use a different scoring convention");
            }
            raw.run_id = j.at("run_id").get<std::string>();
            raw.model_id = j.at("model_id").get<std::string>();
            continue;
        }
        std::string qid = j.at("question_id").get<std::string>();
        std::string country = j.at("country").get<std::string>();
        const Question* q = survey.find_question(qid);
        if (!q) throw InvariantError("raw scores reference unknown question " + qid);
        auto& slot = raw.loglikes[{qid, country}];
        if (slot.empty()) slot.resize(q->num_candidates());
        std::size_t k = j.at("candidate_index").get<std::size_t>();
        if (k >= slot.size()) {
            throw InvariantError("candidate index out of range for question " + qid);
        }
        slot[k] = j.at("loglike").get<double>();
    }
    if (raw.model_id.empty()) {
        throw ParseError("raw scores " + path.string() + " have no header line");
    }
    return raw;
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& options) {
    Survey survey = load_survey(options.survey_path);
    GroupingConfig config = load_grouping_config(options.grouping_path);
    ModelRegistry registry = load_model_registry(options.registry_path);

    std::vector<std::string> notices;
    ScoreMatrix matrix;
    std::map<std::pair<std::string, std::string>, AnswerDistribution> model_dists;
    std::vector<std::string> run_ids;

    // Human mean scores for every (question, country) in the survey.
    for (const auto& question : survey.questions) {
        ScoreLadder ladder = make_ladder(question.num_candidates());
        for (const auto& [country, dist] : question.human_responses) {
            MeanScoreRecord record;
            record.value = mean_score(dist.probabilities, ladder);
            record.source = "human";
            record.question_id = question.id;
            record.country = country;
            matrix.insert(record);
        }
    }

    for (const auto& path : options.raw_score_files) {
        RawScores raw = load_raw_scores(path, survey);
        run_ids.push_back(raw.run_id);
        for (const auto& [key, lls] : raw.loglikes) {
            const auto& [qid, country] = key;
            bool complete = true;
            std::vector<double> values;
            for (const auto& v : lls) {
                if (!v) { complete = false; break; }
                values.push_back(*v);
            }
            if (!complete) {
                notices.push_back("incomplete candidate scores for " + qid + "/" + country +
                                  " (" + raw.model_id + "); skipped");
                continue;
            }
            AnswerDistribution dist;
            dist.probabilities = normalize(values);
            dist.question_id = qid;
            dist.country = country;
            dist.model_id = raw.model_id;

            ScoreLadder ladder = make_ladder(values.size());
            MeanScoreRecord record;
            record.value = mean_score(dist.probabilities, ladder);
            record.source = "model";
            record.model_id = raw.model_id;
            record.question_id = qid;
            record.country = country;
            matrix.insert(record);
            model_dists[{qid, country}] = std::move(dist);
        }
    }

    std::set<std::string> categories;
    std::set<std::string> groups;
    for (const auto& q : survey.questions) {
        categories.insert(q.category);
        if (config.category_groups.count(q.category)) {
            groups.insert(config.category_groups.at(q.category));
        }
    }

    std::vector<CorrelationResult> country_results;
    std::vector<CorrelationResult> all_results;
    for (const auto& model_id : matrix.model_ids()) {
        for (const auto& country : matrix.countries_for(model_id)) {
            try {
                CorrelationResult r = correlate(matrix, survey, config, model_id, country);
                country_results.push_back(r);
                all_results.push_back(r);
            } catch (const std::exception& e) {
                notices.push_back(e.what());
            }
            for (const auto& category : categories) {
                try {
                    all_results.push_back(
                        correlate(matrix, survey, config, model_id, country, category));
                } catch (const std::exception& e) {
                    notices.push_back(e.what());
                }
            }
            for (const auto& group : groups) {
                try {
                    all_results.push_back(correlate(matrix, survey, config, model_id, country,
                                                    std::nullopt, group));
                } catch (const std::exception& e) {
                    notices.push_back(e.what());
                }
            }
        }
    }

    ordered_json bundle;
    bundle["run_ids"] = run_ids;
    bundle["convention"] = kScoringConventionVersion;
    bundle["pooling"] =
        "per-country correlations pool all questions; continent and western bars are "
        "unweighted means of per-country coefficients";

    bundle["correlations"] = ordered_json::array();
    for (const auto& r : all_results) {
        ordered_json row;
        row["model"] = r.model_id;
        row["country"] = r.country;
        if (r.category) row["category"] = *r.category;
        if (r.group_label) row["group"] = *r.group_label;
        row["n"] = r.n;
        row["coefficient"] = r.coefficient;
        bundle["correlations"].push_back(std::move(row));
    }

    bundle["continent_means"] = ordered_json::array();
    try {
        for (const auto& [key, mean] : aggregate_by_continent(country_results, config)) {
            bundle["continent_means"].push_back(
                {{"model", key.first}, {"continent", key.second}, {"mean_coefficient", mean}});
        }
    } catch (const std::exception& e) {
        notices.push_back(e.what());
    }
    bundle["western_means"] = ordered_json::array();
    for (const auto& [key, mean] : aggregate_by_western(country_results, config)) {
        bundle["western_means"].push_back(
            {{"model", key.first}, {"grouping", key.second}, {"mean_coefficient", mean}});
    }

    ChatComparison chat = compare_chat_vs_base(country_results, registry);
    bundle["chat_comparison"]["rows"] = ordered_json::array();
    for (const auto& row : chat.rows) {
        bundle["chat_comparison"]["rows"].push_back({{"family", row.family},
                                                     {"base_model", row.base_model},
                                                     {"chat_model", row.chat_model},
                                                     {"country", row.country},
                                                     {"base_coefficient", row.base_coefficient},
                                                     {"chat_coefficient", row.chat_coefficient},
                                                     {"delta", row.delta}});
    }
    bundle["chat_comparison"]["unmatched"] = chat.unmatched;

    bundle["divergences"] = ordered_json::array();
    for (const auto& c : divergence_cases(model_dists, survey, options.divergence_limit)) {
        bundle["divergences"].push_back({{"question_id", c.question_id},
                                         {"country", c.country},
                                         {"model", c.model_id},
                                         {"category", c.category},
                                         {"model_top_text", c.model_top_text},
                                         {"model_top_prob", c.model_top_prob},
                                         {"human_top_text", c.human_top_text},
                                         {"human_top_prob", c.human_top_prob},
                                         {"agree", c.agree},
                                         {"divergence", c.divergence}});
    }

    bundle["boxplots"] = ordered_json::array();
    for (const auto& s : category_boxplot_stats(matrix, survey)) {
        bundle["boxplots"].push_back({{"source", s.source},
                                      {"category", s.category},
                                      {"span", s.span},
                                      {"n", s.n},
                                      {"min", s.min},
                                      {"q1", s.q1},
                                      {"median", s.median},
                                      {"q3", s.q3},
                                      {"max", s.max}});
    }
    bundle["notices"] = notices;

    write_text(options.out_dir / "analysis_bundle.json", bundle.dump(1) + "\n");
    for (const auto& n : notices) std::cerr << "notice: " << n << "\n";
    std::cout << "analyzed " << options.raw_score_files.size() << " raw-score file(s); "
              << all_results.size() << " correlation(s), " << notices.size()
              << " notice(s)\n";
    return notices.empty() ? kExitOk : kExitFindings;
}

int cmd_report(const ReportOptions& options) {
    std::ifstream in(options.bundle_path, std::ios::binary);
    if (!in) throw UsageError("cannot open bundle: " + options.bundle_path.string());
    ordered_json bundle;
    try {
        in >> bundle;
    } catch (const json::exception& e) {
        throw ParseError(std::string("analysis bundle is not valid JSON: ") + e.what());
    }
    auto written = write_reports(bundle, options.format, options.out_dir);
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    return kExitOk;
}

}  // namespace valuebench
