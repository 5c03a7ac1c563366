#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "valuebench/errors.hpp"
#include "valuebench/pipeline.hpp"

using namespace valuebench;

int main(int argc, char** argv) {
    CLI::App app{"Survey-based probing of language model value judgments"};
    app.require_subcommand(1);

    ValidateOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "Validate a survey file");
    validate->add_option("--survey", validate_opts.survey_path, "Survey JSON file")->required();
    validate->add_option("--grouping-config", validate_opts.grouping_path,
                         "Grouping config JSON")->required();
    validate->add_option("--out-dir", validate_opts.out_dir, "Output directory");

    ProbeOptions probe_opts;
    auto* probe = app.add_subcommand("probe", "Score answer candidates against a backend");
    probe->add_option("--survey", probe_opts.survey_path, "Survey JSON file")->required();
    probe->add_option("--grouping-config", probe_opts.grouping_path,
                      "Grouping config JSON")->required();
    probe->add_option("--registry", probe_opts.registry_path, "Model registry JSON")->required();
    probe->add_option("--template", probe_opts.template_path, "Prompt template file")->required();
    probe->add_option("--chat-profile", probe_opts.chat_profile_path,
                      "Chat profile JSON (wraps prompts for chat models)");
    probe->add_option("--model", probe_opts.model_id, "Registered model id")->required();
    probe->add_option("--endpoint", probe_opts.endpoint,
                      "Completions endpoint URL, or \"mock\"");
    probe->add_option("--mock-mode", probe_opts.mock_mode,
                      "Mock seeding: identity, reversed, or uniform");
    probe->add_option("--countries", probe_opts.countries,
                      "Comma-separated country codes to probe (default: all in the survey)")
        ->delimiter(',');
    probe->add_option("--concurrency", probe_opts.concurrency, "In-flight request limit");
    probe->add_option("--max-retries", probe_opts.max_retries, "Retries per request");
    probe->add_option("--timeout", probe_opts.timeout_seconds, "Request timeout (seconds)");
    probe->add_option("--wire-strategy", probe_opts.wire_strategy,
                      "Logprob extraction: auto, echo, or diff");
    probe->add_flag("--multiline-choices", probe_opts.multiline_choices,
                    "Render one choice per line instead of a single line");
    probe->add_option("--max-calls", probe_opts.max_backend_calls,
                      "Stop after this many backend calls (0 = unlimited)");
    probe->add_option("--cache-dir", probe_opts.cache_dir, "Score cache directory");
    probe->add_option("--out-dir", probe_opts.out_dir, "Output directory");

    AnalyzeOptions analyze_opts;
    auto* analyze = app.add_subcommand("analyze", "Correlate model and human mean scores");
    analyze->add_option("--raw-scores", analyze_opts.raw_score_files,
                        "Raw-score JSONL files from probe")->required();
    analyze->add_option("--survey", analyze_opts.survey_path, "Survey JSON file")->required();
    analyze->add_option("--grouping-config", analyze_opts.grouping_path,
                        "Grouping config JSON")->required();
    analyze->add_option("--registry", analyze_opts.registry_path,
                        "Model registry JSON")->required();
    analyze->add_option("--divergence-limit", analyze_opts.divergence_limit,
                        "Max divergence cases to keep");
    analyze->add_option("--out-dir", analyze_opts.out_dir, "Output directory");

    ReportOptions report_opts;
    auto* report = app.add_subcommand("report", "Emit figure-equivalent tables");
    report->add_option("--bundle", report_opts.bundle_path,
                       "analysis_bundle.json from analyze")->required();
    report->add_option("--format", report_opts.format, "csv or json");
    report->add_option("--out-dir", report_opts.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(validate_opts);
        if (*probe) return cmd_probe(probe_opts);
        if (*analyze) return cmd_analyze(analyze_opts);
        if (*report) return cmd_report(report_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFindings;
    }
    return kExitUsage;
}
