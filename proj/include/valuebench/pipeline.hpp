#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace valuebench {

// Exit-code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBackend = 3;

struct ValidateOptions {
    std::filesystem::path survey_path;
    std::filesystem::path grouping_path;
    std::filesystem::path out_dir = ".";
};

struct ProbeOptions {
    std::filesystem::path survey_path;
    std::filesystem::path grouping_path;
    std::filesystem::path registry_path;
    std::filesystem::path template_path;
    std::optional<std::filesystem::path> chat_profile_path;
    std::string model_id;
    std::string endpoint = "mock";     // URL or "mock"
    std::string mock_mode = "identity"; // identity | reversed | uniform
    std::vector<std::string> countries; // empty = all survey countries
    int concurrency = 8;
    int max_retries = 3;
    int backoff_initial_ms = 100;
    int timeout_seconds = 60;
    std::string wire_strategy = "auto"; // auto | echo | diff
    bool multiline_choices = false;
    long max_backend_calls = 0;         // 0 = unlimited; budget cut-off otherwise
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path out_dir = ".";
};

struct AnalyzeOptions {
    std::vector<std::filesystem::path> raw_score_files;
    std::filesystem::path survey_path;
    std::filesystem::path grouping_path;
    std::filesystem::path registry_path;
    std::size_t divergence_limit = 20;
    std::filesystem::path out_dir = ".";
};

struct ReportOptions {
    std::filesystem::path bundle_path;
    std::string format = "csv";  // csv | json
    std::filesystem::path out_dir = ".";
};

int cmd_validate(const ValidateOptions& options);
int cmd_probe(const ProbeOptions& options);
int cmd_analyze(const AnalyzeOptions& options);
int cmd_report(const ReportOptions& options);

// Deterministic run id: digest of the exact input files and conventions, so
// repeated runs with identical inputs emit identical files.
std::string compute_run_id(const std::filesystem::path& survey_path,
                           const std::string& model_id, const std::string& endpoint_kind,
                           const std::filesystem::path& template_path,
                           const std::optional<std::filesystem::path>& chat_profile_path);

}  // namespace valuebench
