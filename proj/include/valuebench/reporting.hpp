#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace valuebench {

// Integer percent, rounded half away from zero (0.825 -> 83).
int round_percent(double probability);

// "Never justifiable (97%)"
std::string top_label(const std::string& candidate_text, double probability);

// Emit one file per figure-equivalent table from an analysis bundle.
// format: "csv" | "json". Returns the written paths.
std::vector<std::filesystem::path> write_reports(const nlohmann::ordered_json& bundle,
                                                 const std::string& format,
                                                 const std::filesystem::path& out_dir);

}  // namespace valuebench
