#include "valuebench/reporting.hpp"

#include <cmath>
#include <fstream>

#include "valuebench/digest.hpp"
#include "valuebench/errors.hpp"

namespace valuebench {

namespace {

using nlohmann::ordered_json;

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += "\"";
    return quoted;
}

std::string num(const ordered_json& j) { return format_double17(j.get<double>()); }

class TableWriter {
public:
    TableWriter(const std::filesystem::path& out_dir, const std::string& format,
                const std::string& header_comment)
        : out_dir_(out_dir), format_(format), header_comment_(header_comment) {}

    // rows: array of arrays of pre-formatted strings; raw: the JSON rows for
    // the json rendering.
    std::filesystem::path write(const std::string& name,
                                const std::vector<std::string>& columns,
                                const std::vector<std::vector<std::string>>& rows,
                                const ordered_json& raw) {
        std::filesystem::create_directories(out_dir_);
        if (format_ == "csv") {
            auto path = out_dir_ / (name + ".csv");
            std::ofstream out(path, std::ios::binary);
            out << "# " << header_comment_ << "\n";
            for (std::size_t i = 0; i < columns.size(); ++i) {
                out << (i ? "," : "") << csv_field(columns[i]);
            }
            out << "\n";
            for (const auto& row : rows) {
                for (std::size_t i = 0; i < row.size(); ++i) {
                    out << (i ? "," : "") << csv_field(row[i]);
                }
                out << "\n";
            }
            return path;
        }
        auto path = out_dir_ / (name + ".json");
        ordered_json doc;
        doc["header"] = header_comment_;
        doc["rows"] = raw;
        std::ofstream out(path, std::ios::binary);
        out << doc.dump(1) << "\n";
        return path;
    }

private:
    std::filesystem::path out_dir_;
    std::string format_;
    std::string header_comment_;
};

}  // namespace

int round_percent(double probability) {
    double scaled = probability * 100.0;
    return static_cast<int>(scaled >= 0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5));
}

std::string top_label(const std::string& candidate_text, double probability) {
    return candidate_text + " (" + std::to_string(round_percent(probability)) + "%)";
}

std::vector<std::filesystem::path> write_reports(const ordered_json& bundle,
                                                 const std::string& format,
                                                 const std::filesystem::path& out_dir) {
    if (format != "csv" && format != "json") {
        throw UsageError("unknown report format: " + format);
    }
    std::string header = "run_id=" + bundle.at("run_ids").dump() +
                         " convention=" + bundle.at("convention").get<std::string>() +
                         " pooling=" + bundle.at("pooling").get<std::string>();
    TableWriter writer(out_dir, format, header);
    std::vector<std::filesystem::path> written;

    {
        std::vector<std::vector<std::string>> rows;
        ordered_json raw = ordered_json::array();
        for (const auto& r : bundle.at("correlations")) {
            if (r.contains("category") || r.contains("group")) continue;
            rows.push_back({r.at("model").get<std::string>(), r.at("country").get<std::string>(),
                            std::to_string(r.at("n").get<int>()), num(r.at("coefficient"))});
            raw.push_back(r);
        }
        written.push_back(writer.write("correlations_country",
                                       {"model", "country", "n", "coefficient"}, rows, raw));
    }
    {
        std::vector<std::vector<std::string>> rows;
        ordered_json raw = ordered_json::array();
        for (const auto& r : bundle.at("correlations")) {
            if (!r.contains("category")) continue;
            rows.push_back({r.at("model").get<std::string>(), r.at("country").get<std::string>(),
                            r.at("category").get<std::string>(),
                            std::to_string(r.at("n").get<int>()), num(r.at("coefficient"))});
            raw.push_back(r);
        }
        written.push_back(writer.write(
            "correlations_category", {"model", "country", "category", "n", "coefficient"},
            rows, raw));
    }
    {
        std::vector<std::vector<std::string>> rows;
        ordered_json raw = ordered_json::array();
        for (const auto& r : bundle.at("correlations")) {
            if (!r.contains("group")) continue;
            rows.push_back({r.at("model").get<std::string>(), r.at("country").get<std::string>(),
                            r.at("group").get<std::string>(),
                            std::to_string(r.at("n").get<int>()), num(r.at("coefficient"))});
            raw.push_back(r);
        }
        written.push_back(writer.write("correlations_group",
                                       {"model", "country", "group", "n", "coefficient"},
                                       rows, raw));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : bundle.at("continent_means")) {
            rows.push_back({r.at("model").get<std::string>(), r.at("continent").get<std::string>(),
                            num(r.at("mean_coefficient"))});
        }
        written.push_back(writer.write("continent_bars",
                                       {"model", "continent", "mean_coefficient"}, rows,
                                       bundle.at("continent_means")));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : bundle.at("western_means")) {
            rows.push_back({r.at("model").get<std::string>(), r.at("grouping").get<std::string>(),
                            num(r.at("mean_coefficient"))});
        }
        written.push_back(writer.write("western_bars",
                                       {"model", "grouping", "mean_coefficient"}, rows,
                                       bundle.at("western_means")));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : bundle.at("chat_comparison").at("rows")) {
            rows.push_back({r.at("family").get<std::string>(),
                            r.at("base_model").get<std::string>(),
                            r.at("chat_model").get<std::string>(),
                            r.at("country").get<std::string>(), num(r.at("base_coefficient")),
                            num(r.at("chat_coefficient")), num(r.at("delta"))});
        }
        written.push_back(writer.write("chat_comparison",
                                       {"family", "base_model", "chat_model", "country",
                                        "base_coefficient", "chat_coefficient", "delta"},
                                       rows, bundle.at("chat_comparison").at("rows")));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& m : bundle.at("chat_comparison").at("unmatched")) {
            rows.push_back({m.get<std::string>()});
        }
        written.push_back(writer.write("chat_unmatched", {"chat_model"}, rows,
                                       bundle.at("chat_comparison").at("unmatched")));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : bundle.at("divergences")) {
            rows.push_back({r.at("question_id").get<std::string>(),
                            r.at("country").get<std::string>(),
                            top_label(r.at("model_top_text").get<std::string>(),
                                      r.at("model_top_prob").get<double>()),
                            top_label(r.at("human_top_text").get<std::string>(),
                                      r.at("human_top_prob").get<double>()),
                            r.at("agree").get<bool>() ? "agree" : "disagree",
                            r.at("model").get<std::string>(),
                            r.at("category").get<std::string>(), num(r.at("divergence"))});
        }
        written.push_back(writer.write("divergences",
                                       {"question_id", "country", "model_top", "human_top",
                                        "agreement", "model", "category", "divergence"},
                                       rows, bundle.at("divergences")));
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : bundle.at("boxplots")) {
            rows.push_back({r.at("source").get<std::string>(), r.at("category").get<std::string>(),
                            r.at("span").get<std::string>(), std::to_string(r.at("n").get<int>()),
                            num(r.at("min")), num(r.at("q1")), num(r.at("median")),
                            num(r.at("q3")), num(r.at("max"))});
        }
        written.push_back(writer.write("category_boxplots",
                                       {"source", "category", "span", "n", "min", "q1",
                                        "median", "q3", "max"},
                                       rows, bundle.at("boxplots")));
    }
    return written;
}

}  // namespace valuebench
