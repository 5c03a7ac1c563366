#include "valuebench/registry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "valuebench/errors.hpp"

namespace valuebench {

namespace {
using nlohmann::json;
}

ModelRegistry::ModelRegistry(std::vector<ModelRegistryEntry> entries,
                             std::vector<double> large_counts)
    : entries_(std::move(entries)) {
    auto is_large = [&](double p) {
        return std::any_of(large_counts.begin(), large_counts.end(),
                           [&](double c) { return std::abs(c - p) < 1e-9; });
    };
    for (auto& e : entries_) {
        std::string derived = is_large(e.parameter_count) ? "large" : "small";
        if (e.size_group.empty()) {
            e.size_group = derived;
        } else if (e.size_group != derived) {
            throw InvariantError("model " + e.model_id + ": size_group \"" + e.size_group +
                                 "\" inconsistent with parameter_count " +
                                 std::to_string(e.parameter_count));
        }
    }
    for (const auto& e : entries_) {
        if (!e.is_chat && e.base_model_id) {
            throw InvariantError("model " + e.model_id +
                                 ": base_model_id set on a non-chat entry");
        }
        if (e.is_chat && e.base_model_id) {
            const auto* base = find(*e.base_model_id);
            if (!base) {
                throw InvariantError("model " + e.model_id + ": base_model_id " +
                                     *e.base_model_id + " not registered");
            }
            if (base->is_chat) {
                throw InvariantError("model " + e.model_id + ": base_model_id " +
                                     *e.base_model_id + " is itself a chat model");
            }
        }
        if (e.is_chat && !e.base_model_id) {
            warnings_.push_back("chat model " + e.model_id + " has no base_model_id");
        }
    }
}

const ModelRegistryEntry* ModelRegistry::find(const std::string& model_id) const {
    for (const auto& e : entries_) {
        if (e.model_id == model_id) return &e;
    }
    return nullptr;
}

const ModelRegistryEntry& ModelRegistry::at(const std::string& model_id) const {
    const auto* e = find(model_id);
    if (!e) {
        throw InvariantError("model " + model_id + " not in registry");
    }
    return *e;
}

ModelRegistry load_model_registry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open registry: " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("registry is not valid JSON: ") + e.what());
    }

    std::vector<double> large_counts = {13, 34, 70};
    if (j.contains("large_parameter_counts")) {
        large_counts = j.at("large_parameter_counts").get<std::vector<double>>();
    }
    std::vector<ModelRegistryEntry> entries;
    try {
        for (const auto& jm : j.at("models")) {
            ModelRegistryEntry e;
            e.model_id = jm.at("model_id").get<std::string>();
            e.family = jm.at("family").get<std::string>();
            e.parameter_count = jm.at("parameter_count").get<double>();
            e.training_tokens = jm.at("training_tokens").get<double>();
            e.is_chat = jm.at("is_chat").get<bool>();
            if (jm.contains("base_model_id")) {
                e.base_model_id = jm.at("base_model_id").get<std::string>();
            }
            if (jm.contains("size_group")) {
                e.size_group = jm.at("size_group").get<std::string>();
            }
            entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("registry schema mismatch: ") + e.what());
    }
    return ModelRegistry(std::move(entries), std::move(large_counts));
}

}  // namespace valuebench
