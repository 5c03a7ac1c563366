#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace valuebench {

struct ModelRegistryEntry {
    std::string model_id;
    std::string family;
    double parameter_count = 0;   // billions
    double training_tokens = 0;   // billions
    bool is_chat = false;
    std::optional<std::string> base_model_id;
    std::string size_group;       // "small" | "large"
};

class ModelRegistry {
public:
    // large_counts: parameter counts (in billions) that define the "large" group.
    explicit ModelRegistry(std::vector<ModelRegistryEntry> entries,
                           std::vector<double> large_counts = {13, 34, 70});

    const ModelRegistryEntry* find(const std::string& model_id) const;
    const ModelRegistryEntry& at(const std::string& model_id) const;  // throws InvariantError
    const std::vector<ModelRegistryEntry>& entries() const { return entries_; }

    // Chat entries whose base_model_id is missing from the registry.
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::vector<ModelRegistryEntry> entries_;
    std::vector<std::string> warnings_;
};

ModelRegistry load_model_registry(const std::filesystem::path& path);

}  // namespace valuebench
