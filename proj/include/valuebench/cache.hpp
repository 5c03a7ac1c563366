#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "valuebench/backend.hpp"

namespace valuebench {

// Append-only JSONL ledger of scored continuations, keyed by a content
// digest of (model_id, prompt, continuation, convention version). One
// writer, concurrent readers; a write is the append of one complete line.
class CacheStore {
public:
    explicit CacheStore(std::filesystem::path ledger_path);

    static std::string make_key(const std::string& model_id, const std::string& context,
                                const std::string& continuation,
                                const std::string& convention);

    std::optional<TokenScoredContinuation> get(const std::string& key);
    void put(const std::string& key, const std::string& model_id,
             const TokenScoredContinuation& value);

    std::size_t size() const;
    int corrupt_records() const { return corrupt_records_; }
    int truncated_lines() const { return truncated_lines_; }

private:
    void load();

    std::filesystem::path path_;
    std::map<std::string, TokenScoredContinuation> records_;
    int corrupt_records_ = 0;
    int truncated_lines_ = 0;
    mutable std::mutex mutex_;
};

struct CacheCounters {
    int hits = 0;
    int misses = 0;
};

// Cache-through scoring: hit returns the stored record with no backend
// traffic; miss scores, appends, returns.
TokenScoredContinuation cached_score(CacheStore& cache, Backend& backend,
                                     const std::string& context,
                                     const std::string& continuation,
                                     CacheCounters* counters = nullptr);

}  // namespace valuebench
