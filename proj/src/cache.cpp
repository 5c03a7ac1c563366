#include "valuebench/cache.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "valuebench/digest.hpp"
#include "valuebench/errors.hpp"

namespace valuebench {

namespace {

using nlohmann::json;

// Canonical byte string of the value fields; created_at is excluded so the
// digest is a pure function of the scored result.
std::string value_canonical(const TokenScoredContinuation& v) {
    std::string s = v.strategy;
    s += '\x1f';
    s += std::to_string(v.context_token_count);
    s += '\x1f';
    s += v.boundary_warning ? '1' : '0';
    for (const auto& t : v.tokens) {
        s += '\x1e';
        s += t.text;
        s += '\x1f';
        s += format_double17(t.logprob);
    }
    return s;
}

// One complete JSONL line with fixed field order; logprobs carry 17
// significant digits so the stored decimal round-trips bit-exactly.
std::string encode_record(const std::string& key, const std::string& model_id,
                          const TokenScoredContinuation& v) {
    std::string line = "{\"key\":" + json(key).dump();
    line += ",\"model_id\":" + json(model_id).dump();
    line += ",\"convention\":" + json(std::string(kScoringConventionVersion)).dump();
    line += ",\"strategy\":" + json(v.strategy).dump();
    line += ",\"context_tokens\":" + std::to_string(v.context_token_count);
    line += ",\"boundary_warning\":" + std::string(v.boundary_warning ? "true" : "false");
    line += ",\"tokens\":[";
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
        if (i) line += ',';
        line += '[' + json(v.tokens[i].text).dump() + ',' + format_double17(v.tokens[i].logprob) + ']';
    }
    line += "],\"value_digest\":" + json(sha256_hex(value_canonical(v))).dump();
    line += ",\"created_at\":" + std::to_string(static_cast<long long>(std::time(nullptr)));
    line += "}";
    return line;
}

}  // namespace

CacheStore::CacheStore(std::filesystem::path ledger_path) : path_(std::move(ledger_path)) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    load();
}

std::string CacheStore::make_key(const std::string& model_id, const std::string& context,
                                 const std::string& continuation,
                                 const std::string& convention) {
    std::string payload = model_id;
    payload += '\x1f';
    payload += context;
    payload += '\x1f';
    payload += continuation;
    payload += '\x1f';
    payload += convention;
    return sha256_hex(payload);
}

void CacheStore::load() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            // Truncated tail from an interrupted append; earlier records stand.
            ++truncated_lines_;
            continue;
        }
        try {
            TokenScoredContinuation v;
            v.strategy = j.at("strategy").get<std::string>();
            v.context_token_count = j.at("context_tokens").get<int>();
            v.boundary_warning = j.at("boundary_warning").get<bool>();
            for (const auto& t : j.at("tokens")) {
                v.tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
            }
            v.continuation_token_count = static_cast<int>(v.tokens.size());

            if (sha256_hex(value_canonical(v)) != j.at("value_digest").get<std::string>()) {
                ++corrupt_records_;
                continue;  // treated as a miss
            }
            if (j.at("convention").get<std::string>() != kScoringConventionVersion) {
                continue;  // stale convention, never served
            }
            records_[j.at("key").get<std::string>()] = std::move(v);
        } catch (const json::exception&) {
            ++corrupt_records_;
        }
    }
}

std::optional<TokenScoredContinuation> CacheStore::get(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void CacheStore::put(const std::string& key, const std::string& model_id,
                     const TokenScoredContinuation& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (records_.count(key)) return;  // append-only mapping
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) {
        throw ParseError("cache ledger is not writable: " + path_.string());
    }
    out << encode_record(key, model_id, value) << '\n';
    out.flush();
    records_[key] = value;
}

std::size_t CacheStore::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_.size();
}

TokenScoredContinuation cached_score(CacheStore& cache, Backend& backend,
                                     const std::string& context,
                                     const std::string& continuation,
                                     CacheCounters* counters) {
    std::string key = CacheStore::make_key(backend.model_id(), context, continuation,
                                           kScoringConventionVersion);
    if (auto hit = cache.get(key)) {
        if (counters) ++counters->hits;
        return *hit;
    }
    TokenScoredContinuation fresh = score_continuation(backend, context, continuation);
    cache.put(key, backend.model_id(), fresh);
    if (counters) ++counters->misses;
    return fresh;
}

}  // namespace valuebench
