#pragma once

// Provider-agnostic chat-completion client. Speaks the OpenAI-style HTTP
// contract (POST model/messages/temperature, text taken from the first
// choice) with an adapter seam for other wire shapes, and a line-delimited
// record/replay cache keyed by a content hash so evaluation runs are
// reproducible offline.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "sls/errors.hpp"

namespace sls {

struct RetryPolicy {
    int max_attempts = 3;
    double backoff_base_seconds = 0.5;  // doubles per attempt
};

struct ProviderConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4o";
    double temperature = 0.0;  // queries are meant to be repeatable
    int max_output_tokens = 4096;
    std::string credential_env_var = "OPENAI_API_KEY";
    double timeout_seconds = 120.0;
    RetryPolicy retry;
    int concurrency_limit = 4;
};

struct LlmRequest {
    std::string prompt_text;
    std::string request_id;  // content hash of (model, temperature, prompt)

    static LlmRequest make(const ProviderConfig& cfg, std::string prompt_text);
};

struct LlmResponse {
    std::string raw_text;
    std::string provider_meta;  // JSON text from the provider, "{}" for replays
    bool from_cache = false;
};

enum class CacheMode { Record, Replay, Passthrough };

CacheMode parse_cache_mode(const std::string& name);
const char* cache_mode_name(CacheMode mode);

// Append-only store of responses, one JSON object per line:
// {request_id, model, temperature, prompt_sha, response_text, timestamp}.
class ResponseCache {
public:
    ResponseCache() : mode_(CacheMode::Passthrough) {}
    ResponseCache(std::string path, CacheMode mode);

    ResponseCache(ResponseCache&& other) noexcept
        : path_(std::move(other.path_)),
          mode_(other.mode_),
          entries_(std::move(other.entries_)) {}
    ResponseCache& operator=(ResponseCache&& other) noexcept {
        path_ = std::move(other.path_);
        mode_ = other.mode_;
        entries_ = std::move(other.entries_);
        return *this;
    }

    CacheMode mode() const { return mode_; }
    const std::string& path() const { return path_; }
    std::size_t size() const;

    bool lookup(const std::string& request_id, std::string& response_text) const;
    void append(const std::string& request_id, const std::string& model, double temperature,
                const std::string& prompt_sha, const std::string& response_text);

private:
    std::string path_;
    CacheMode mode_;
    std::map<std::string, std::string> entries_;
    mutable std::mutex mutex_;
};

// Hex SHA-256 of a canonical, length-prefixed encoding of the fields.
std::string request_hash(const std::string& model_name, double temperature,
                         const std::string& prompt_text);
std::string sha256_hex(const std::string& data);

// Seam for alternate provider wire shapes; the default adapter implements the
// OpenAI chat-completion contract.
struct WireAdapter {
    std::function<std::string(const ProviderConfig&, const LlmRequest&)> build_body;
    std::function<std::string(const std::string& response_body)> extract_text;
};
const WireAdapter& openai_wire_adapter();

class LlmGateway {
public:
    LlmGateway(ProviderConfig cfg, ResponseCache cache,
               const WireAdapter& adapter = openai_wire_adapter());

    // Replay: cache lookup only (CacheMiss when absent, never a live call).
    // Record: live call, then append. Passthrough: live call only.
    LlmResponse complete(const LlmRequest& request);

    const ProviderConfig& config() const { return cfg_; }
    ResponseCache& cache() { return cache_; }

private:
    LlmResponse live_call(const LlmRequest& request);

    ProviderConfig cfg_;
    ResponseCache cache_;
    WireAdapter adapter_;
    std::mutex slot_mutex_;
    int in_flight_ = 0;
};

}  // namespace sls
