#include "sls/gateway.hpp"

#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#include "httplib.h"
#include "json.hpp"

namespace sls {

namespace {

using nlohmann::json;

std::string format_temperature(double temperature) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), temperature,
                                   std::chars_format::fixed, 6);
    return std::string(buf, ptr);
}

void append_length_prefixed(std::string& out, const std::string& field) {
    std::uint64_t len = field.size();
    for (int i = 0; i < 8; ++i) out += static_cast<char>((len >> (8 * i)) & 0xFF);
    out += field;
}

std::string iso8601_now() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("endpoint URL has no scheme: " + url);
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_Digest(data.data(), data.size(), digest, &digest_len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out += hex[(digest[i] >> 4) & 0xF];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string request_hash(const std::string& model_name, double temperature,
                         const std::string& prompt_text) {
    std::string canonical;
    append_length_prefixed(canonical, model_name);
    append_length_prefixed(canonical, format_temperature(temperature));
    append_length_prefixed(canonical, prompt_text);
    return sha256_hex(canonical);
}

LlmRequest LlmRequest::make(const ProviderConfig& cfg, std::string prompt_text) {
    LlmRequest req;
    req.request_id = request_hash(cfg.model_name, cfg.temperature, prompt_text);
    req.prompt_text = std::move(prompt_text);
    return req;
}

CacheMode parse_cache_mode(const std::string& name) {
    if (name == "record") return CacheMode::Record;
    if (name == "replay") return CacheMode::Replay;
    if (name == "passthrough") return CacheMode::Passthrough;
    throw std::invalid_argument("unknown cache mode: " + name);
}

const char* cache_mode_name(CacheMode mode) {
    switch (mode) {
        case CacheMode::Record: return "record";
        case CacheMode::Replay: return "replay";
        case CacheMode::Passthrough: return "passthrough";
    }
    return "passthrough";
}

ResponseCache::ResponseCache(std::string path, CacheMode mode)
    : path_(std::move(path)), mode_(mode) {
    std::ifstream in(path_);
    if (!in.is_open()) {
        if (mode_ == CacheMode::Replay) {
            throw TransportError("replay cache file not found: " + path_);
        }
        return;
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("request_id")) continue;
        entries_[record["request_id"].get<std::string>()] =
            record.value("response_text", std::string());
    }
}

std::size_t ResponseCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

bool ResponseCache::lookup(const std::string& request_id, std::string& response_text) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(request_id);
    if (it == entries_.end()) return false;
    response_text = it->second;
    return true;
}

void ResponseCache::append(const std::string& request_id, const std::string& model,
                           double temperature, const std::string& prompt_sha,
                           const std::string& response_text) {
    std::lock_guard<std::mutex> lock(mutex_);
    json record = {
        {"request_id", request_id},
        {"model", model},
        {"temperature", temperature},
        {"prompt_sha", prompt_sha},
        {"response_text", response_text},
        {"timestamp", iso8601_now()},
    };
    std::ofstream out(path_, std::ios::app);
    out << record.dump() << '\n';
    entries_[request_id] = response_text;
}

const WireAdapter& openai_wire_adapter() {
    static const WireAdapter adapter = {
        [](const ProviderConfig& cfg, const LlmRequest& request) {
            json body = {
                {"model", cfg.model_name},
                {"messages", json::array({json{{"role", "user"}, {"content", request.prompt_text}}})},
                {"temperature", cfg.temperature},
                {"max_tokens", cfg.max_output_tokens},
            };
            return body.dump();
        },
        [](const std::string& response_body) {
            json parsed = json::parse(response_body, nullptr, false);
            if (parsed.is_discarded() || !parsed.contains("choices") ||
                !parsed["choices"].is_array() || parsed["choices"].empty()) {
                throw ProviderError(200, "response has no completion choices");
            }
            const json& first = parsed["choices"][0];
            if (!first.contains("message") || !first["message"].contains("content")) {
                throw ProviderError(200, "response choice has no message content");
            }
            return first["message"]["content"].get<std::string>();
        },
    };
    return adapter;
}

LlmGateway::LlmGateway(ProviderConfig cfg, ResponseCache cache, const WireAdapter& adapter)
    : cfg_(std::move(cfg)), cache_(std::move(cache)), adapter_(adapter) {}

LlmResponse LlmGateway::complete(const LlmRequest& request) {
    if (cache_.mode() == CacheMode::Replay) {
        std::string text;
        if (!cache_.lookup(request.request_id, text)) throw CacheMiss(request.request_id);
        return {std::move(text), "{}", true};
    }

    LlmResponse response = live_call(request);
    if (cache_.mode() == CacheMode::Record) {
        cache_.append(request.request_id, cfg_.model_name, cfg_.temperature,
                      sha256_hex(request.prompt_text), response.raw_text);
    }
    return response;
}

LlmResponse LlmGateway::live_call(const LlmRequest& request) {
    const char* credential = nullptr;
    if (!cfg_.credential_env_var.empty()) {
        credential = std::getenv(cfg_.credential_env_var.c_str());
        if (credential == nullptr || credential[0] == '\0') {
            throw AuthError(cfg_.credential_env_var);
        }
    }

    // Bounded provider concurrency.
    {
        std::unique_lock<std::mutex> lock(slot_mutex_);
        while (in_flight_ >= cfg_.concurrency_limit) {
            lock.unlock();
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
            lock.lock();
        }
        ++in_flight_;
    }
    struct SlotRelease {
        LlmGateway* self;
        ~SlotRelease() {
            std::lock_guard<std::mutex> lock(self->slot_mutex_);
            --self->in_flight_;
        }
    } release{this};

    Endpoint endpoint = split_endpoint(cfg_.endpoint_url);
    std::string body = adapter_.build_body(cfg_, request);

    std::string last_error;
    for (int attempt = 0; attempt < cfg_.retry.max_attempts; ++attempt) {
        if (attempt > 0) {
            double seconds = cfg_.retry.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        }
        httplib::Client client(endpoint.base);
        client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_seconds));
        httplib::Headers headers;
        if (credential != nullptr) {
            headers.emplace("Authorization", std::string("Bearer ") + credential);
        }
        httplib::Result result = client.Post(endpoint.path, headers, body, "application/json");
        if (!result) {
            last_error = httplib::to_string(result.error());
            continue;  // transport-level failure, retry
        }
        if (result->status < 200 || result->status >= 300) {
            // Well-formed provider responses are never retried.
            throw ProviderError(result->status, result->body);
        }
        LlmResponse response;
        response.raw_text = adapter_.extract_text(result->body);
        response.provider_meta = result->body;
        response.from_cache = false;
        return response;
    }
    throw TransportError(last_error + " after " + std::to_string(cfg_.retry.max_attempts) +
                         " attempts");
}

}  // namespace sls
