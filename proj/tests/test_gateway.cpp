#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "sls/gateway.hpp"
#include "sls/io.hpp"
#include "support/fixtures.hpp"

using namespace sls;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "sls_gateway_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

ProviderConfig test_config() {
    ProviderConfig cfg;
    cfg.model_name = "test-model";
    cfg.credential_env_var = "SLS_TEST_API_KEY";
    cfg.retry.max_attempts = 2;
    cfg.retry.backoff_base_seconds = 0.01;
    return cfg;
}

// Minimal OpenAI-shaped stub server.
struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> hits{0};

    explicit StubServer(const std::string& completion_text) {
        server.Post("/v1/chat/completions",
                    [this, completion_text](const httplib::Request& req,
                                            httplib::Response& res) {
                        ++hits;
                        nlohmann::json body = nlohmann::json::parse(req.body);
                        CHECK(body["temperature"].get<double>() == 0.0);
                        nlohmann::json reply = {
                            {"choices",
                             {{{"message", {{"role", "assistant"}, {"content", completion_text}}}}}},
                            {"model", body["model"]}};
                        res.set_content(reply.dump(), "application/json");
                    });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this]() { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        thread.join();
    }

    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    }
};

}  // namespace

TEST_CASE("request ids are a pure function of model, temperature, and prompt") {
    std::string id1 = request_hash("gpt-4o", 0.0, "prompt text");
    std::string id2 = request_hash("gpt-4o", 0.0, "prompt text");
    CHECK(id1 == id2);
    CHECK(id1.size() == 64);
    CHECK(request_hash("gpt-4o", 0.0, "other prompt") != id1);
    CHECK(request_hash("other-model", 0.0, "prompt text") != id1);
    CHECK(request_hash("gpt-4o", 0.5, "prompt text") != id1);

    // Length prefixing keeps field boundaries unambiguous.
    CHECK(request_hash("ab", 0.0, "c") != request_hash("a", 0.0, "bc"));
}

TEST_CASE("replay returns cached text and misses are errors") {
    std::string path = temp_path("replay_basic.jsonl");
    fs::remove(path);
    {
        ResponseCache cache(path, CacheMode::Record);
        cache.append("id-1", "test-model", 0.0, "sha", "<START>No misconfigurations<END>");
    }

    ProviderConfig cfg = test_config();
    LlmGateway gateway(cfg, ResponseCache(path, CacheMode::Replay));

    LlmRequest request;
    request.prompt_text = "whatever";
    request.request_id = "id-1";
    LlmResponse response = gateway.complete(request);
    CHECK(response.raw_text == "<START>No misconfigurations<END>");
    CHECK(response.from_cache);

    request.request_id = "id-unknown";
    CHECK_THROWS_AS(gateway.complete(request), CacheMiss);
}

TEST_CASE("replay mode refuses to start without a cache file") {
    CHECK_THROWS_AS(ResponseCache(temp_path("missing.jsonl"), CacheMode::Replay),
                    TransportError);
}

TEST_CASE("record against a stub server then replay byte-identically") {
    StubServer stub("<START>Entry Dependency Errors: none<END>");
    std::string path = temp_path("record_replay.jsonl");
    fs::remove(path);
    setenv("SLS_TEST_API_KEY", "sk-testsecret-123", 1);

    ProviderConfig cfg = test_config();
    cfg.endpoint_url = stub.url();

    LlmRequest request = LlmRequest::make(cfg, "Is this template fine?");
    {
        LlmGateway gateway(cfg, ResponseCache(path, CacheMode::Record));
        LlmResponse live = gateway.complete(request);
        CHECK(live.raw_text == "<START>Entry Dependency Errors: none<END>");
        CHECK_FALSE(live.from_cache);
    }
    CHECK(stub.hits.load() == 1);

    // Credentials never land in the cache file.
    std::string cache_text = read_file(path);
    CHECK(cache_text.find("sk-testsecret-123") == std::string::npos);
    CHECK(cache_text.find("request_id") != std::string::npos);

    LlmGateway replay(cfg, ResponseCache(path, CacheMode::Replay));
    LlmResponse cached = replay.complete(request);
    CHECK(cached.raw_text == "<START>Entry Dependency Errors: none<END>");
    CHECK(cached.from_cache);
    CHECK(stub.hits.load() == 1);  // no further network activity
}

TEST_CASE("recording appends without rewriting prior entries") {
    std::string path = temp_path("append_only.jsonl");
    fs::remove(path);
    ResponseCache cache(path, CacheMode::Record);
    cache.append("id-a", "m", 0.0, "sha-a", "first");
    std::string before = read_file(path);
    cache.append("id-b", "m", 0.0, "sha-b", "second");
    std::string after = read_file(path);
    CHECK(after.substr(0, before.size()) == before);
    CHECK(cache.size() == 2);
}

TEST_CASE("missing credential raises AuthError before any call") {
    unsetenv("SLS_NO_SUCH_KEY");
    ProviderConfig cfg = test_config();
    cfg.credential_env_var = "SLS_NO_SUCH_KEY";
    cfg.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
    LlmGateway gateway(cfg, ResponseCache());
    LlmRequest request = LlmRequest::make(cfg, "prompt");
    CHECK_THROWS_AS(gateway.complete(request), AuthError);
}

TEST_CASE("transport failures exhaust retries then raise TransportError") {
    setenv("SLS_TEST_API_KEY", "k", 1);
    ProviderConfig cfg = test_config();
    cfg.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";  // nothing listens here
    cfg.retry.max_attempts = 2;
    cfg.timeout_seconds = 1.0;
    LlmGateway gateway(cfg, ResponseCache());
    LlmRequest request = LlmRequest::make(cfg, "prompt");
    CHECK_THROWS_AS(gateway.complete(request), TransportError);
}

TEST_CASE("non-success provider status raises ProviderError without retry") {
    setenv("SLS_TEST_API_KEY", "k", 1);
    StubServer stub("unused");
    stub.server.Post("/fail", [](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_content("rate limited", "text/plain");
    });
    ProviderConfig cfg = test_config();
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(stub.port) + "/fail";
    LlmGateway gateway(cfg, ResponseCache());
    LlmRequest request = LlmRequest::make(cfg, "prompt");
    try {
        gateway.complete(request);
        FAIL("expected ProviderError");
    } catch (const ProviderError& error) {
        CHECK(error.status() == 429);
        CHECK(std::string(error.what()).find("rate limited") != std::string::npos);
    }
}
