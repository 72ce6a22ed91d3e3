#pragma once
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace graphmem {

// Deterministic generation settings applied to every role (extractor,
// generator, judge) by default.
struct GenerationParams {
    int max_new_tokens = 2048;
    int seed = 42;
    double temperature = 0.0;
    int top_k = 1;
};

struct ChatRequest {
    std::string system;
    std::string user;
    std::optional<std::string> assistant_prefix;
    GenerationParams params;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const ChatRequest& req) const = 0;
};

// Scripted client for offline runs: the first matcher whose text occurs in
// the user message wins. Records a transcript of every call.
class MockLlmClient final : public LlmClient {
public:
    struct Rule {
        std::string match;  // substring of the user message
        std::string response;
    };

    MockLlmClient() = default;
    explicit MockLlmClient(std::vector<Rule> rules) : rules_(std::move(rules)) {}

    void add_rule(std::string match, std::string response);
    std::string complete(const ChatRequest& req) const override;

    const std::vector<ChatRequest>& transcript() const { return transcript_; }
    std::size_t calls() const { return transcript_.size(); }

private:
    std::vector<Rule> rules_;
    mutable std::mutex mu_;
    mutable std::vector<ChatRequest> transcript_;
};

// Loads [{"match": ..., "response": ...}] from a JSON file.
std::shared_ptr<MockLlmClient> mock_from_script_file(const std::string& path);

struct HttpLlmConfig {
    std::string endpoint;  // e.g. http://host:port/api/chat
    std::string model;
    std::string token_env = "GRAPHMEM_LLM_TOKEN";
    int timeout_seconds = 120;
    int retry_budget = 3;  // transient-failure retries per call
};

// Chat-completion client over HTTP. Request body follows the common
// convention {model, messages: [{role, content}], options, stream:false};
// the response is read from message.content or choices[0].message.content.
class HttpLlmClient final : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig cfg);
    std::string complete(const ChatRequest& req) const override;

private:
    HttpLlmConfig cfg_;
};

}  // namespace graphmem
