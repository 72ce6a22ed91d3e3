#include "graphmem/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "graphmem/errors.hpp"

namespace graphmem {

using nlohmann::json;

void MockLlmClient::add_rule(std::string match, std::string response) {
    rules_.push_back({std::move(match), std::move(response)});
}

std::string MockLlmClient::complete(const ChatRequest& req) const {
    {
        std::lock_guard lock(mu_);
        transcript_.push_back(req);
    }
    for (const Rule& rule : rules_) {
        if (req.user.find(rule.match) != std::string::npos) return rule.response;
    }
    throw Error(ErrorCode::MockMiss, "no scripted response matches the request");
}

std::shared_ptr<MockLlmClient> mock_from_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open mock script " + path);
    json script = json::parse(in, nullptr, false);
    if (script.is_discarded() || !script.is_array())
        throw Error(ErrorCode::FormatError, "mock script must be a JSON array");
    std::vector<MockLlmClient::Rule> rules;
    for (const auto& entry : script) {
        if (!entry.contains("match") || !entry.contains("response"))
            throw Error(ErrorCode::FormatError, "mock script entries need match/response");
        rules.push_back({entry["match"].get<std::string>(),
                         entry["response"].get<std::string>()});
    }
    return std::make_shared<MockLlmClient>(std::move(rules));
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig cfg) : cfg_(std::move(cfg)) {}

std::string HttpLlmClient::complete(const ChatRequest& req) const {
    if (req.user.empty()) throw Error(ErrorCode::EmptyText, "user message is empty");

    json messages = json::array();
    if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
    messages.push_back({{"role", "user"}, {"content", req.user}});
    if (req.assistant_prefix)
        messages.push_back({{"role", "assistant"}, {"content", *req.assistant_prefix}});

    json body = {{"model", cfg_.model},
                 {"messages", messages},
                 {"stream", false},
                 {"options",
                  {{"num_predict", req.params.max_new_tokens},
                   {"seed", req.params.seed},
                   {"temperature", req.params.temperature},
                   {"top_k", req.params.top_k}}}};

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.retry_budget; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));

        httplib::Client client(cfg_.endpoint);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        if (const char* token = std::getenv(cfg_.token_env.c_str()); token && *token)
            client.set_bearer_token_auth(token);

        auto res = client.Post("/api/chat", body.dump(), "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server returned " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw Error(ErrorCode::TransportError,
                        "server returned " + std::to_string(res->status));

        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded())
            throw Error(ErrorCode::TransportError, "malformed completion response");
        if (parsed.contains("message") && parsed["message"].contains("content"))
            return parsed["message"]["content"].get<std::string>();
        if (parsed.contains("choices") && !parsed["choices"].empty())
            return parsed["choices"][0].at("message").at("content").get<std::string>();
        throw Error(ErrorCode::TransportError, "completion response carries no content");
    }
    throw Error(ErrorCode::BudgetExhausted,
                "retries exhausted (" + std::to_string(cfg_.retry_budget) + "): " + last_error);
}

}  // namespace graphmem
