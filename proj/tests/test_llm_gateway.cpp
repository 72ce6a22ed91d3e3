#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graphmem/errors.hpp"
#include "graphmem/llm.hpp"

using namespace graphmem;

TEST_CASE("mock client answers from its script") {
    MockLlmClient mock({{"q1", "a1"}, {"q", "broad"}});
    ChatRequest req;
    req.user = "q1";
    CHECK(mock.complete(req) == "a1");  // first matching rule wins
    req.user = "q2";
    CHECK(mock.complete(req) == "broad");
    CHECK(mock.calls() == 2);
}

TEST_CASE("mock client misses loudly") {
    MockLlmClient mock;
    ChatRequest req;
    req.user = "anything";
    try {
        mock.complete(req);
        FAIL("expected MockMiss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MockMiss);
    }
    CHECK(mock.calls() == 1);  // the miss is still on the transcript
}

TEST_CASE("default generation params are the deterministic set") {
    GenerationParams p;
    CHECK(p.max_new_tokens == 2048);
    CHECK(p.seed == 42);
    CHECK(p.temperature == 0.0);
    CHECK(p.top_k == 1);
}

TEST_CASE("mock transcript records the received params") {
    MockLlmClient mock({{"ping", "pong"}});
    ChatRequest req;
    req.system = "sys";
    req.user = "ping";
    mock.complete(req);
    REQUIRE(mock.transcript().size() == 1);
    const ChatRequest& seen = mock.transcript()[0];
    CHECK(seen.params.temperature == 0.0);
    CHECK(seen.params.seed == 42);
    CHECK(seen.params.max_new_tokens == 2048);
    CHECK(seen.params.top_k == 1);
    CHECK(seen.system == "sys");
}

TEST_CASE("mock script files load") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "graphmem_mock_script.json").string();
    {
        std::ofstream out(path, std::ios::trunc);
        out << R"([{"match": "hello", "response": "world"}])";
    }
    auto mock = mock_from_script_file(path);
    ChatRequest req;
    req.user = "say hello please";
    CHECK(mock->complete(req) == "world");

    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({"not": "an array"})";
    }
    CHECK_THROWS_AS(mock_from_script_file(path), Error);
    std::remove(path.c_str());
}

TEST_CASE("http client exhausts its retry budget with a typed error") {
    HttpLlmConfig cfg;
    cfg.endpoint = "http://127.0.0.1:1";  // nothing listens here
    cfg.model = "m";
    cfg.retry_budget = 1;
    cfg.timeout_seconds = 1;
    HttpLlmClient client(cfg);
    ChatRequest req;
    req.user = "hi";
    try {
        client.complete(req);
        FAIL("expected BudgetExhausted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExhausted);
    }
}
