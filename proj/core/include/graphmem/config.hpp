#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/embedding.hpp"
#include "graphmem/llm.hpp"
#include "graphmem/prompts.hpp"
#include "graphmem/qa.hpp"

namespace graphmem {

struct EmbeddingConfig {
    std::string provider = "test";  // "test" | "remote"
    std::size_t dimension = 256;    // test provider
    std::string endpoint;           // remote provider
    std::string model;
    std::size_t batch_size = 16;
    std::string cache_path;  // empty = no cache
};

struct LlmRole {
    std::string endpoint;
    std::string model;
    int retry_budget = 3;
    int timeout_seconds = 120;
};

// Everything a command needs, merged from the config file and CLI flags.
struct RunConfig {
    std::string graph_path;
    std::string corpus_path;
    std::string questions_path;
    std::string report_path;
    std::string build_log_path;
    std::string mock_script_path;
    std::string prompt_dir;

    EmbeddingConfig embedding;
    LlmRole extractor;
    LlmRole generator;
    LlmRole judge;
    bool use_judge = false;

    GenerationParams params;  // applied to every role
    QAConfig qa;
    int parallelism = 1;
    bool timestamps = false;  // add wall-clock fields to output files

    // eval --grid sweep
    std::vector<std::vector<AlgorithmKind>> grid_combos;
    std::vector<NodeRestriction> grid_restrictions;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Builds the configured embedding provider (wrapped in the cache when a
// cache path is set).
std::shared_ptr<const EmbeddingProvider> make_embedder(const EmbeddingConfig& cfg);

// Scripted mock when mock_script_path is set, HTTP client otherwise.
std::shared_ptr<const LlmClient> make_llm(const RunConfig& cfg, const LlmRole& role);

PromptSet load_prompts(const RunConfig& cfg);

}  // namespace graphmem
