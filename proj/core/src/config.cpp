#include "graphmem/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphmem/errors.hpp"

namespace graphmem {

using nlohmann::json;

namespace {

void parse_llm_role(const json& node, LlmRole& role) {
    role.endpoint = node.value("endpoint", role.endpoint);
    role.model = node.value("model", role.model);
    role.retry_budget = node.value("retry_budget", role.retry_budget);
    role.timeout_seconds = node.value("timeout_seconds", role.timeout_seconds);
}

AlgorithmKind require_algorithm(const std::string& name) {
    auto kind = parse_algorithm(name);
    if (!kind) throw Error(ErrorCode::SchemaError, "unknown algorithm '" + name + "'");
    return *kind;
}

// One combo entry: {"algorithm": ..., <hyperparameters by their exact
// names>}. Missing keys keep the fixed defaults.
void parse_combo_entry(const json& entry, RetrievalConfig& cfg) {
    if (entry.is_string()) {
        cfg.combo.push_back(require_algorithm(entry.get<std::string>()));
        return;
    }
    if (!entry.is_object() || !entry.contains("algorithm"))
        throw Error(ErrorCode::SchemaError, "combo entries need an algorithm name");
    AlgorithmKind kind = require_algorithm(entry["algorithm"].get<std::string>());
    cfg.combo.push_back(kind);
    switch (kind) {
        case AlgorithmKind::AStar: {
            AStarConfig& a = cfg.astar;
            if (entry.contains("h_metric_name")) {
                auto m = parse_h_metric(entry["h_metric_name"].get<std::string>());
                if (!m) throw Error(ErrorCode::SchemaError, "unknown h_metric_name");
                a.h_metric = *m;
            }
            a.max_depth = entry.value("max_depth", a.max_depth);
            a.max_passed_nodes = entry.value("max_passed_nodes", a.max_passed_nodes);
            break;
        }
        case AlgorithmKind::WaterCircles: {
            WaterCirclesConfig& w = cfg.watercircles;
            w.strict_filter = entry.value("strict_filter", w.strict_filter);
            w.hyper_num = entry.value("hyper_num", w.hyper_num);
            w.episodic_num = entry.value("episodic_num", w.episodic_num);
            w.chain_triplets_num = entry.value("chain_triplets_num", w.chain_triplets_num);
            w.other_triplets_num = entry.value("other_triplets_num", w.other_triplets_num);
            w.do_text_pruning = entry.value("do_text_pruning", w.do_text_pruning);
            w.text_prune_chars = entry.value("text_prune_chars", w.text_prune_chars);
            break;
        }
        case AlgorithmKind::BeamSearch: {
            BeamSearchConfig& b = cfg.beamsearch;
            b.max_depth = entry.value("max_depth", b.max_depth);
            b.max_paths = entry.value("max_paths", b.max_paths);
            b.same_path_intersection_by_node =
                entry.value("same_path_intersection_by_node", b.same_path_intersection_by_node);
            b.diff_paths_intersection_by_node =
                entry.value("diff_paths_intersection_by_node", b.diff_paths_intersection_by_node);
            b.diff_paths_intersection_by_rel =
                entry.value("diff_paths_intersection_by_rel", b.diff_paths_intersection_by_rel);
            b.mean_alpha = entry.value("mean_alpha", b.mean_alpha);
            if (entry.contains("final_sorting_mode")) {
                auto m = parse_sorting_mode(entry["final_sorting_mode"].get<std::string>());
                if (!m) throw Error(ErrorCode::SchemaError, "unknown final_sorting_mode");
                b.final_sorting_mode = *m;
            }
            break;
        }
    }
}

std::vector<AlgorithmKind> parse_combo_names(const json& arr) {
    std::vector<AlgorithmKind> combo;
    for (const auto& name : arr) combo.push_back(require_algorithm(name.get<std::string>()));
    if (combo.empty()) throw Error(ErrorCode::SchemaError, "combo must be non-empty");
    return combo;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded())
        throw Error(ErrorCode::FormatError, "config is not valid JSON");

    RunConfig cfg;
    cfg.graph_path = root.value("graph", "");
    cfg.corpus_path = root.value("corpus", "");
    cfg.questions_path = root.value("questions", "");
    cfg.report_path = root.value("report", "");
    cfg.build_log_path = root.value("build_log", "");
    cfg.mock_script_path = root.value("mock_script", "");
    cfg.prompt_dir = root.value("prompt_dir", "");
    cfg.parallelism = root.value("parallelism", cfg.parallelism);
    cfg.timestamps = root.value("timestamps", cfg.timestamps);

    if (root.contains("embedding")) {
        const json& e = root["embedding"];
        cfg.embedding.provider = e.value("provider", cfg.embedding.provider);
        cfg.embedding.dimension = e.value("dimension", cfg.embedding.dimension);
        cfg.embedding.endpoint = e.value("endpoint", cfg.embedding.endpoint);
        cfg.embedding.model = e.value("model", cfg.embedding.model);
        cfg.embedding.batch_size = e.value("batch_size", cfg.embedding.batch_size);
        cfg.embedding.cache_path = e.value("cache_path", cfg.embedding.cache_path);
    }
    if (root.contains("llm")) {
        const json& l = root["llm"];
        LlmRole shared;
        parse_llm_role(l, shared);
        cfg.extractor = cfg.generator = cfg.judge = shared;
        if (l.contains("extractor")) parse_llm_role(l["extractor"], cfg.extractor);
        if (l.contains("generator")) parse_llm_role(l["generator"], cfg.generator);
        if (l.contains("judge")) {
            parse_llm_role(l["judge"], cfg.judge);
            cfg.use_judge = true;
        }
    }
    if (root.contains("generation")) {
        const json& g = root["generation"];
        cfg.params.max_new_tokens = g.value("num_predict", cfg.params.max_new_tokens);
        cfg.params.seed = g.value("seed", cfg.params.seed);
        cfg.params.temperature = g.value("temperature", cfg.params.temperature);
        cfg.params.top_k = g.value("top_k", cfg.params.top_k);
    }
    if (root.contains("retrieval")) {
        const json& r = root["retrieval"];
        cfg.qa.retrieval.combo.clear();
        if (r.contains("restriction")) {
            auto restr = parse_restriction(r["restriction"].get<std::string>());
            if (!restr) throw Error(ErrorCode::SchemaError, "unknown restriction");
            cfg.qa.retrieval.restriction = *restr;
        }
        if (r.contains("combo")) {
            for (const auto& entry : r["combo"]) parse_combo_entry(entry, cfg.qa.retrieval);
        }
        if (cfg.qa.retrieval.combo.empty())
            cfg.qa.retrieval.combo = {AlgorithmKind::BeamSearch};
    }
    if (root.contains("qa")) {
        const json& q = root["qa"];
        cfg.qa.top_n_triplets = q.value("top_n_triplets", cfg.qa.top_n_triplets);
        cfg.qa.entity_match_k = q.value("entity_match_k", cfg.qa.entity_match_k);
        cfg.qa.no_answer_token = q.value("no_answer_token", cfg.qa.no_answer_token);
        if (cfg.qa.top_n_triplets < 1)
            throw Error(ErrorCode::SchemaError, "top_n_triplets must be >= 1");
        if (cfg.qa.entity_match_k < 1)
            throw Error(ErrorCode::SchemaError, "entity_match_k must be >= 1");
    }
    if (root.contains("grid")) {
        const json& g = root["grid"];
        for (const auto& combo : g.value("combos", json::array()))
            cfg.grid_combos.push_back(parse_combo_names(combo));
        for (const auto& r : g.value("restrictions", json::array())) {
            auto restr = parse_restriction(r.get<std::string>());
            if (!restr) throw Error(ErrorCode::SchemaError, "unknown grid restriction");
            cfg.grid_restrictions.push_back(*restr);
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::shared_ptr<const EmbeddingProvider> make_embedder(const EmbeddingConfig& cfg) {
    std::shared_ptr<const EmbeddingProvider> base;
    if (cfg.provider == "test") {
        base = std::make_shared<HashedBagEmbedder>(cfg.dimension);
    } else if (cfg.provider == "remote") {
        RemoteEmbedderConfig rc;
        rc.endpoint = cfg.endpoint;
        rc.model = cfg.model;
        rc.batch_size = cfg.batch_size;
        base = std::make_shared<RemoteEmbedder>(rc);
    } else {
        throw Error(ErrorCode::SchemaError, "unknown embedding provider '" + cfg.provider + "'");
    }
    if (!cfg.cache_path.empty())
        return std::make_shared<CachingEmbedder>(std::move(base), cfg.cache_path);
    return base;
}

std::shared_ptr<const LlmClient> make_llm(const RunConfig& cfg, const LlmRole& role) {
    if (!cfg.mock_script_path.empty()) return mock_from_script_file(cfg.mock_script_path);
    if (role.endpoint.empty())
        throw Error(ErrorCode::SchemaError,
                    "no LLM endpoint configured and no mock script given");
    HttpLlmConfig hc;
    hc.endpoint = role.endpoint;
    hc.model = role.model;
    hc.retry_budget = role.retry_budget;
    hc.timeout_seconds = role.timeout_seconds;
    return std::make_shared<HttpLlmClient>(hc);
}

PromptSet load_prompts(const RunConfig& cfg) {
    if (!cfg.prompt_dir.empty()) return PromptSet::from_directory(cfg.prompt_dir);
    return PromptSet::defaults();
}

}  // namespace graphmem
