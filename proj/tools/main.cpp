// graphmem: knowledge-graph external memory for question answering.
//
//   graphmem build      --corpus corpus.jsonl --graph g.gm [--config c.json]
//   graphmem query      --graph g.gm --question "..." [--show-evidence]
//   graphmem eval       --graph g.gm --questions q.jsonl --report r.jsonl [--grid]
//   graphmem stats      --graph g.gm
//   graphmem preprocess --dataset hotpotqa --input raw.json --out-qa q.jsonl
//                       --out-contexts c.jsonl

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "graphmem/cli.hpp"
#include "graphmem/errors.hpp"

namespace {

// Flags override config-file values.
void add_common(CLI::App* cmd, std::string& config_path, graphmem::RunConfig& cfg,
                std::string& restriction, std::string& combo) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--graph", cfg.graph_path, "graph file path");
    cmd->add_option("--mock-script", cfg.mock_script_path,
                    "scripted LLM responses for offline runs");
    cmd->add_option("--prompt-dir", cfg.prompt_dir, "prompt template overrides");
    cmd->add_option("--restriction", restriction, "node restriction: All, E, T or O");
    cmd->add_option("--combo", combo, "retrieval combo, e.g. bs or wc+bs");
    cmd->add_option("--parallelism", cfg.parallelism, "worker threads for eval");
    cmd->add_flag("--timestamps", cfg.timestamps, "add wall-clock fields to output files");
}

bool apply_overrides(graphmem::RunConfig& cfg, const std::string& restriction,
                     const std::string& combo) {
    if (!restriction.empty()) {
        auto r = graphmem::parse_restriction(restriction);
        if (!r) {
            std::cerr << "unknown restriction '" << restriction << "'\n";
            return false;
        }
        cfg.qa.retrieval.restriction = *r;
    }
    if (!combo.empty()) {
        std::vector<graphmem::AlgorithmKind> kinds;
        std::size_t start = 0;
        while (start <= combo.size()) {
            std::size_t plus = combo.find('+', start);
            std::string name =
                plus == std::string::npos ? combo.substr(start) : combo.substr(start, plus - start);
            auto kind = graphmem::parse_algorithm(name);
            if (!kind) {
                std::cerr << "unknown algorithm '" << name << "'\n";
                return false;
            }
            kinds.push_back(*kind);
            if (plus == std::string::npos) break;
            start = plus + 1;
        }
        cfg.qa.retrieval.combo = kinds;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph external memory engine"};
    app.require_subcommand(1);

    std::string config_path, restriction, combo;
    graphmem::RunConfig flags;

    auto* build = app.add_subcommand("build", "memorize a corpus into a graph");
    add_common(build, config_path, flags, restriction, combo);
    build->add_option("--corpus", flags.corpus_path, "corpus JSONL {id, text, timestamp?}");
    build->add_option("--log", flags.build_log_path, "per-record build log (JSONL)");

    graphmem::QueryOptions query_opt;
    auto* query = app.add_subcommand("query", "answer one question against a graph");
    add_common(query, config_path, flags, restriction, combo);
    query->add_option("--question", query_opt.question, "the question")->required();
    query->add_flag("--show-evidence", query_opt.show_evidence, "print evidence triplets");

    graphmem::EvalCliOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "run a question batch and write a report");
    add_common(eval, config_path, flags, restriction, combo);
    eval->add_option("--questions", flags.questions_path,
                     "questions JSONL {id, question, gold_answer}");
    eval->add_option("--report", flags.report_path, "report output (JSONL + aggregate)");
    eval->add_flag("--grid", eval_opt.grid, "sweep grid.combos x grid.restrictions");

    auto* stats = app.add_subcommand("stats", "print graph statistics");
    add_common(stats, config_path, flags, restriction, combo);

    graphmem::PreprocessCliOptions pre_opt;
    auto* pre = app.add_subcommand("preprocess", "prepare a raw dataset");
    pre->add_option("--dataset", pre_opt.dataset, "hotpotqa, triviaqa or diaasq")->required();
    pre->add_option("--input", pre_opt.input, "raw dataset path")->required();
    pre->add_option("--out-qa", pre_opt.out_qa, "qa output JSONL")->required();
    pre->add_option("--out-contexts", pre_opt.out_contexts, "contexts output JSONL")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : graphmem::kExitUsage;
    }

    graphmem::RunConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = graphmem::load_run_config(config_path);
        } catch (const graphmem::Error& e) {
            std::cerr << e.what() << '\n';
            return graphmem::kExitUsage;
        }
    }
    // CLI flags win over file values.
    if (!flags.graph_path.empty()) cfg.graph_path = flags.graph_path;
    if (!flags.corpus_path.empty()) cfg.corpus_path = flags.corpus_path;
    if (!flags.questions_path.empty()) cfg.questions_path = flags.questions_path;
    if (!flags.report_path.empty()) cfg.report_path = flags.report_path;
    if (!flags.build_log_path.empty()) cfg.build_log_path = flags.build_log_path;
    if (!flags.mock_script_path.empty()) cfg.mock_script_path = flags.mock_script_path;
    if (!flags.prompt_dir.empty()) cfg.prompt_dir = flags.prompt_dir;
    if (flags.parallelism != 1) cfg.parallelism = flags.parallelism;
    if (flags.timestamps) cfg.timestamps = true;
    if (!apply_overrides(cfg, restriction, combo)) return graphmem::kExitUsage;

    if (build->parsed()) return graphmem::cmd_build(cfg, std::cout, std::cerr);
    if (query->parsed()) return graphmem::cmd_query(cfg, query_opt, std::cout, std::cerr);
    if (eval->parsed()) return graphmem::cmd_eval(cfg, eval_opt, std::cout, std::cerr);
    if (stats->parsed()) return graphmem::cmd_stats(cfg, std::cout, std::cerr);
    if (pre->parsed()) return graphmem::cmd_preprocess(pre_opt, std::cout, std::cerr);
    return graphmem::kExitUsage;
}
