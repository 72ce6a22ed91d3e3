#include "graphmem/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphmem/errors.hpp"
#include "graphmem/eval.hpp"
#include "graphmem/memorize.hpp"
#include "graphmem/preprocess.hpp"

namespace graphmem {

using nlohmann::json;

namespace {

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::IoError:
        case ErrorCode::FormatError:
        case ErrorCode::SchemaError:
        case ErrorCode::MissingRawData:
            return kExitUsage;
        default:
            return kExitRuntime;
    }
}

json trace_to_json(const QaTrace& trace, bool timestamps) {
    json t = {{"entities", trace.entities},
              {"matched_nodes", trace.matched_nodes},
              {"retrieved", trace.retrieved},
              {"filtered", trace.filtered},
              {"degraded", trace.degraded_parse},
              {"reason", trace.reason}};
    if (timestamps)
        t["timings_ms"] = {{"parse", trace.parse_ms},
                           {"match", trace.match_ms},
                           {"retrieve", trace.retrieve_ms},
                           {"generate", trace.generate_ms}};
    return t;
}

json answer_to_json(const Answer& a, bool timestamps) {
    json evidence = json::array();
    for (const RetrievedItem& item : a.evidence.items)
        evidence.push_back(canonical(item.triplet));
    return {{"kind", a.kind == AnswerKind::Text ? "text" : "no_answer"},
            {"text", a.text.value_or("")},
            {"evidence", evidence},
            {"trace", trace_to_json(a.trace, timestamps)}};
}

json record_to_json(const EvalRecord& rec, bool timestamps) {
    json j = answer_to_json(rec.predicted, timestamps);
    j["id"] = rec.id;
    j["question"] = rec.question;
    j["gold"] = rec.gold;
    j["em"] = rec.em;
    if (rec.judge_label) j["judge_label"] = *rec.judge_label;
    j["parse_flagged"] = rec.parse_flagged;
    if (rec.failure) j["failure"] = *rec.failure;
    return j;
}

EvalRecord record_from_json(const json& j) {
    EvalRecord rec;
    rec.id = j.value("id", "");
    rec.question = j.value("question", "");
    rec.gold = j.value("gold", "");
    rec.em = j.value("em", false);
    if (j.contains("judge_label")) rec.judge_label = j["judge_label"].get<int>();
    rec.parse_flagged = j.value("parse_flagged", false);
    if (j.contains("failure")) rec.failure = j["failure"].get<std::string>();
    rec.predicted.kind =
        j.value("kind", "no_answer") == "text" ? AnswerKind::Text : AnswerKind::NoAnswer;
    if (rec.predicted.kind == AnswerKind::Text) rec.predicted.text = j.value("text", "");
    return rec;
}

json retrieval_config_to_json(const RetrievalConfig& r) {
    json combo = json::array();
    for (AlgorithmKind kind : r.combo) {
        switch (kind) {
            case AlgorithmKind::AStar:
                combo.push_back({{"algorithm", "astar"},
                                 {"h_metric_name", to_string(r.astar.h_metric)},
                                 {"max_depth", r.astar.max_depth},
                                 {"max_passed_nodes", r.astar.max_passed_nodes}});
                break;
            case AlgorithmKind::WaterCircles:
                combo.push_back({{"algorithm", "watercircles"},
                                 {"strict_filter", r.watercircles.strict_filter},
                                 {"hyper_num", r.watercircles.hyper_num},
                                 {"episodic_num", r.watercircles.episodic_num},
                                 {"chain_triplets_num", r.watercircles.chain_triplets_num},
                                 {"other_triplets_num", r.watercircles.other_triplets_num},
                                 {"do_text_pruning", r.watercircles.do_text_pruning}});
                break;
            case AlgorithmKind::BeamSearch:
                combo.push_back(
                    {{"algorithm", "beamsearch"},
                     {"max_depth", r.beamsearch.max_depth},
                     {"max_paths", r.beamsearch.max_paths},
                     {"same_path_intersection_by_node",
                      r.beamsearch.same_path_intersection_by_node},
                     {"diff_paths_intersection_by_node",
                      r.beamsearch.diff_paths_intersection_by_node},
                     {"diff_paths_intersection_by_rel",
                      r.beamsearch.diff_paths_intersection_by_rel},
                     {"mean_alpha", r.beamsearch.mean_alpha},
                     {"final_sorting_mode", to_string(r.beamsearch.final_sorting_mode)}});
                break;
        }
    }
    return {{"combo", combo}, {"restriction", to_string(r.restriction)}};
}

json qa_config_to_json(const QAConfig& qa) {
    json j = retrieval_config_to_json(qa.retrieval);
    j["top_n_triplets"] = qa.top_n_triplets;
    j["entity_match_k"] = qa.entity_match_k;
    j["no_answer_token"] = qa.no_answer_token;
    return j;
}

void print_stats_table(const GraphStats& s, std::ostream& out) {
    out << "contexts stored:   " << s.stored_contexts << "   (parse errors: " << s.parse_errors
        << ")\n";
    out << "nodes:      episodic " << s.episodic_nodes << "  thesis " << s.thesis_nodes
        << "  object " << s.object_nodes << '\n';
    out << "relations:  episodic " << s.episodic_links << "  hyper " << s.hyper_edges
        << "  simple " << s.simple_edges << '\n';
    out << std::fixed << std::setprecision(2);
    out << "mean adjacent:  object/episodic " << s.mean_object_per_episodic
        << "  thesis/episodic " << s.mean_thesis_per_episodic << "  object/thesis "
        << s.mean_object_per_thesis << "  object/object " << s.mean_object_per_object << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
}

struct CorpusRecord {
    std::string id;
    std::string text;
    std::optional<std::int64_t> timestamp;
};

std::vector<CorpusRecord> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open corpus " + path);
    std::vector<CorpusRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("text"))
            throw Error(ErrorCode::FormatError,
                        "corpus line " + std::to_string(line_no) + ": expected {id, text}");
        CorpusRecord cr;
        cr.id = rec.value("id", std::to_string(line_no));
        cr.text = rec["text"].get<std::string>();
        if (rec.contains("timestamp")) cr.timestamp = rec["timestamp"].get<std::int64_t>();
        out.push_back(std::move(cr));
    }
    return out;
}

std::vector<QuestionRecord> read_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open questions " + path);
    std::vector<QuestionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("question"))
            throw Error(ErrorCode::FormatError, "questions line " + std::to_string(line_no) +
                                                    ": expected {id, question, gold_answer}");
        QuestionRecord q;
        q.id = rec.value("id", std::to_string(line_no));
        q.question = rec["question"].get<std::string>();
        q.gold_answer = rec.value("gold_answer", rec.value("answer", ""));
        out.push_back(std::move(q));
    }
    return out;
}

int run_eval_to_file(const RunConfig& cfg, const std::string& report_path,
                     const std::vector<QuestionRecord>& questions,
                     const KnowledgeGraph& graph, const QaPipeline& pipeline,
                     const LlmClient* judge_client, const PromptSet& prompts,
                     std::ostream& out) {
    // Resume: reuse records already in the report file.
    EvalOptions options;
    options.parallelism = cfg.parallelism;
    {
        std::ifstream existing(report_path);
        std::string line;
        while (existing && std::getline(existing, line)) {
            if (trim(line).empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || j.contains("aggregate") || !j.contains("id")) continue;
            options.completed.push_back(record_from_json(j));
        }
    }

    std::ofstream report(report_path, std::ios::trunc);
    if (!report) throw Error(ErrorCode::IoError, "cannot write report " + report_path);
    for (const EvalRecord& rec : options.completed)
        report << record_to_json(rec, cfg.timestamps).dump() << '\n';
    report.flush();
    options.sink = [&](const EvalRecord& rec) {
        report << record_to_json(rec, cfg.timestamps).dump() << '\n';
        report.flush();
    };

    EvalReport result = run_eval(questions, graph, pipeline, cfg.qa, judge_client, prompts,
                                 cfg.params, options);

    json aggregate = {{"accuracy", result.accuracy},
                      {"em_rate", result.em_rate},
                      {"no_answer_rate", result.no_answer_rate},
                      {"parse_error_rate", result.parse_error_rate},
                      {"total", result.total},
                      {"judged", result.judged},
                      {"config", qa_config_to_json(cfg.qa)}};
    if (cfg.timestamps)
        aggregate["finished_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count();
    report << json{{"aggregate", aggregate}}.dump() << '\n';

    out << report_path << "  accuracy " << result.accuracy << "  em_rate " << result.em_rate
        << "  no_answer_rate " << result.no_answer_rate << "  (" << result.total
        << " questions)\n";
    std::uint64_t completed_count = result.total;
    return completed_count > 0 || questions.empty() ? kExitOk : kExitRuntime;
}

std::string grid_report_path(const std::string& base,
                             const std::vector<AlgorithmKind>& combo, NodeRestriction r) {
    std::string suffix;
    for (std::size_t i = 0; i < combo.size(); ++i) {
        if (i) suffix += '+';
        suffix += to_string(combo[i]);
    }
    suffix += '-';
    suffix += to_string(r);
    std::size_t dot = base.rfind('.');
    std::size_t slash = base.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return base + "." + suffix;
    return base.substr(0, dot) + "." + suffix + base.substr(dot);
}

}  // namespace

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.corpus_path.empty() || cfg.graph_path.empty()) {
            err << "build needs --corpus and --graph\n";
            return kExitUsage;
        }
        auto embedder = make_embedder(cfg.embedding);
        auto llm = make_llm(cfg, cfg.extractor);
        PromptSet prompts = load_prompts(cfg);
        MemorizePipeline pipeline(llm, prompts, cfg.params);

        std::vector<CorpusRecord> corpus = read_corpus(cfg.corpus_path);
        KnowledgeGraph graph(embedder);

        std::ofstream log;
        if (!cfg.build_log_path.empty()) {
            log.open(cfg.build_log_path, std::ios::trunc);
            if (!log)
                throw Error(ErrorCode::IoError, "cannot write log " + cfg.build_log_path);
        }

        for (const CorpusRecord& rec : corpus) {
            MemorizeReport report = pipeline.memorize(graph, rec.text, rec.timestamp);
            if (log.is_open()) {
                json j = {{"id", rec.id},
                          {"triplets_added", report.triplets_added},
                          {"theses_added", report.theses_added},
                          {"objects_added", report.objects_added},
                          {"edges_removed", report.edges_removed},
                          {"parse_errors", report.parse_errors},
                          {"stored", report.episodic_id.has_value()}};
                log << j.dump() << '\n';
            }
        }
        graph.save(cfg.graph_path);
        print_stats_table(graph.stats(), out);
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_query(const RunConfig& cfg, const QueryOptions& opt, std::ostream& out,
              std::ostream& err) {
    try {
        if (cfg.graph_path.empty() || opt.question.empty()) {
            err << "query needs --graph and --question\n";
            return kExitUsage;
        }
        auto embedder = make_embedder(cfg.embedding);
        KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph_path, embedder);
        auto llm = make_llm(cfg, cfg.generator);
        QaPipeline pipeline(llm, load_prompts(cfg), cfg.params);

        Answer answer = pipeline.answer(opt.question, graph, cfg.qa);
        if (answer.kind == AnswerKind::Text)
            out << *answer.text << '\n';
        else
            out << cfg.qa.no_answer_token << '\n';
        if (opt.show_evidence) {
            for (const RetrievedItem& item : answer.evidence.items)
                out << "  " << canonical(item.triplet) << '\n';
            if (!answer.trace.reason.empty())
                out << "  reason: " << answer.trace.reason << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_eval(const RunConfig& cfg, const EvalCliOptions& opt, std::ostream& out,
             std::ostream& err) {
    try {
        if (cfg.graph_path.empty() || cfg.questions_path.empty() || cfg.report_path.empty()) {
            err << "eval needs --graph, --questions and --report\n";
            return kExitUsage;
        }
        auto embedder = make_embedder(cfg.embedding);
        KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph_path, embedder);
        auto llm = make_llm(cfg, cfg.generator);
        PromptSet prompts = load_prompts(cfg);
        QaPipeline pipeline(llm, prompts, cfg.params);
        std::shared_ptr<const LlmClient> judge_client;
        if (cfg.use_judge || !cfg.mock_script_path.empty())
            judge_client = make_llm(cfg, cfg.judge);

        std::vector<QuestionRecord> questions = read_questions(cfg.questions_path);

        if (!opt.grid) {
            return run_eval_to_file(cfg, cfg.report_path, questions, graph, pipeline,
                                    judge_client.get(), prompts, out);
        }

        if (cfg.grid_combos.empty() || cfg.grid_restrictions.empty()) {
            err << "grid mode needs grid.combos and grid.restrictions in the config\n";
            return kExitUsage;
        }
        int rc = kExitOk;
        for (const auto& combo : cfg.grid_combos) {
            for (NodeRestriction r : cfg.grid_restrictions) {
                RunConfig cell = cfg;
                cell.qa.retrieval.combo = combo;
                cell.qa.retrieval.restriction = r;
                std::string path = grid_report_path(cfg.report_path, combo, r);
                int cell_rc = run_eval_to_file(cell, path, questions, graph, pipeline,
                                               judge_client.get(), prompts, out);
                rc = std::max(rc, cell_rc);
            }
        }
        return rc;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.graph_path.empty()) {
            err << "stats needs --graph\n";
            return kExitUsage;
        }
        auto embedder = make_embedder(cfg.embedding);
        KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph_path, embedder);
        print_stats_table(graph.stats(), out);
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_preprocess(const PreprocessCliOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        DatasetKind kind;
        std::string name = fold_label(opt.dataset);
        if (name == "hotpotqa")
            kind = DatasetKind::HotpotQA;
        else if (name == "triviaqa")
            kind = DatasetKind::TriviaQA;
        else if (name == "diaasq")
            kind = DatasetKind::DiaASQ;
        else {
            err << "unknown dataset '" << opt.dataset << "'\n";
            return kExitUsage;
        }
        if (opt.input.empty() || opt.out_qa.empty() || opt.out_contexts.empty()) {
            err << "preprocess needs --input, --out-qa and --out-contexts\n";
            return kExitUsage;
        }
        PreprocessCounts counts =
            preprocess_corpus(kind, opt.input, opt.out_qa, opt.out_contexts);
        out << "qa pairs: " << counts.raw_qa_pairs << " -> " << counts.kept_qa_pairs << '\n';
        out << "contexts: " << counts.raw_contexts << " -> " << counts.after_length_filter
            << " (length filter) -> " << counts.after_sibling_filter
            << " (sibling filter) -> " << counts.kept_contexts << " kept\n";
        return kExitOk;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace graphmem
