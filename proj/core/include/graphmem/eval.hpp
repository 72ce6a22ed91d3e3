#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/qa.hpp"

namespace graphmem {

// Normalized string equality: case-folded, Unicode punctuation stripped,
// whitespace collapsed.
bool exact_match(const std::string& pred, const std::string& gold);
std::string normalize_answer(const std::string& s);

// 0/1 correctness label from a judge model. NoAnswer scores 0 without a
// call. An unparseable response is retried once, then scored 0 with
// *flagged set.
int judge(const std::string& question, const std::string& gold, const Answer& pred,
          const LlmClient& judge_client, const PromptSet& prompts,
          const GenerationParams& params, bool* flagged = nullptr);

struct QuestionRecord {
    std::string id;
    std::string question;
    std::string gold_answer;
};

struct EvalRecord {
    std::string id;
    std::string question;
    std::string gold;
    Answer predicted;
    bool em = false;
    std::optional<int> judge_label;
    bool parse_flagged = false;  // judge unparseable or degraded query parse
    std::optional<std::string> failure;
};

struct EvalReport {
    double accuracy = 0.0;         // mean judge label (0 when no judge ran)
    double em_rate = 0.0;
    double no_answer_rate = 0.0;
    double parse_error_rate = 0.0;
    std::uint64_t total = 0;
    bool judged = false;
    std::vector<EvalRecord> records;
};

struct EvalOptions {
    int parallelism = 1;
    // Called in input order as records complete (the incremental writer).
    std::function<void(const EvalRecord&)> sink;
    // Already-completed ids to skip (resume support); their records are
    // supplied so aggregates still cover them.
    std::vector<EvalRecord> completed;
};

// Runs answer() per question, computes EM always and judge labels when a
// judge client is supplied. Individual failures are recorded and the run
// continues.
EvalReport run_eval(const std::vector<QuestionRecord>& questions, const KnowledgeGraph& graph,
                    const QaPipeline& pipeline, const QAConfig& qa_config,
                    const LlmClient* judge_client, const PromptSet& prompts,
                    const GenerationParams& params, const EvalOptions& options = {});

// Recomputes aggregate rates from per-question records.
EvalReport aggregate_records(std::vector<EvalRecord> records, bool judged);

}  // namespace graphmem
