#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/graph.hpp"
#include "graphmem/llm.hpp"
#include "graphmem/prompts.hpp"
#include "graphmem/retrieval.hpp"

namespace graphmem {

struct ParsedQuery {
    std::string question;
    std::vector<std::string> entities;  // deduplicated, non-empty
    bool degraded = false;              // fallback extraction engaged
};

struct QAConfig {
    RetrievalConfig retrieval;
    int top_n_triplets = 20;
    int entity_match_k = 3;
    std::string no_answer_token = "[NO_ANSWER]";
};

enum class AnswerKind { Text, NoAnswer };

struct QaTrace {
    std::vector<std::string> entities;
    std::uint64_t matched_nodes = 0;
    std::uint64_t retrieved = 0;
    std::uint64_t filtered = 0;
    bool degraded_parse = false;
    std::string reason;  // set when the pipeline short-circuits
    // Wall-clock stage timings; never serialized into records.
    double parse_ms = 0, match_ms = 0, retrieve_ms = 0, generate_ms = 0;
};

struct Answer {
    AnswerKind kind = AnswerKind::NoAnswer;
    std::optional<std::string> text;  // present iff kind == Text
    RetrievedTriplets evidence;
    QaTrace trace;
};

// Four-stage pipeline: question parsing -> entity matching -> retrieval +
// filtering -> conditional answer generation with NoAnswer.
class QaPipeline {
public:
    QaPipeline(std::shared_ptr<const LlmClient> llm, PromptSet prompts,
               GenerationParams params = {});

    // LLM key-entity extraction; on parse failure falls back to
    // capitalized-token / quoted-span / digit-token extraction and flags
    // the query as degraded.
    ParsedQuery parse_query(const std::string& question) const;

    // Per entity: exact normalized-label match bypasses k; else compact
    // label equality; else top-k object nodes by strictly positive
    // embedding similarity. Union over entities, first-seen order.
    // Throws Error(NoMatches) when every entity is unmatched.
    std::vector<NodeId> match_entities(const std::vector<std::string>& entities,
                                       const KnowledgeGraph& graph, int k) const;

    // Ranks candidates by inner product between the question embedding and
    // each item's text embedding (canonical triplet for simple items, hub
    // text for hyper/episodic), keeps top n, stable ties.
    RetrievedTriplets filter_triplets(const RetrievedTriplets& candidates,
                                      const std::string& question,
                                      const KnowledgeGraph& graph, int n) const;

    // Builds the conditional answer prompt from the evidence. Empty
    // evidence yields NoAnswer without an LLM call; a response carrying
    // the configured token yields NoAnswer.
    Answer generate_answer(const std::string& question, const RetrievedTriplets& evidence,
                           const std::string& no_answer_token) const;

    // Full composition. Stage failures map to NoAnswer with a trace
    // reason; transport failures propagate.
    Answer answer(const std::string& question, const KnowledgeGraph& graph,
                  const QAConfig& cfg) const;

private:
    std::shared_ptr<const LlmClient> llm_;
    PromptSet prompts_;
    GenerationParams params_;
};

// Context line for one evidence item: "(s, r, o)" for simple triplets, the
// statement for thesis items, the (possibly pruned) source text for
// episodic items.
std::string evidence_line(const RetrievedItem& item);

}  // namespace graphmem
