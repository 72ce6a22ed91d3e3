#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/graph.hpp"
#include "graphmem/llm.hpp"
#include "graphmem/prompts.hpp"
#include "graphmem/types.hpp"

namespace graphmem {

struct ThesisExtraction {
    std::string statement;
    std::vector<std::string> entities;  // deduplicated
};

struct MemorizeReport {
    std::uint64_t triplets_added = 0;
    std::uint64_t theses_added = 0;
    std::uint64_t objects_added = 0;
    std::uint64_t edges_removed = 0;
    std::uint64_t parse_errors = 0;
    std::optional<NodeId> episodic_id;
};

// Parsers for the fenced-block response formats. Both throw
// Error(ParseError) when the response carries no parseable fenced block;
// a block containing only EMPTY (or nothing) parses to an empty list.
//   triplets:  (subject | relation | object)   one per line
//   theses:    statement :: [e1; e2; ...]      one per line
std::vector<Triplet> parse_triplet_response(const std::string& response);
std::vector<ThesisExtraction> parse_thesis_response(const std::string& response);
// Echo-style response listing superseded knowledge, one line each.
std::vector<std::string> parse_echo_response(const std::string& response);

// The Memorize pipeline: extract triplets and theses from text with the
// LLM, replace outdated knowledge, then commit new nodes/edges plus the
// episodic record.
class MemorizePipeline {
public:
    MemorizePipeline(std::shared_ptr<const LlmClient> llm, PromptSet prompts,
                     GenerationParams params = {});

    std::vector<Triplet> extract_triplets(const std::string& text) const;
    std::vector<ThesisExtraction> extract_theses(const std::string& text) const;

    // Matches new entities against existing object nodes (exact normalized
    // label, else embedding similarity >= threshold), collects their
    // depth-1 neighborhood as candidates, asks the LLM which candidates the
    // new knowledge supersedes, and returns only ids inside the candidate
    // set. Parse failures mean "nothing outdated".
    std::vector<std::uint64_t> find_outdated(const std::vector<Triplet>& new_triplets,
                                             const std::vector<ThesisExtraction>& new_theses,
                                             const KnowledgeGraph& graph,
                                             std::uint64_t* parse_errors = nullptr) const;

    // extract -> find_outdated -> remove -> add -> episode. Extraction
    // failures downgrade to counters; the episodic node is skipped only
    // when the whole context failed parsing.
    MemorizeReport memorize(KnowledgeGraph& graph, const std::string& text,
                            std::optional<std::int64_t> timestamp = std::nullopt) const;

    double similarity_threshold = 0.9;  // entity-match fallback in find_outdated

private:
    std::shared_ptr<const LlmClient> llm_;
    PromptSet prompts_;
    GenerationParams params_;
};

}  // namespace graphmem
