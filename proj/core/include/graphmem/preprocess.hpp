#pragma once
#include <cstdint>
#include <string>

namespace graphmem {

enum class DatasetKind { HotpotQA, TriviaQA, DiaASQ };

struct PreprocessCounts {
    std::uint64_t raw_qa_pairs = 0;
    std::uint64_t raw_contexts = 0;       // unique contexts / fragments before filtering
    std::uint64_t after_length_filter = 0;
    std::uint64_t after_sibling_filter = 0;  // TriviaQA only; equals previous otherwise
    std::uint64_t kept_qa_pairs = 0;
    std::uint64_t kept_contexts = 0;
};

struct PreprocessOptions {
    std::size_t min_chars = 64;
    std::size_t max_chars = 1024;
    std::size_t chunk_size = 1024;     // TriviaQA splitting
    std::size_t chunk_overlap = 64;
    std::uint64_t qa_limit = 0;        // 0 = dataset default (2000 hotpot / 500 trivia)
};

// Reads the raw dataset, applies the length/split/sibling rules, and
// writes qa records {id, question, gold_answer} and context records
// {id, text} as JSON lines. Expected raw shapes:
//   HotpotQA: the official distractor/validation JSON array.
//   TriviaQA: JSON lines {id, question, answer, contexts: [text, ...]}.
//   DiaASQ:   directory with qa.jsonl and contexts.jsonl, passed through.
PreprocessCounts preprocess_corpus(DatasetKind kind, const std::string& raw_path,
                                   const std::string& qa_out_path,
                                   const std::string& contexts_out_path,
                                   const PreprocessOptions& options = {});

}  // namespace graphmem
