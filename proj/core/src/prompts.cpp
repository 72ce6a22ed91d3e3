#include "graphmem/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace graphmem {

namespace {

constexpr const char* kTripletSystem =
    "You extract factual knowledge from text.\n"
    "Return every atomic fact as a triplet, one per line, inside a single fenced code "
    "block:\n"
    "```\n"
    "(subject | relation | object)\n"
    "```\n"
    "Subjects and objects are short entity labels; relations are short verb phrases.\n"
    "If the text contains no extractable facts, return a fenced block containing only the "
    "word EMPTY.";

constexpr const char* kTripletUser = "Extract triplets from this text.\nText:\n{text}";

constexpr const char* kThesisSystem =
    "You extract thesis statements from text.\n"
    "A thesis is one complete, self-contained thought that needs no surrounding context.\n"
    "Return one thesis per line inside a single fenced code block, each followed by the "
    "entities it mentions:\n"
    "```\n"
    "statement :: [entity1; entity2]\n"
    "```\n"
    "If the text contains no thesis statements, return a fenced block containing only the "
    "word EMPTY.";

constexpr const char* kThesisUser = "Extract thesis statements from this text.\nText:\n{text}";

constexpr const char* kOutdatedSimpleSystem =
    "You maintain a knowledge base of triplets.\n"
    "Given currently stored triplets and newly learned triplets, list the stored triplets "
    "that the new information replaces or contradicts.\n"
    "Echo each replaced stored line exactly as given, one per line, inside a single fenced "
    "code block. If nothing is replaced, return a fenced block containing only the word "
    "EMPTY.";

constexpr const char* kOutdatedSimpleUser =
    "Stored triplets:\n{existing}\n\nNewly learned triplets:\n{new_knowledge}";

constexpr const char* kOutdatedThesisSystem =
    "You maintain a knowledge base of statements.\n"
    "Given currently stored statements and newly learned statements, list the stored "
    "statements that the new information replaces or contradicts.\n"
    "Echo each replaced stored line exactly as given, one per line, inside a single fenced "
    "code block. If nothing is replaced, return a fenced block containing only the word "
    "EMPTY.";

constexpr const char* kOutdatedThesisUser =
    "Stored statements:\n{existing}\n\nNewly learned statements:\n{new_knowledge}";

constexpr const char* kKeyEntitiesSystem =
    "Extract the key entities from the question: the people, things, places, dates or "
    "terms the question is about.\n"
    "Return one entity per line inside a single fenced code block.\n"
    "If there are none, return a fenced block containing only the word EMPTY.";

constexpr const char* kKeyEntitiesUser =
    "Extract the key entities from this question.\nQuestion:\n{question}";

constexpr const char* kAnswerSystem =
    "Answer the question using only the provided context.\n"
    "Reply with the answer itself: short, direct, no explanations.\n"
    "If the context does not contain the information needed to answer, reply with exactly "
    "{no_answer_token} and nothing else.";

constexpr const char* kAnswerUser = "Context:\n{context}\n\nQuestion:\n{question}";

constexpr const char* kJudgeSystem =
    "You judge question answering.\n"
    "Given a question, the ground-truth answer and a model answer, decide whether the "
    "model answer is correct.\n"
    "Reply with a single digit: 1 if correct, 0 if incorrect. No other text.";

constexpr const char* kJudgeUser =
    "Question: {question}\nGround truth: {gold}\nModel answer: {answer}";

std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void load_role(const std::string& dir, const char* role, PromptTemplate& tmpl) {
    namespace fs = std::filesystem;
    if (auto s = read_file(fs::path(dir) / (std::string(role) + ".system.txt"))) tmpl.system = *s;
    if (auto u = read_file(fs::path(dir) / (std::string(role) + ".user.txt"))) tmpl.user = *u;
}

}  // namespace

PromptSet PromptSet::defaults() {
    PromptSet p;
    p.triplet_extraction = {kTripletSystem, kTripletUser};
    p.thesis_extraction = {kThesisSystem, kThesisUser};
    p.outdated_simple = {kOutdatedSimpleSystem, kOutdatedSimpleUser};
    p.outdated_thesis = {kOutdatedThesisSystem, kOutdatedThesisUser};
    p.key_entities = {kKeyEntitiesSystem, kKeyEntitiesUser};
    p.answer_generation = {kAnswerSystem, kAnswerUser};
    p.judge = {kJudgeSystem, kJudgeUser};
    return p;
}

PromptSet PromptSet::from_directory(const std::string& dir) {
    PromptSet p = defaults();
    load_role(dir, "triplet_extraction", p.triplet_extraction);
    load_role(dir, "thesis_extraction", p.thesis_extraction);
    load_role(dir, "outdated_simple", p.outdated_simple);
    load_role(dir, "outdated_thesis", p.outdated_thesis);
    load_role(dir, "key_entities", p.key_entities);
    load_role(dir, "answer_generation", p.answer_generation);
    load_role(dir, "judge", p.judge);
    return p;
}

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& values) {
    std::string out = tmpl;
    for (const auto& [key, value] : values) {
        const std::string marker = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(marker, pos)) != std::string::npos) {
            out.replace(pos, marker.size(), value);
            pos += value.size();
        }
    }
    return out;
}

}  // namespace graphmem
