#include "graphmem/qa.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <unordered_set>

#include "graphmem/errors.hpp"
#include "graphmem/memorize.hpp"
#include "internal_util.hpp"

namespace graphmem {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Degraded-mode entity extraction: quoted spans, capitalized-token runs,
// and digit-bearing tokens ("k30u").
std::vector<std::string> fallback_entities(const std::string& question) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& s) {
        std::string t = trim(s);
        while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.back()))) t.pop_back();
        if (t.empty()) return;
        if (seen.insert(fold_label(t)).second) out.push_back(t);
    };

    for (char quote : {'"', '\''}) {
        std::size_t pos = 0;
        while (true) {
            std::size_t open = question.find(quote, pos);
            if (open == std::string::npos) break;
            std::size_t close = question.find(quote, open + 1);
            if (close == std::string::npos) break;
            push(question.substr(open + 1, close - open - 1));
            pos = close + 1;
        }
    }

    std::vector<std::string> tokens = detail::split_ws(question);
    std::string run;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        bool capitalized = !tok.empty() && std::isupper(static_cast<unsigned char>(tok[0]));
        // The question's leading word is usually an interrogative, not a name.
        if (capitalized && i > 0) {
            run = run.empty() ? tok : run + " " + tok;
        } else {
            if (!run.empty()) push(run);
            run.clear();
            bool has_digit = std::any_of(tok.begin(), tok.end(), [](unsigned char c) {
                return std::isdigit(c) != 0;
            });
            if (has_digit) push(tok);
        }
    }
    if (!run.empty()) push(run);
    return out;
}

}  // namespace

std::string evidence_line(const RetrievedItem& item) {
    switch (item.source_kind) {
        case EdgeKind::Simple: return canonical(item.triplet);
        case EdgeKind::Hyper:
        case EdgeKind::EpisodicLink: return item.hub_content;
    }
    return canonical(item.triplet);
}

QaPipeline::QaPipeline(std::shared_ptr<const LlmClient> llm, PromptSet prompts,
                       GenerationParams params)
    : llm_(std::move(llm)), prompts_(std::move(prompts)), params_(params) {}

ParsedQuery QaPipeline::parse_query(const std::string& question) const {
    if (trim(question).empty()) throw Error(ErrorCode::EmptyText, "question is empty");
    ParsedQuery out;
    out.question = question;

    ChatRequest req;
    req.system = prompts_.key_entities.system;
    req.user = render(prompts_.key_entities.user, {{"question", question}});
    req.params = params_;

    std::vector<std::string> lines;
    bool parsed = false;
    try {
        lines = parse_echo_response(llm_->complete(req));
        parsed = true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError && e.code() != ErrorCode::MockMiss) throw;
    }

    std::unordered_set<std::string> seen;
    if (parsed) {
        for (const std::string& line : lines) {
            std::string entity = trim(line);
            if (!entity.empty() && seen.insert(fold_label(entity)).second)
                out.entities.push_back(entity);
        }
    }
    if (out.entities.empty()) {
        out.degraded = true;
        out.entities = fallback_entities(question);
    }
    return out;
}

std::vector<NodeId> QaPipeline::match_entities(const std::vector<std::string>& entities,
                                               const KnowledgeGraph& graph, int k) const {
    std::vector<NodeId> out;
    std::unordered_set<NodeId> seen;
    auto push = [&](NodeId id) {
        if (seen.insert(id).second) out.push_back(id);
    };

    for (const std::string& entity : entities) {
        if (trim(entity).empty()) continue;
        // Tier 1: exact normalized label, regardless of k.
        if (auto exact = graph.find_object(entity)) {
            push(*exact);
            continue;
        }
        // Tier 2: compact-form equality ("MonaLisa" vs "Mona Lisa").
        const std::string compact = compact_label(entity);
        bool compact_hit = false;
        if (!compact.empty()) {
            for (const auto& [id, n] : graph.nodes()) {
                if (n.kind != NodeKind::Object) continue;
                if (compact_label(n.content) == compact) {
                    push(id);
                    compact_hit = true;
                }
            }
        }
        if (compact_hit) continue;
        // Tier 3: top-k object nodes by strictly positive similarity.
        Vector q = graph.embedder().embed(entity);
        std::vector<std::pair<NodeId, double>> scored;
        for (const auto& [id, n] : graph.nodes()) {
            if (n.kind != NodeKind::Object) continue;
            double sim = inner_product(q, n.embedding);
            if (sim > 0.0) scored.emplace_back(id, sim);
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k); ++i)
            push(scored[i].first);
    }

    if (out.empty()) throw Error(ErrorCode::NoMatches, "no graph node matches any entity");
    return out;
}

RetrievedTriplets QaPipeline::filter_triplets(const RetrievedTriplets& candidates,
                                              const std::string& question,
                                              const KnowledgeGraph& graph, int n) const {
    if (candidates.items.empty()) return candidates;

    Vector q = graph.embedder().embed(question);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.items.size());
    for (std::size_t i = 0; i < candidates.items.size(); ++i) {
        const RetrievedItem& item = candidates.items[i];
        // Hyper/episodic evidence ranks by its hub text, simple triplets by
        // their canonical string.
        const std::string text = item.source_kind == EdgeKind::Simple
                                     ? canonical(item.triplet)
                                     : item.hub_content;
        scored.emplace_back(inner_product(q, graph.embedder().embed(text)), i);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;
    });

    RetrievedTriplets out;
    for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(n); ++i)
        out.items.push_back(candidates.items[scored[i].second]);
    return out;
}

Answer QaPipeline::generate_answer(const std::string& question,
                                   const RetrievedTriplets& evidence,
                                   const std::string& no_answer_token) const {
    Answer answer;
    answer.evidence = evidence;
    if (evidence.items.empty()) {
        answer.kind = AnswerKind::NoAnswer;
        answer.trace.reason = "EmptyEvidence";
        return answer;
    }

    std::string context;
    std::unordered_set<std::string> seen_lines;
    for (const RetrievedItem& item : evidence.items) {
        std::string line = evidence_line(item);
        if (seen_lines.insert(line).second) {
            context += line;
            context += '\n';
        }
    }

    ChatRequest req;
    req.system = render(prompts_.answer_generation.system,
                        {{"no_answer_token", no_answer_token}});
    req.user = render(prompts_.answer_generation.user,
                      {{"context", context}, {"question", question},
                       {"no_answer_token", no_answer_token}});
    req.params = params_;

    std::string response = trim(llm_->complete(req));
    if (response.empty() || response.find(no_answer_token) != std::string::npos) {
        answer.kind = AnswerKind::NoAnswer;
        answer.trace.reason = "ModelNoAnswer";
        return answer;
    }
    answer.kind = AnswerKind::Text;
    answer.text = response;
    return answer;
}

Answer QaPipeline::answer(const std::string& question, const KnowledgeGraph& graph,
                          const QAConfig& cfg) const {
    auto t0 = std::chrono::steady_clock::now();
    ParsedQuery parsed = parse_query(question);
    QaTrace trace;
    trace.entities = parsed.entities;
    trace.degraded_parse = parsed.degraded;
    trace.parse_ms = ms_since(t0);

    auto no_answer = [&](const std::string& reason) {
        Answer a;
        a.kind = AnswerKind::NoAnswer;
        a.trace = trace;
        a.trace.reason = reason;
        return a;
    };

    if (parsed.entities.empty()) return no_answer("NoEntities");

    auto t1 = std::chrono::steady_clock::now();
    std::vector<NodeId> matched;
    try {
        matched = match_entities(parsed.entities, graph, cfg.entity_match_k);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoMatches) throw;
        return no_answer("NoMatches");
    }
    trace.matched_nodes = matched.size();
    trace.match_ms = ms_since(t1);

    auto t2 = std::chrono::steady_clock::now();
    Vector q_embedding = graph.embedder().embed(question);
    RetrievedTriplets retrieved =
        mixed_retrieve(graph, matched, q_embedding, cfg.retrieval);
    trace.retrieved = retrieved.items.size();
    RetrievedTriplets filtered =
        filter_triplets(retrieved, question, graph, cfg.top_n_triplets);
    trace.filtered = filtered.items.size();
    trace.retrieve_ms = ms_since(t2);

    auto t3 = std::chrono::steady_clock::now();
    Answer answer = generate_answer(question, filtered, cfg.no_answer_token);
    std::string reason = answer.trace.reason;
    answer.trace = trace;
    answer.trace.reason = reason;
    answer.trace.generate_ms = ms_since(t3);
    return answer;
}

}  // namespace graphmem
