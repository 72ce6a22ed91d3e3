#include "graphmem/memorize.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "graphmem/errors.hpp"
#include "internal_util.hpp"

namespace graphmem {

namespace {

// First fenced block (``` ... ```) of the response, or nullopt when the
// response carries none.
std::optional<std::string> fenced_block(const std::string& response) {
    std::size_t open = response.find("```");
    if (open == std::string::npos) return std::nullopt;
    std::size_t body = response.find('\n', open);
    if (body == std::string::npos) return std::nullopt;
    ++body;
    std::size_t close = response.find("```", body);
    if (close == std::string::npos) return std::nullopt;
    return response.substr(body, close - body);
}

bool is_empty_marker(const std::vector<std::string>& lines) {
    std::size_t nonblank = 0;
    bool empty_word = false;
    for (const auto& line : lines) {
        std::string t = trim(line);
        if (t.empty()) continue;
        ++nonblank;
        if (fold_label(t) == "empty") empty_word = true;
    }
    return nonblank == 0 || (nonblank == 1 && empty_word);
}

std::vector<std::string> block_lines(const std::string& response) {
    auto block = fenced_block(response);
    if (!block)
        throw Error(ErrorCode::ParseError, "response carries no fenced block");
    return detail::split_lines(*block);
}

std::optional<Triplet> parse_triplet_line(const std::string& raw) {
    std::string line = trim(raw);
    if (line.size() >= 2 && line.front() == '(' && line.back() == ')')
        line = line.substr(1, line.size() - 2);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t bar = line.find('|', start);
        if (bar == std::string::npos) {
            parts.push_back(trim(line.substr(start)));
            break;
        }
        parts.push_back(trim(line.substr(start, bar - start)));
        start = bar + 1;
    }
    if (parts.size() != 3) return std::nullopt;
    if (parts[0].empty() || parts[1].empty() || parts[2].empty()) return std::nullopt;
    return Triplet{parts[0], parts[1], parts[2]};
}

}  // namespace

std::vector<Triplet> parse_triplet_response(const std::string& response) {
    std::vector<std::string> lines = block_lines(response);
    if (is_empty_marker(lines)) return {};
    std::vector<Triplet> out;
    std::unordered_set<std::string> seen;
    for (const auto& line : lines) {
        if (trim(line).empty()) continue;
        auto t = parse_triplet_line(line);
        if (!t) continue;  // tolerate stray prose lines inside the block
        if (seen.insert(canonical(*t)).second) out.push_back(std::move(*t));
    }
    if (out.empty())
        throw Error(ErrorCode::ParseError, "fenced block holds no parseable triplets");
    return out;
}

std::vector<ThesisExtraction> parse_thesis_response(const std::string& response) {
    std::vector<std::string> lines = block_lines(response);
    if (is_empty_marker(lines)) return {};
    std::vector<ThesisExtraction> out;
    for (const auto& raw : lines) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::size_t sep = line.find("::");
        std::string statement = trim(sep == std::string::npos ? line : line.substr(0, sep));
        if (statement.empty()) continue;  // empty statement in response: dropped
        ThesisExtraction te;
        te.statement = std::move(statement);
        if (sep != std::string::npos) {
            std::string list = trim(line.substr(sep + 2));
            if (list.size() >= 2 && list.front() == '[' && list.back() == ']')
                list = list.substr(1, list.size() - 2);
            std::unordered_set<std::string> seen;
            std::size_t start = 0;
            while (start <= list.size()) {
                std::size_t semi = list.find(';', start);
                std::string entity =
                    trim(semi == std::string::npos ? list.substr(start)
                                                   : list.substr(start, semi - start));
                if (!entity.empty() && seen.insert(fold_label(entity)).second)
                    te.entities.push_back(std::move(entity));
                if (semi == std::string::npos) break;
                start = semi + 1;
            }
        }
        out.push_back(std::move(te));
    }
    if (out.empty())
        throw Error(ErrorCode::ParseError, "fenced block holds no parseable statements");
    return out;
}

std::vector<std::string> parse_echo_response(const std::string& response) {
    std::vector<std::string> lines = block_lines(response);
    if (is_empty_marker(lines)) return {};
    std::vector<std::string> out;
    for (const auto& line : lines) {
        std::string t = trim(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

MemorizePipeline::MemorizePipeline(std::shared_ptr<const LlmClient> llm, PromptSet prompts,
                                   GenerationParams params)
    : llm_(std::move(llm)), prompts_(std::move(prompts)), params_(params) {}

std::vector<Triplet> MemorizePipeline::extract_triplets(const std::string& text) const {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "nothing to extract from");
    ChatRequest req;
    req.system = prompts_.triplet_extraction.system;
    req.user = render(prompts_.triplet_extraction.user, {{"text", text}});
    req.params = params_;
    return parse_triplet_response(llm_->complete(req));
}

std::vector<ThesisExtraction> MemorizePipeline::extract_theses(const std::string& text) const {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "nothing to extract from");
    ChatRequest req;
    req.system = prompts_.thesis_extraction.system;
    req.user = render(prompts_.thesis_extraction.user, {{"text", text}});
    req.params = params_;
    return parse_thesis_response(llm_->complete(req));
}

std::vector<std::uint64_t> MemorizePipeline::find_outdated(
    const std::vector<Triplet>& new_triplets, const std::vector<ThesisExtraction>& new_theses,
    const KnowledgeGraph& graph, std::uint64_t* parse_errors) const {
    // New entity labels, in first-mention order.
    std::vector<std::string> entities;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& label) {
        std::string folded = fold_label(label);
        if (!folded.empty() && seen.insert(folded).second) entities.push_back(trim(label));
    };
    for (const auto& t : new_triplets) {
        push(t.subject);
        push(t.object);
    }
    for (const auto& te : new_theses)
        for (const auto& e : te.entities) push(e);

    // Match against existing object nodes: exact normalized label, else
    // best embedding match above the threshold.
    std::vector<NodeId> matched;
    std::unordered_set<NodeId> matched_set;
    for (const auto& label : entities) {
        std::optional<NodeId> hit = graph.find_object(label);
        if (!hit) {
            Vector q = graph.embedder().embed(label);
            double best = similarity_threshold;
            for (const auto& [id, n] : graph.nodes()) {
                if (n.kind != NodeKind::Object) continue;
                double sim = inner_product(q, n.embedding);
                if (sim >= best) {
                    best = sim;
                    hit = id;
                }
            }
        }
        if (hit && matched_set.insert(*hit).second) matched.push_back(*hit);
    }
    if (matched.empty()) return {};

    Neighborhood hood =
        graph.neighborhood(matched, {NodeKind::Object, NodeKind::Thesis}, 1);

    // Candidates by rendered line; the LLM echoes lines, we map them back.
    std::unordered_map<std::string, std::uint64_t> simple_by_line;
    std::vector<std::string> simple_lines;
    for (EdgeId eid : hood.edges) {
        const Edge& e = graph.edge(eid);
        if (e.kind != EdgeKind::Simple) continue;
        Triplet t = graph.edge_triplet(e);
        std::string line = "(" + t.subject + " | " + t.relation + " | " + t.object + ")";
        if (simple_by_line.emplace(line, eid.value).second) simple_lines.push_back(line);
    }
    std::unordered_map<std::string, std::uint64_t> thesis_by_line;
    std::vector<std::string> thesis_lines;
    for (NodeId nid : hood.nodes) {
        const Node& n = graph.node(nid);
        if (n.kind != NodeKind::Thesis) continue;
        if (thesis_by_line.emplace(n.content, nid.value).second)
            thesis_lines.push_back(n.content);
    }

    auto join = [](const std::vector<std::string>& lines) {
        std::string out;
        for (const auto& l : lines) {
            out += l;
            out += '\n';
        }
        return out;
    };

    std::vector<std::uint64_t> out;
    std::unordered_set<std::uint64_t> out_seen;

    if (!simple_lines.empty() && !new_triplets.empty()) {
        std::string new_block;
        for (const auto& t : new_triplets)
            new_block += "(" + t.subject + " | " + t.relation + " | " + t.object + ")\n";
        ChatRequest req;
        req.system = prompts_.outdated_simple.system;
        req.user = render(prompts_.outdated_simple.user,
                          {{"existing", join(simple_lines)}, {"new_knowledge", new_block}});
        req.params = params_;
        try {
            for (const std::string& echoed : parse_echo_response(llm_->complete(req))) {
                auto it = simple_by_line.find(trim(echoed));
                // Echoes outside the candidate set are dropped.
                if (it != simple_by_line.end() && out_seen.insert(it->second).second)
                    out.push_back(it->second);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseError) throw;
            if (parse_errors) ++*parse_errors;
        }
    }
    if (!thesis_lines.empty() && !new_theses.empty()) {
        std::string new_block;
        for (const auto& te : new_theses) new_block += te.statement + "\n";
        ChatRequest req;
        req.system = prompts_.outdated_thesis.system;
        req.user = render(prompts_.outdated_thesis.user,
                          {{"existing", join(thesis_lines)}, {"new_knowledge", new_block}});
        req.params = params_;
        try {
            for (const std::string& echoed : parse_echo_response(llm_->complete(req))) {
                auto it = thesis_by_line.find(trim(echoed));
                if (it != thesis_by_line.end() && out_seen.insert(it->second).second)
                    out.push_back(it->second);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseError) throw;
            if (parse_errors) ++*parse_errors;
        }
    }
    return out;
}

MemorizeReport MemorizePipeline::memorize(KnowledgeGraph& graph, const std::string& text,
                                          std::optional<std::int64_t> timestamp) const {
    MemorizeReport report;

    std::vector<Triplet> triplets;
    std::vector<ThesisExtraction> theses;
    bool triplets_ok = true, theses_ok = true;
    try {
        triplets = extract_triplets(text);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError) throw;
        triplets_ok = false;
        ++report.parse_errors;
    }
    try {
        theses = extract_theses(text);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError) throw;
        theses_ok = false;
        ++report.parse_errors;
    }

    if (triplets_ok || theses_ok) {
        std::vector<std::uint64_t> outdated =
            find_outdated(triplets, theses, graph, &report.parse_errors);
        if (!outdated.empty()) {
            RemovalReport removal = graph.remove_knowledge(outdated);
            report.edges_removed = removal.edges_removed();
        }

        const std::uint64_t objects_before = graph.stats().object_nodes;

        // Episodic members: the objects and theses this call committed.
        std::vector<NodeId> members;
        std::unordered_set<NodeId> member_seen;
        auto add_member = [&](NodeId id) {
            if (member_seen.insert(id).second) members.push_back(id);
        };

        for (const auto& t : triplets) {
            auto existing = graph.find_simple_edge(t);
            EdgeId eid = graph.add_simple_relation(t);
            if (!existing) ++report.triplets_added;
            const Edge& e = graph.edge(eid);
            add_member(e.a);
            add_member(e.b);
        }
        for (const auto& te : theses) {
            NodeId thesis = graph.add_thesis(te.statement, te.entities);
            ++report.theses_added;
            add_member(thesis);
            for (EdgeId eid : graph.incident(thesis)) {
                const Edge& e = graph.edge(eid);
                if (e.kind == EdgeKind::Hyper) add_member(e.b);
            }
        }

        report.objects_added = graph.stats().object_nodes - objects_before;
        report.episodic_id = graph.add_episode(text, members, timestamp);
    }

    graph.record_context(report.parse_errors);
    return report;
}

}  // namespace graphmem
