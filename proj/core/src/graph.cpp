#include "graphmem/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "graphmem/errors.hpp"
#include "internal_util.hpp"

namespace graphmem {

NodeKindSet all_node_kinds() {
    return {NodeKind::Object, NodeKind::Thesis, NodeKind::Episodic};
}

KnowledgeGraph::KnowledgeGraph(std::shared_ptr<const EmbeddingProvider> embedder)
    : embedder_(std::move(embedder)) {}

NodeId KnowledgeGraph::next_node_id() { return NodeId{next_id_++}; }
EdgeId KnowledgeGraph::next_edge_id() { return EdgeId{next_id_++}; }

const Node& KnowledgeGraph::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw Error(ErrorCode::UnknownId, "node " + std::to_string(id.value));
    return it->second;
}

const Edge& KnowledgeGraph::edge(EdgeId id) const {
    auto it = edges_.find(id);
    if (it == edges_.end())
        throw Error(ErrorCode::UnknownId, "edge " + std::to_string(id.value));
    return it->second;
}

const std::vector<EdgeId>& KnowledgeGraph::incident(NodeId id) const {
    static const std::vector<EdgeId> kEmpty;
    auto it = incident_.find(id);
    return it == incident_.end() ? kEmpty : it->second;
}

std::optional<NodeId> KnowledgeGraph::find_object(const std::string& label) const {
    auto it = object_by_label_.find(fold_label(label));
    if (it == object_by_label_.end()) return std::nullopt;
    return it->second;
}

std::optional<NodeId> KnowledgeGraph::find_thesis(const std::string& statement) const {
    auto it = thesis_by_statement_.find(fold_label(statement));
    if (it == thesis_by_statement_.end()) return std::nullopt;
    return it->second;
}

std::string KnowledgeGraph::edge_key(EdgeKind kind, NodeId a, NodeId b,
                                     const std::string& relation) const {
    std::string key = std::to_string(static_cast<int>(kind));
    key += ':';
    key += std::to_string(a.value);
    key += ':';
    key += std::to_string(b.value);
    key += ':';
    key += relation;
    return key;
}

std::optional<EdgeId> KnowledgeGraph::find_simple_edge(const Triplet& t) const {
    auto subj = find_object(t.subject);
    auto obj = find_object(t.object);
    if (!subj || !obj) return std::nullopt;
    auto it = edge_by_key_.find(edge_key(EdgeKind::Simple, *subj, *obj, trim(t.relation)));
    if (it == edge_by_key_.end()) return std::nullopt;
    return it->second;
}

NodeId KnowledgeGraph::upsert_object(const std::string& label) {
    const std::string trimmed = trim(label);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyLabel, "object label is empty");
    const std::string folded = fold_label(trimmed);
    auto it = object_by_label_.find(folded);
    if (it != object_by_label_.end()) return it->second;

    Node n;
    n.id = next_node_id();
    n.kind = NodeKind::Object;
    n.content = trimmed;
    n.embedding = embedder_->embed(trimmed);
    object_by_label_.emplace(folded, n.id);
    incident_.emplace(n.id, std::vector<EdgeId>{});
    NodeId id = n.id;
    nodes_.emplace(id, std::move(n));
    return id;
}

EdgeId KnowledgeGraph::add_simple_relation(const Triplet& t) {
    if (trim(t.subject).empty() || trim(t.relation).empty() || trim(t.object).empty())
        throw Error(ErrorCode::EmptyField, "triplet fields must be non-empty");
    NodeId subj = upsert_object(t.subject);
    NodeId obj = upsert_object(t.object);
    const std::string relation = trim(t.relation);
    const std::string key = edge_key(EdgeKind::Simple, subj, obj, relation);
    auto it = edge_by_key_.find(key);
    if (it != edge_by_key_.end()) return it->second;

    Edge e;
    e.id = next_edge_id();
    e.kind = EdgeKind::Simple;
    e.a = subj;
    e.b = obj;
    e.relation = relation;
    edge_by_key_.emplace(key, e.id);
    incident_[subj].push_back(e.id);
    if (obj != subj) incident_[obj].push_back(e.id);
    EdgeId id = e.id;
    edges_.emplace(id, std::move(e));
    return id;
}

NodeId KnowledgeGraph::add_thesis(const std::string& statement,
                                  const std::vector<std::string>& entities) {
    const std::string trimmed = trim(statement);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyStatement, "thesis statement is empty");
    const std::string folded = fold_label(trimmed);

    NodeId thesis;
    auto existing = thesis_by_statement_.find(folded);
    if (existing != thesis_by_statement_.end()) {
        thesis = existing->second;
    } else {
        Node n;
        n.id = next_node_id();
        n.kind = NodeKind::Thesis;
        n.content = trimmed;
        n.embedding = embedder_->embed(trimmed);
        thesis = n.id;
        thesis_by_statement_.emplace(folded, thesis);
        incident_.emplace(thesis, std::vector<EdgeId>{});
        nodes_.emplace(thesis, std::move(n));
    }

    std::unordered_set<std::string> seen;
    for (const std::string& entity : entities) {
        const std::string entity_key = fold_label(entity);
        if (entity_key.empty() || !seen.insert(entity_key).second) continue;
        NodeId member = upsert_object(entity);
        const std::string key = edge_key(EdgeKind::Hyper, thesis, member, "");
        if (edge_by_key_.count(key)) continue;
        Edge e;
        e.id = next_edge_id();
        e.kind = EdgeKind::Hyper;
        e.a = thesis;
        e.b = member;
        edge_by_key_.emplace(key, e.id);
        incident_[thesis].push_back(e.id);
        incident_[member].push_back(e.id);
        edges_.emplace(e.id, std::move(e));
    }
    return thesis;
}

NodeId KnowledgeGraph::add_episode(const std::string& text,
                                   const std::vector<NodeId>& member_ids,
                                   std::optional<std::int64_t> timestamp) {
    const std::string trimmed = trim(text);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyText, "episode text is empty");
    // Validate members before mutating anything.
    std::vector<NodeId> members;
    std::unordered_set<NodeId> seen;
    for (NodeId m : member_ids) {
        auto it = nodes_.find(m);
        if (it == nodes_.end())
            throw Error(ErrorCode::UnknownMember, "member " + std::to_string(m.value));
        if (it->second.kind == NodeKind::Episodic)
            throw Error(ErrorCode::MemberKindViolation,
                        "member " + std::to_string(m.value) + " is an episodic node");
        if (seen.insert(m).second) members.push_back(m);
    }

    Node n;
    n.id = next_node_id();
    n.kind = NodeKind::Episodic;
    n.content = trimmed;
    n.embedding = embedder_->embed(trimmed);
    n.created_at = timestamp;
    NodeId episode = n.id;
    incident_.emplace(episode, std::vector<EdgeId>{});
    nodes_.emplace(episode, std::move(n));

    for (NodeId member : members) {
        Edge e;
        e.id = next_edge_id();
        e.kind = EdgeKind::EpisodicLink;
        e.a = episode;
        e.b = member;
        edge_by_key_.emplace(edge_key(EdgeKind::EpisodicLink, episode, member, ""), e.id);
        incident_[episode].push_back(e.id);
        incident_[member].push_back(e.id);
        edges_.emplace(e.id, std::move(e));
    }
    return episode;
}

void KnowledgeGraph::remove_edge_internal(EdgeId id) {
    auto it = edges_.find(id);
    if (it == edges_.end()) return;
    const Edge& e = it->second;
    edge_by_key_.erase(edge_key(e.kind, e.a, e.b, e.relation));
    for (NodeId end : {e.a, e.b}) {
        auto inc = incident_.find(end);
        if (inc != incident_.end())
            std::erase(inc->second, id);
    }
    edges_.erase(it);
}

RemovalReport KnowledgeGraph::remove_knowledge(const std::vector<std::uint64_t>& ids) {
    // Validate first: unknown ids abort the whole call.
    for (std::uint64_t raw : ids) {
        if (!nodes_.count(NodeId{raw}) && !edges_.count(EdgeId{raw}))
            throw Error(ErrorCode::UnknownId, std::to_string(raw));
    }

    RemovalReport report;
    for (std::uint64_t raw : ids) {
        if (auto eit = edges_.find(EdgeId{raw}); eit != edges_.end()) {
            if (eit->second.kind != EdgeKind::Simple) {
                report.rejected.push_back(raw);
                continue;
            }
            remove_edge_internal(EdgeId{raw});
            ++report.simple_edges_removed;
            continue;
        }
        auto nit = nodes_.find(NodeId{raw});
        if (nit == nodes_.end()) continue;  // removed by an earlier id in this call
        if (nit->second.kind != NodeKind::Thesis) {
            report.rejected.push_back(raw);
            continue;
        }
        // Cascade: the thesis hub's hyper edges plus episodic links
        // pointing at it.
        std::vector<EdgeId> doomed = incident(nit->first);
        for (EdgeId eid : doomed) {
            const Edge& e = edge(eid);
            if (e.kind == EdgeKind::Hyper)
                ++report.hyper_edges_removed;
            else if (e.kind == EdgeKind::EpisodicLink)
                ++report.episodic_links_removed;
            remove_edge_internal(eid);
        }
        incident_.erase(nit->first);
        thesis_by_statement_.erase(fold_label(nit->second.content));
        nodes_.erase(nit);
        ++report.thesis_nodes_removed;
    }
    return report;
}

Neighborhood KnowledgeGraph::neighborhood(const std::vector<NodeId>& seeds,
                                          const NodeKindSet& allowed_kinds,
                                          std::size_t depth) const {
    for (NodeId s : seeds)
        if (!nodes_.count(s)) throw Error(ErrorCode::UnknownId, std::to_string(s.value));

    Neighborhood out;
    std::unordered_set<NodeId> visited;
    std::deque<std::pair<NodeId, std::size_t>> queue;
    for (NodeId s : seeds) {
        if (!allowed_kinds.count(node(s).kind)) continue;
        if (visited.insert(s).second) {
            queue.emplace_back(s, 0);
            out.nodes.push_back(s);
        }
    }
    while (!queue.empty()) {
        auto [cur, d] = queue.front();
        queue.pop_front();
        if (d >= depth) continue;
        for (EdgeId eid : incident(cur)) {
            const Edge& e = edge(eid);
            NodeId other = (e.a == cur) ? e.b : e.a;
            if (!allowed_kinds.count(node(other).kind)) continue;
            if (visited.insert(other).second) {
                queue.emplace_back(other, d + 1);
                out.nodes.push_back(other);
            }
        }
    }

    std::unordered_set<EdgeId> edge_seen;
    for (NodeId n : out.nodes) {
        for (EdgeId eid : incident(n)) {
            const Edge& e = edge(eid);
            if (!allowed_kinds.count(node(e.a).kind) || !allowed_kinds.count(node(e.b).kind))
                continue;
            if (edge_seen.insert(eid).second) out.edges.push_back(eid);
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

GraphStats KnowledgeGraph::stats() const {
    GraphStats s;
    for (const auto& [id, n] : nodes_) {
        switch (n.kind) {
            case NodeKind::Object: ++s.object_nodes; break;
            case NodeKind::Thesis: ++s.thesis_nodes; break;
            case NodeKind::Episodic: ++s.episodic_nodes; break;
        }
    }
    std::uint64_t epi_to_object = 0, epi_to_thesis = 0, object_simple_incidences = 0;
    for (const auto& [id, e] : edges_) {
        switch (e.kind) {
            case EdgeKind::Simple:
                ++s.simple_edges;
                object_simple_incidences += 2;  // self-loops count twice
                break;
            case EdgeKind::Hyper:
                ++s.hyper_edges;
                break;
            case EdgeKind::EpisodicLink:
                ++s.episodic_links;
                if (node(e.b).kind == NodeKind::Object)
                    ++epi_to_object;
                else
                    ++epi_to_thesis;
                break;
        }
    }
    if (s.episodic_nodes > 0) {
        s.mean_object_per_episodic =
            static_cast<double>(epi_to_object) / static_cast<double>(s.episodic_nodes);
        s.mean_thesis_per_episodic =
            static_cast<double>(epi_to_thesis) / static_cast<double>(s.episodic_nodes);
    }
    if (s.thesis_nodes > 0)
        s.mean_object_per_thesis =
            static_cast<double>(s.hyper_edges) / static_cast<double>(s.thesis_nodes);
    if (s.object_nodes > 0)
        s.mean_object_per_object = static_cast<double>(object_simple_incidences) /
                                   static_cast<double>(s.object_nodes);
    s.stored_contexts = stored_contexts_;
    s.parse_errors = parse_errors_;
    return s;
}

Triplet KnowledgeGraph::edge_triplet(const Edge& e) const {
    switch (e.kind) {
        case EdgeKind::Simple:
            return Triplet{node(e.a).content, e.relation, node(e.b).content};
        case EdgeKind::Hyper:
            return Triplet{node(e.b).content, "thesis", node(e.a).content};
        case EdgeKind::EpisodicLink:
            return Triplet{node(e.b).content, "episode", node(e.a).content};
    }
    return {};
}

void KnowledgeGraph::record_context(std::uint64_t parse_errors) {
    ++stored_contexts_;
    parse_errors_ += parse_errors;
}

}  // namespace graphmem
