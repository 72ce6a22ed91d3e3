#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphmem/embedding.hpp"
#include "graphmem/types.hpp"

namespace graphmem {

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::Object;
    // Object: entity label (trimmed, first-seen casing). Thesis: full
    // statement. Episodic: the source text remembered in the graph.
    std::string content;
    Vector embedding;
    std::optional<std::int64_t> created_at;
};

struct Edge {
    EdgeId id;
    EdgeKind kind = EdgeKind::Simple;
    // Simple: a = subject, b = object, relation set.
    // Hyper: a = thesis hub, b = object member.
    // EpisodicLink: a = episodic hub, b = object or thesis member.
    NodeId a;
    NodeId b;
    std::string relation;
};

struct GraphStats {
    std::uint64_t object_nodes = 0;
    std::uint64_t thesis_nodes = 0;
    std::uint64_t episodic_nodes = 0;
    std::uint64_t simple_edges = 0;
    std::uint64_t hyper_edges = 0;
    std::uint64_t episodic_links = 0;
    double mean_object_per_episodic = 0.0;
    double mean_thesis_per_episodic = 0.0;
    double mean_object_per_thesis = 0.0;
    double mean_object_per_object = 0.0;
    std::uint64_t stored_contexts = 0;
    std::uint64_t parse_errors = 0;

    bool operator==(const GraphStats&) const = default;
};

struct RemovalReport {
    std::uint64_t simple_edges_removed = 0;
    std::uint64_t thesis_nodes_removed = 0;
    std::uint64_t hyper_edges_removed = 0;
    std::uint64_t episodic_links_removed = 0;
    // Ids that exist but are not removable knowledge (object / episodic
    // nodes, hyper edges, episodic links passed directly).
    std::vector<std::uint64_t> rejected;

    std::uint64_t edges_removed() const {
        return simple_edges_removed + hyper_edges_removed + episodic_links_removed;
    }
};

struct Neighborhood {
    std::vector<NodeId> nodes;  // BFS-visited, in visit order
    std::vector<EdgeId> edges;  // incident edges of visited nodes, id order
};

using NodeKindSet = std::set<NodeKind>;
NodeKindSet all_node_kinds();

// Tri-layer knowledge graph: object nodes connected by simple relations,
// thesis hypernodes fanning out to their entities, episodic hypernodes
// fanning out to everything one memorized context produced.
//
// The graph is a value: copying it yields an independent snapshot, which is
// the concurrency contract (single writer, readers work on copies).
class KnowledgeGraph {
public:
    explicit KnowledgeGraph(std::shared_ptr<const EmbeddingProvider> embedder);

    // Returns the existing node when the normalized label matches, else
    // creates one with an embedding from the provider.
    NodeId upsert_object(const std::string& label);

    // Upserts both endpoints, adds the simple edge. Idempotent for
    // identical triplets; returns the existing edge id on repeats.
    EdgeId add_simple_relation(const Triplet& t);

    // Thesis node plus one hyper edge per distinct entity.
    NodeId add_thesis(const std::string& statement, const std::vector<std::string>& entities);

    // Episodic node plus one link per distinct member. Members must be
    // existing Object or Thesis nodes.
    NodeId add_episode(const std::string& text, const std::vector<NodeId>& member_ids,
                       std::optional<std::int64_t> timestamp = std::nullopt);

    // Removes simple edges and thesis nodes (cascading their hyper edges
    // and incident episodic links). Object nodes stay even if orphaned;
    // episodic memories are never removed here.
    RemovalReport remove_knowledge(const std::vector<std::uint64_t>& ids);

    // Breadth-first expansion from seeds, restricted to allowed kinds.
    // Returns visited nodes and every edge incident to them whose both
    // endpoints are of allowed kinds.
    Neighborhood neighborhood(const std::vector<NodeId>& seeds, const NodeKindSet& allowed_kinds,
                              std::size_t depth = 1) const;

    GraphStats stats() const;

    void save(const std::string& path) const;
    static KnowledgeGraph load(const std::string& path,
                               std::shared_ptr<const EmbeddingProvider> embedder);

    // Accessors
    bool has_node(NodeId id) const { return nodes_.count(id) > 0; }
    bool has_edge(EdgeId id) const { return edges_.count(id) > 0; }
    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;
    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    const std::map<EdgeId, Edge>& edges() const { return edges_; }
    // Incident edge ids in insertion order; empty list for unknown nodes.
    const std::vector<EdgeId>& incident(NodeId id) const;
    std::optional<NodeId> find_object(const std::string& label) const;
    std::optional<NodeId> find_thesis(const std::string& statement) const;
    std::optional<EdgeId> find_simple_edge(const Triplet& t) const;
    // Triplet rendering of any edge: simple edges verbatim, hyper edges as
    // (member, "thesis", statement), episodic links as (member, "episode",
    // source text).
    Triplet edge_triplet(const Edge& e) const;

    const EmbeddingProvider& embedder() const { return *embedder_; }
    std::shared_ptr<const EmbeddingProvider> embedder_ptr() const { return embedder_; }

    // Memorize-pipeline bookkeeping, persisted with the graph: one call per
    // context presented for storage.
    void record_context(std::uint64_t parse_errors);

private:
    NodeId next_node_id();
    EdgeId next_edge_id();
    std::string edge_key(EdgeKind kind, NodeId a, NodeId b, const std::string& relation) const;
    void remove_edge_internal(EdgeId id);

    std::shared_ptr<const EmbeddingProvider> embedder_;
    std::map<NodeId, Node> nodes_;
    std::map<EdgeId, Edge> edges_;
    std::unordered_map<std::string, NodeId> object_by_label_;  // folded label -> id
    std::unordered_map<std::string, NodeId> thesis_by_statement_;
    std::unordered_map<NodeId, std::vector<EdgeId>> incident_;
    std::unordered_map<std::string, EdgeId> edge_by_key_;
    std::uint64_t next_id_ = 1;  // shared by nodes and edges
    std::uint64_t stored_contexts_ = 0;
    std::uint64_t parse_errors_ = 0;
};

}  // namespace graphmem
