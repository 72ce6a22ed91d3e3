#pragma once
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphmem/embedding.hpp"
#include "graphmem/graph.hpp"
#include "graphmem/types.hpp"

namespace graphmem {

// Traversal-time prohibition on node kinds: E/T/O forbid episodic, thesis
// or object nodes respectively; All imposes none.
enum class NodeRestriction { All, NoEpisodic, NoThesis, NoObject };

const char* to_string(NodeRestriction r);
std::optional<NodeRestriction> parse_restriction(const std::string& s);

enum class HMetric { Ip, WeightedSp, AvgWeightedSp, Zero };

std::optional<HMetric> parse_h_metric(const std::string& s);
const char* to_string(HMetric m);

struct AStarConfig {
    HMetric h_metric = HMetric::Ip;
    int max_depth = 10;
    int max_passed_nodes = 150;
};

struct WaterCirclesConfig {
    bool strict_filter = true;
    int hyper_num = 15;
    int episodic_num = 15;
    int chain_triplets_num = 25;
    int other_triplets_num = 6;
    bool do_text_pruning = false;
    int text_prune_chars = 256;  // episodic hub text budget when pruning
};

enum class FinalSortingMode { EndedFirst, ContinuousFirst, Mixed };

std::optional<FinalSortingMode> parse_sorting_mode(const std::string& s);
const char* to_string(FinalSortingMode m);

struct BeamSearchConfig {
    int max_depth = 5;
    int max_paths = 10;
    bool same_path_intersection_by_node = false;
    bool diff_paths_intersection_by_node = false;
    bool diff_paths_intersection_by_rel = false;
    double mean_alpha = 0.75;
    FinalSortingMode final_sorting_mode = FinalSortingMode::Mixed;
};

enum class AlgorithmKind { AStar, WaterCircles, BeamSearch };

const char* to_string(AlgorithmKind k);
std::optional<AlgorithmKind> parse_algorithm(const std::string& s);

// One retrieved knowledge item. Simple edges carry the triplet verbatim;
// hyper/episodic items point at their hub and carry its text.
struct RetrievedItem {
    Triplet triplet;
    EdgeKind source_kind = EdgeKind::Simple;
    EdgeId edge_id;
    std::optional<NodeId> hub;      // thesis/episodic node for hyper/episodic items
    std::string hub_content;        // statement or (possibly pruned) source text
    int n_intersections = 0;        // WaterCircles hub ranking, 0 elsewhere
    std::string algorithm;          // provenance
};

struct RetrievedTriplets {
    std::vector<RetrievedItem> items;  // no duplicate canonical triplet strings
};

// Read-only traversal adapter: prohibited-kind nodes are invisible, neither
// visitable nor traversable-through. Hubs count as ordinary vertices.
class GraphView {
public:
    GraphView(const KnowledgeGraph& graph, NodeRestriction r);

    bool visible(NodeId id) const;
    // Ids of edges incident to `id` whose both endpoints are visible.
    std::vector<EdgeId> visible_edges(NodeId id) const;
    NodeId other_end(const Edge& e, NodeId from) const;
    const KnowledgeGraph& graph() const { return *graph_; }
    NodeRestriction restriction() const { return restriction_; }

    // Unit-cost BFS distances from `from` over the view; unreachable nodes
    // are absent from the map.
    std::unordered_map<NodeId, int> bfs_distances(NodeId from) const;

private:
    const KnowledgeGraph* graph_;
    NodeRestriction restriction_;
};

inline GraphView apply_restriction(const KnowledgeGraph& g, NodeRestriction r) {
    return GraphView(g, r);
}

// --- A* ---------------------------------------------------------------

// Cost form of embedding similarity: (1 - dot)/2, in [0, 1], so heuristics
// share the unit-edge-cost scale.
double ip_cost(const Vector& a, const Vector& b);

struct AStarPath {
    std::vector<NodeId> nodes;  // start..goal
    std::vector<EdgeId> edges;
};

// Single-pair A* on the unweighted undirected view. nullopt = no path
// within max_depth / max_passed_nodes.
std::optional<AStarPath> astar_single(const GraphView& view, NodeId start, NodeId goal,
                                      const AStarConfig& cfg);

// Runs A* for every ordered (start, goal) pair of distinct nodes and
// collects the triplets along found paths, deduplicated.
RetrievedTriplets astar_retrieve(const KnowledgeGraph& graph,
                                 const std::vector<NodeId>& start_nodes,
                                 const std::vector<NodeId>& goal_nodes,
                                 const Vector& q_embedding, const AStarConfig& cfg,
                                 NodeRestriction r);

// Heuristic value for (current, goal). path_so_far = nodes from the search
// start up to and including current; used by AvgWeightedSp. bfs_to_goal
// gives unit-cost distances to the goal; missing entry = unreachable =
// +infinity.
double heuristic(HMetric metric, const GraphView& view, NodeId current, NodeId goal,
                 const std::vector<NodeId>& path_so_far,
                 const std::unordered_map<NodeId, int>& bfs_to_goal);

// --- WaterCircles -------------------------------------------------------

// Ring expansion from every entity node at once; nodes are claimed by their
// nearest entity (ties by entity order). Edges between regions of two
// different entities mark meeting chains; chain triplets form the primary
// list, everything traversed forms the secondary list, and hyper/episodic
// crossings are ranked by N_intersections (count of other question entities
// occurring as substrings of the hub text).
RetrievedTriplets watercircles_retrieve(const KnowledgeGraph& graph,
                                        const std::vector<NodeId>& entity_nodes,
                                        const Vector& q_embedding,
                                        const WaterCirclesConfig& cfg, NodeRestriction r);

// --- BeamSearch ---------------------------------------------------------

struct BeamPath {
    std::vector<NodeId> nodes;  // start..tip
    std::vector<EdgeId> edges;
    double relevance = 0.0;
    bool ended = false;       // ran out of legal extensions before max_depth
    std::string sort_key;     // concatenated canonical triplets; tie-break
};

// Final path selection per sorting mode. ended_first: take ended paths by
// descending relevance, then fill from continuous; continuous_first: the
// reverse; mixed: one merged descending list. Node/edge-disjointness flags
// are enforced greedily during selection (shared start nodes exempt).
std::vector<BeamPath> select_paths(std::vector<BeamPath> ended,
                                   std::vector<BeamPath> continuous,
                                   const BeamSearchConfig& cfg);

RetrievedTriplets beamsearch_retrieve(const KnowledgeGraph& graph,
                                      const std::vector<NodeId>& start_nodes,
                                      const Vector& q_embedding, const BeamSearchConfig& cfg,
                                      NodeRestriction r);

// --- Mixed ----------------------------------------------------------------

struct RetrievalConfig {
    std::vector<AlgorithmKind> combo = {AlgorithmKind::BeamSearch};
    NodeRestriction restriction = NodeRestriction::All;
    AStarConfig astar;
    WaterCirclesConfig watercircles;
    BeamSearchConfig beamsearch;
};

// Union of component outputs, deduplicated by canonical triplet string,
// first-seen order (component order = combo order). Component failures are
// skipped; the union of successes is returned.
RetrievedTriplets mixed_retrieve(const KnowledgeGraph& graph,
                                 const std::vector<NodeId>& entity_nodes,
                                 const Vector& q_embedding, const RetrievalConfig& cfg);

}  // namespace graphmem
