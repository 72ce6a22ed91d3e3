#include "graphmem/retrieval.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "graphmem/errors.hpp"

namespace graphmem {

const char* to_string(NodeRestriction r) {
    switch (r) {
        case NodeRestriction::All: return "All";
        case NodeRestriction::NoEpisodic: return "E";
        case NodeRestriction::NoThesis: return "T";
        case NodeRestriction::NoObject: return "O";
    }
    return "?";
}

std::optional<NodeRestriction> parse_restriction(const std::string& s) {
    std::string f = fold_label(s);
    if (f == "all") return NodeRestriction::All;
    if (f == "e" || f == "noepisodic" || f == "no_episodic") return NodeRestriction::NoEpisodic;
    if (f == "t" || f == "nothesis" || f == "no_thesis") return NodeRestriction::NoThesis;
    if (f == "o" || f == "noobject" || f == "no_object") return NodeRestriction::NoObject;
    return std::nullopt;
}

const char* to_string(HMetric m) {
    switch (m) {
        case HMetric::Ip: return "ip";
        case HMetric::WeightedSp: return "weighted_sp";
        case HMetric::AvgWeightedSp: return "avg_weighted_sp";
        case HMetric::Zero: return "zero";
    }
    return "?";
}

std::optional<HMetric> parse_h_metric(const std::string& s) {
    std::string f = fold_label(s);
    if (f == "ip") return HMetric::Ip;
    if (f == "weighted_sp") return HMetric::WeightedSp;
    if (f == "avg_weighted_sp") return HMetric::AvgWeightedSp;
    if (f == "zero") return HMetric::Zero;
    return std::nullopt;
}

const char* to_string(FinalSortingMode m) {
    switch (m) {
        case FinalSortingMode::EndedFirst: return "ended_first";
        case FinalSortingMode::ContinuousFirst: return "continuous_first";
        case FinalSortingMode::Mixed: return "mixed";
    }
    return "?";
}

std::optional<FinalSortingMode> parse_sorting_mode(const std::string& s) {
    std::string f = fold_label(s);
    if (f == "ended_first") return FinalSortingMode::EndedFirst;
    if (f == "continuous_first") return FinalSortingMode::ContinuousFirst;
    if (f == "mixed") return FinalSortingMode::Mixed;
    return std::nullopt;
}

const char* to_string(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::AStar: return "astar";
        case AlgorithmKind::WaterCircles: return "watercircles";
        case AlgorithmKind::BeamSearch: return "beamsearch";
    }
    return "?";
}

std::optional<AlgorithmKind> parse_algorithm(const std::string& s) {
    std::string f = fold_label(s);
    if (f == "astar" || f == "a*" || f == "as") return AlgorithmKind::AStar;
    if (f == "watercircles" || f == "wc") return AlgorithmKind::WaterCircles;
    if (f == "beamsearch" || f == "bs") return AlgorithmKind::BeamSearch;
    return std::nullopt;
}

GraphView::GraphView(const KnowledgeGraph& graph, NodeRestriction r)
    : graph_(&graph), restriction_(r) {}

bool GraphView::visible(NodeId id) const {
    if (!graph_->has_node(id)) return false;
    NodeKind kind = graph_->node(id).kind;
    switch (restriction_) {
        case NodeRestriction::All: return true;
        case NodeRestriction::NoEpisodic: return kind != NodeKind::Episodic;
        case NodeRestriction::NoThesis: return kind != NodeKind::Thesis;
        case NodeRestriction::NoObject: return kind != NodeKind::Object;
    }
    return true;
}

std::vector<EdgeId> GraphView::visible_edges(NodeId id) const {
    std::vector<EdgeId> out;
    if (!visible(id)) return out;
    for (EdgeId eid : graph_->incident(id)) {
        const Edge& e = graph_->edge(eid);
        if (visible(e.a) && visible(e.b)) out.push_back(eid);
    }
    return out;
}

NodeId GraphView::other_end(const Edge& e, NodeId from) const {
    return e.a == from ? e.b : e.a;
}

std::unordered_map<NodeId, int> GraphView::bfs_distances(NodeId from) const {
    std::unordered_map<NodeId, int> dist;
    if (!visible(from)) return dist;
    dist[from] = 0;
    std::deque<NodeId> queue{from};
    while (!queue.empty()) {
        NodeId cur = queue.front();
        queue.pop_front();
        int d = dist[cur];
        for (EdgeId eid : visible_edges(cur)) {
            NodeId other = other_end(graph_->edge(eid), cur);
            if (dist.emplace(other, d + 1).second) queue.push_back(other);
        }
    }
    return dist;
}

namespace detail_retrieval {

// Appends items, skipping canonical-string duplicates.
void merge_items(RetrievedTriplets& into, std::unordered_set<std::string>& seen,
                 const std::vector<RetrievedItem>& items) {
    for (const RetrievedItem& item : items) {
        if (seen.insert(canonical(item.triplet)).second) into.items.push_back(item);
    }
}

RetrievedItem make_item(const KnowledgeGraph& g, EdgeId eid, const char* algorithm) {
    const Edge& e = g.edge(eid);
    RetrievedItem item;
    item.triplet = g.edge_triplet(e);
    item.source_kind = e.kind;
    item.edge_id = eid;
    item.algorithm = algorithm;
    if (e.kind == EdgeKind::Hyper || e.kind == EdgeKind::EpisodicLink) {
        item.hub = e.a;
        item.hub_content = g.node(e.a).content;
    }
    return item;
}

}  // namespace detail_retrieval

RetrievedTriplets mixed_retrieve(const KnowledgeGraph& graph,
                                 const std::vector<NodeId>& entity_nodes,
                                 const Vector& q_embedding, const RetrievalConfig& cfg) {
    RetrievedTriplets out;
    std::unordered_set<std::string> seen;
    for (AlgorithmKind kind : cfg.combo) {
        RetrievedTriplets part;
        try {
            switch (kind) {
                case AlgorithmKind::AStar:
                    part = astar_retrieve(graph, entity_nodes, entity_nodes, q_embedding,
                                          cfg.astar, cfg.restriction);
                    break;
                case AlgorithmKind::WaterCircles:
                    part = watercircles_retrieve(graph, entity_nodes, q_embedding,
                                                 cfg.watercircles, cfg.restriction);
                    break;
                case AlgorithmKind::BeamSearch:
                    part = beamsearch_retrieve(graph, entity_nodes, q_embedding,
                                               cfg.beamsearch, cfg.restriction);
                    break;
            }
        } catch (const Error&) {
            continue;  // a failed component contributes nothing
        }
        detail_retrieval::merge_items(out, seen, part.items);
    }
    return out;
}

}  // namespace graphmem
