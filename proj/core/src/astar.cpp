#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "graphmem/retrieval.hpp"
#include "retrieval_internal.hpp"

namespace graphmem {

double ip_cost(const Vector& a, const Vector& b) {
    return (1.0 - inner_product(a, b)) / 2.0;
}

double heuristic(HMetric metric, const GraphView& view, NodeId current, NodeId goal,
                 const std::vector<NodeId>& path_so_far,
                 const std::unordered_map<NodeId, int>& bfs_to_goal) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (metric == HMetric::Zero) return 0.0;

    const KnowledgeGraph& g = view.graph();
    const double direct = ip_cost(g.node(current).embedding, g.node(goal).embedding);
    if (metric == HMetric::Ip) return direct;

    auto it = bfs_to_goal.find(current);
    if (it == bfs_to_goal.end()) return kInf;  // unreachable under the restriction
    const double bfs_len = static_cast<double>(it->second);

    if (metric == HMetric::WeightedSp) return bfs_len * direct;

    // AvgWeightedSp: mean of the adjacent-pair costs along the walked path
    // plus the direct current->goal cost, scaled by the BFS length.
    double sum = direct;
    std::size_t count = 1;
    for (std::size_t i = 0; i + 1 < path_so_far.size(); ++i) {
        sum += ip_cost(g.node(path_so_far[i]).embedding,
                       g.node(path_so_far[i + 1]).embedding);
        ++count;
    }
    return sum / static_cast<double>(count) * bfs_len;
}

std::optional<AStarPath> astar_single(const GraphView& view, NodeId start, NodeId goal,
                                      const AStarConfig& cfg) {
    if (!view.visible(start) || !view.visible(goal)) return std::nullopt;
    if (start == goal) return AStarPath{{start}, {}};

    // One BFS from the goal serves every heuristic evaluation of this pair.
    std::unordered_map<NodeId, int> bfs_to_goal;
    if (cfg.h_metric == HMetric::WeightedSp || cfg.h_metric == HMetric::AvgWeightedSp)
        bfs_to_goal = view.bfs_distances(goal);

    struct OpenEntry {
        double f;
        int g;               // staleness check against the best-known cost
        std::uint64_t node;  // id value; deterministic tie order
    };
    auto cmp = [](const OpenEntry& a, const OpenEntry& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.node > b.node;
    };
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, decltype(cmp)> open(cmp);

    std::unordered_map<NodeId, int> g_cost;
    std::unordered_map<NodeId, NodeId> parent_node;
    std::unordered_map<NodeId, EdgeId> parent_edge;

    auto walked_path = [&](NodeId tip) {
        std::vector<NodeId> nodes{tip};
        NodeId cur = tip;
        while (cur != start) {
            cur = parent_node.at(cur);
            nodes.push_back(cur);
        }
        std::reverse(nodes.begin(), nodes.end());
        return nodes;
    };

    const bool path_dependent = cfg.h_metric == HMetric::AvgWeightedSp;
    g_cost[start] = 0;
    open.push({heuristic(cfg.h_metric, view, start, goal, {start}, bfs_to_goal), 0,
               start.value});
    int passed = 0;

    while (!open.empty()) {
        OpenEntry top = open.top();
        open.pop();
        NodeId cur{top.node};
        if (top.g != g_cost.at(cur)) continue;  // superseded by a cheaper route

        if (cur == goal) {
            AStarPath path;
            path.nodes = walked_path(cur);
            for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i)
                path.edges.push_back(parent_edge.at(path.nodes[i + 1]));
            return path;
        }

        ++passed;
        if (passed > cfg.max_passed_nodes) return std::nullopt;

        int depth = top.g;
        if (depth >= cfg.max_depth) continue;

        for (EdgeId eid : view.visible_edges(cur)) {
            NodeId next = view.other_end(view.graph().edge(eid), cur);
            int ng = depth + 1;
            auto it = g_cost.find(next);
            if (it != g_cost.end() && it->second <= ng) continue;
            g_cost[next] = ng;
            parent_node[next] = cur;
            parent_edge[next] = eid;
            double h;
            if (path_dependent) {
                h = heuristic(cfg.h_metric, view, next, goal, walked_path(next), bfs_to_goal);
            } else {
                h = heuristic(cfg.h_metric, view, next, goal, {}, bfs_to_goal);
            }
            if (std::isinf(h)) continue;  // provably unreachable goal
            open.push({static_cast<double>(ng) + h, ng, next.value});
        }
    }
    return std::nullopt;
}

RetrievedTriplets astar_retrieve(const KnowledgeGraph& graph,
                                 const std::vector<NodeId>& start_nodes,
                                 const std::vector<NodeId>& goal_nodes,
                                 const Vector& q_embedding, const AStarConfig& cfg,
                                 NodeRestriction r) {
    (void)q_embedding;  // heuristics compare node embeddings, not the query
    GraphView view(graph, r);
    RetrievedTriplets out;
    std::unordered_set<std::string> seen;
    for (NodeId start : start_nodes) {
        for (NodeId goal : goal_nodes) {
            if (start == goal) continue;
            auto path = astar_single(view, start, goal, cfg);
            if (!path) continue;  // NoPath: pair skipped
            std::vector<RetrievedItem> items;
            items.reserve(path->edges.size());
            for (EdgeId eid : path->edges)
                items.push_back(detail_retrieval::make_item(graph, eid, "astar"));
            detail_retrieval::merge_items(out, seen, items);
        }
    }
    return out;
}

}  // namespace graphmem
