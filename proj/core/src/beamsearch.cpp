#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "graphmem/retrieval.hpp"
#include "retrieval_internal.hpp"

namespace graphmem {

namespace {

// Relevance = exponentially weighted mean of per-edge scores, newest edge
// at full weight, weights decaying by mean_alpha toward the path start.
double weighted_mean(const std::vector<double>& scores, double alpha) {
    if (scores.empty()) return 0.0;
    double num = 0.0, den = 0.0;
    const std::size_t L = scores.size();
    for (std::size_t k = 0; k < L; ++k) {
        double w = std::pow(alpha, static_cast<double>(L - 1 - k));
        num += w * scores[k];
        den += w;
    }
    return num / den;
}

struct WorkPath {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;
    std::vector<double> edge_scores;
    std::unordered_set<NodeId> node_set;
    double relevance = 0.0;
    std::string sort_key;  // concatenated canonical triplets
};

bool better(const WorkPath& a, const WorkPath& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
    if (a.sort_key != b.sort_key) return a.sort_key < b.sort_key;
    return a.nodes.front() < b.nodes.front();
}

BeamPath to_public(const WorkPath& p, bool ended) {
    BeamPath out;
    out.nodes = p.nodes;
    out.edges = p.edges;
    out.relevance = p.relevance;
    out.sort_key = p.sort_key;
    out.ended = ended;
    return out;
}

bool path_order(const BeamPath& a, const BeamPath& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
    if (a.sort_key != b.sort_key) return a.sort_key < b.sort_key;
    if (a.nodes.empty() || b.nodes.empty()) return a.nodes.size() < b.nodes.size();
    return a.nodes.front() < b.nodes.front();
}

// Node collision between two selected paths; a start node shared by both
// is exempt (every path from one entity carries it).
bool node_conflict(const BeamPath& a, const BeamPath& b) {
    std::unordered_set<NodeId> bn(b.nodes.begin(), b.nodes.end());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        NodeId v = a.nodes[i];
        if (!bn.count(v)) continue;
        bool shared_start = !a.nodes.empty() && !b.nodes.empty() && v == a.nodes.front() &&
                            v == b.nodes.front();
        if (!shared_start) return true;
    }
    return false;
}

bool edge_conflict(const BeamPath& a, const BeamPath& b) {
    std::unordered_set<EdgeId> be(b.edges.begin(), b.edges.end());
    for (EdgeId e : a.edges)
        if (be.count(e)) return true;
    return false;
}

}  // namespace

std::vector<BeamPath> select_paths(std::vector<BeamPath> ended,
                                   std::vector<BeamPath> continuous,
                                   const BeamSearchConfig& cfg) {
    std::stable_sort(ended.begin(), ended.end(), path_order);
    std::stable_sort(continuous.begin(), continuous.end(), path_order);

    std::vector<BeamPath> ordered;
    switch (cfg.final_sorting_mode) {
        case FinalSortingMode::EndedFirst:
            ordered = std::move(ended);
            ordered.insert(ordered.end(), continuous.begin(), continuous.end());
            break;
        case FinalSortingMode::ContinuousFirst:
            ordered = std::move(continuous);
            ordered.insert(ordered.end(), ended.begin(), ended.end());
            break;
        case FinalSortingMode::Mixed:
            ordered = std::move(ended);
            ordered.insert(ordered.end(), continuous.begin(), continuous.end());
            std::stable_sort(ordered.begin(), ordered.end(), path_order);
            break;
    }

    std::vector<BeamPath> selected;
    for (BeamPath& p : ordered) {
        if (selected.size() >= static_cast<std::size_t>(cfg.max_paths)) break;
        bool conflict = false;
        for (const BeamPath& q : selected) {
            if (!cfg.diff_paths_intersection_by_node && node_conflict(p, q)) {
                conflict = true;
                break;
            }
            if (!cfg.diff_paths_intersection_by_rel && edge_conflict(p, q)) {
                conflict = true;
                break;
            }
        }
        if (!conflict) selected.push_back(std::move(p));
    }
    return selected;
}

RetrievedTriplets beamsearch_retrieve(const KnowledgeGraph& graph,
                                      const std::vector<NodeId>& start_nodes,
                                      const Vector& q_embedding, const BeamSearchConfig& cfg,
                                      NodeRestriction r) {
    GraphView view(graph, r);
    RetrievedTriplets out;

    std::vector<WorkPath> active;
    std::unordered_set<NodeId> entered;  // nodes entered by any kept lineage
    std::unordered_set<EdgeId> used_edges;
    {
        std::unordered_set<NodeId> seen;
        for (NodeId s : start_nodes) {
            if (!view.visible(s) || !seen.insert(s).second) continue;
            if (active.size() >= static_cast<std::size_t>(cfg.max_paths)) break;
            WorkPath p;
            p.nodes = {s};
            p.node_set = {s};
            active.push_back(std::move(p));
            entered.insert(s);
        }
    }
    if (active.empty()) return out;

    // Per-edge semantic score against the question, computed once.
    std::unordered_map<EdgeId, double> edge_score;
    auto score_of = [&](EdgeId eid) {
        auto it = edge_score.find(eid);
        if (it != edge_score.end()) return it->second;
        Triplet t = graph.edge_triplet(graph.edge(eid));
        double s = inner_product(q_embedding, graph.embedder().embed(canonical(t)));
        edge_score.emplace(eid, s);
        return s;
    };

    std::vector<BeamPath> ended, continuous;

    for (int depth = 1; depth <= cfg.max_depth && !active.empty(); ++depth) {
        struct Candidate {
            WorkPath path;   // extended path
            std::size_t parent;
            NodeId tip;
            EdgeId via;
            bool self_revisit;  // tip already on the parent path
        };
        std::vector<Candidate> pool;
        std::vector<bool> had_extension(active.size(), false);

        for (std::size_t pi = 0; pi < active.size(); ++pi) {
            const WorkPath& p = active[pi];
            NodeId tip = p.nodes.back();
            for (EdgeId eid : view.visible_edges(tip)) {
                NodeId next = view.other_end(graph.edge(eid), tip);
                const bool self_revisit = p.node_set.count(next) > 0;
                if (!cfg.same_path_intersection_by_node && self_revisit) continue;
                had_extension[pi] = true;

                Candidate c;
                c.parent = pi;
                c.tip = next;
                c.via = eid;
                c.self_revisit = self_revisit;
                c.path = p;
                c.path.nodes.push_back(next);
                c.path.edges.push_back(eid);
                c.path.edge_scores.push_back(score_of(eid));
                c.path.node_set.insert(next);
                c.path.relevance = weighted_mean(c.path.edge_scores, cfg.mean_alpha);
                c.path.sort_key += canonical(graph.edge_triplet(graph.edge(eid)));
                c.path.sort_key += '\n';
                pool.push_back(std::move(c));
            }
        }

        std::stable_sort(pool.begin(), pool.end(),
                         [](const Candidate& a, const Candidate& b) {
                             return better(a.path, b.path);
                         });

        std::vector<WorkPath> next_active;
        std::vector<bool> parent_survived(active.size(), false);
        for (Candidate& c : pool) {
            if (next_active.size() >= static_cast<std::size_t>(cfg.max_paths)) break;
            // Re-entering one's own nodes is the same-path flag's business.
            if (!cfg.diff_paths_intersection_by_node && !c.self_revisit &&
                entered.count(c.tip))
                continue;
            if (!cfg.diff_paths_intersection_by_rel && used_edges.count(c.via)) continue;
            entered.insert(c.tip);
            used_edges.insert(c.via);
            parent_survived[c.parent] = true;
            next_active.push_back(std::move(c.path));
        }

        const bool beam_full =
            next_active.size() >= static_cast<std::size_t>(cfg.max_paths);
        for (std::size_t pi = 0; pi < active.size(); ++pi) {
            if (parent_survived[pi]) continue;
            // A path with no legal move ends; one that merely lost the beam
            // competition is dropped.
            if (!had_extension[pi] || !beam_full)
                ended.push_back(to_public(active[pi], true));
        }
        active = std::move(next_active);
    }

    for (const WorkPath& p : active) continuous.push_back(to_public(p, false));

    std::vector<BeamPath> selected = select_paths(std::move(ended), std::move(continuous), cfg);

    std::unordered_set<std::string> seen;
    for (const BeamPath& p : selected) {
        std::vector<RetrievedItem> items;
        items.reserve(p.edges.size());
        for (EdgeId eid : p.edges)
            items.push_back(detail_retrieval::make_item(graph, eid, "beamsearch"));
        detail_retrieval::merge_items(out, seen, items);
    }
    return out;
}

}  // namespace graphmem
