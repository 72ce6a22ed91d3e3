#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "graphmem/retrieval.hpp"
#include "retrieval_internal.hpp"

namespace graphmem {

namespace {

struct Claim {
    std::size_t entity = 0;  // index into the entity list
    int dist = 0;
};

// Every edge on any shortest same-claim path from `node` back to its
// entity: parents are neighbours one ring closer with the same claim.
void collect_region_edges(const GraphView& view,
                          const std::unordered_map<NodeId, Claim>& claims, NodeId node,
                          std::unordered_set<NodeId>& done,
                          std::unordered_set<EdgeId>& out) {
    if (!done.insert(node).second) return;
    const Claim& c = claims.at(node);
    if (c.dist == 0) return;
    for (EdgeId eid : view.visible_edges(node)) {
        NodeId other = view.other_end(view.graph().edge(eid), node);
        auto it = claims.find(other);
        if (it == claims.end()) continue;
        if (it->second.entity == c.entity && it->second.dist == c.dist - 1) {
            out.insert(eid);
            collect_region_edges(view, claims, other, done, out);
        }
    }
}

int count_intersections(const std::vector<std::string>& entity_labels,
                        std::size_t arriving_entity, const std::string& hub_text) {
    int n = 0;
    for (std::size_t i = 0; i < entity_labels.size(); ++i) {
        if (i == arriving_entity) continue;
        if (contains_fold(hub_text, entity_labels[i])) ++n;
    }
    return n;
}

}  // namespace

RetrievedTriplets watercircles_retrieve(const KnowledgeGraph& graph,
                                        const std::vector<NodeId>& entity_nodes,
                                        const Vector& q_embedding,
                                        const WaterCirclesConfig& cfg, NodeRestriction r) {
    (void)q_embedding;  // ring expansion is purely structural
    GraphView view(graph, r);

    // Dedup entities, keep order, drop invisible ones.
    std::vector<NodeId> entities;
    {
        std::unordered_set<NodeId> seen;
        for (NodeId e : entity_nodes)
            if (view.visible(e) && seen.insert(e).second) entities.push_back(e);
    }
    RetrievedTriplets out;
    if (entities.empty()) return out;

    std::vector<std::string> entity_labels;
    entity_labels.reserve(entities.size());
    for (NodeId e : entities) entity_labels.push_back(graph.node(e).content);

    // Rings expand from every entity at once; a node belongs to its nearest
    // entity, ties to the earlier entity in question order.
    std::unordered_map<NodeId, Claim> claims;
    for (std::size_t i = 0; i < entities.size(); ++i) {
        for (const auto& [node, dist] : view.bfs_distances(entities[i])) {
            auto it = claims.find(node);
            if (it == claims.end() || dist < it->second.dist)
                claims[node] = Claim{i, dist};
        }
    }

    // All edges walked by the expansion, in id order.
    std::vector<EdgeId> traversed;
    for (const auto& [eid, e] : graph.edges()) {
        if (!view.visible(e.a) || !view.visible(e.b)) continue;
        if (claims.count(e.a) || claims.count(e.b)) traversed.push_back(eid);
    }

    // Meeting edges join regions of two different entities; the chain is the
    // meeting edge plus every shortest in-region path back to both entities.
    std::unordered_set<EdgeId> chain_set;
    std::unordered_set<NodeId> done;
    for (EdgeId eid : traversed) {
        const Edge& e = graph.edge(eid);
        auto ca = claims.find(e.a);
        auto cb = claims.find(e.b);
        if (ca == claims.end() || cb == claims.end()) continue;
        if (ca->second.entity == cb->second.entity) continue;
        chain_set.insert(eid);
        collect_region_edges(view, claims, e.a, done, chain_set);
        collect_region_edges(view, claims, e.b, done, chain_set);
    }

    if (!cfg.strict_filter) {
        // Loose filter also admits triplets adjacent to the chains.
        std::unordered_set<NodeId> chain_nodes;
        for (EdgeId eid : chain_set) {
            const Edge& e = graph.edge(eid);
            chain_nodes.insert(e.a);
            chain_nodes.insert(e.b);
        }
        for (EdgeId eid : traversed) {
            const Edge& e = graph.edge(eid);
            if (chain_nodes.count(e.a) || chain_nodes.count(e.b)) chain_set.insert(eid);
        }
    }

    std::vector<EdgeId> chain_edges(chain_set.begin(), chain_set.end());
    std::sort(chain_edges.begin(), chain_edges.end());

    // Hyper/episodic crossings ranked by N_intersections: how many other
    // question entities appear inside the hub text. "Other" excludes the
    // entity whose region reached the hub.
    struct HubItem {
        EdgeId edge;
        int n_intersections;
    };
    std::unordered_map<EdgeId, int> hub_n;
    std::vector<HubItem> hyper_items, episodic_items;
    for (EdgeId eid : traversed) {
        const Edge& e = graph.edge(eid);
        if (e.kind == EdgeKind::Simple) continue;
        auto hub_claim = claims.find(e.a);
        std::size_t arriving =
            hub_claim != claims.end() ? hub_claim->second.entity : entities.size();
        int n = count_intersections(entity_labels, arriving, graph.node(e.a).content);
        hub_n[eid] = n;
        if (e.kind == EdgeKind::Hyper)
            hyper_items.push_back({eid, n});
        else
            episodic_items.push_back({eid, n});
    }
    auto by_intersections = [](const HubItem& a, const HubItem& b) {
        return a.n_intersections > b.n_intersections;
    };
    std::stable_sort(hyper_items.begin(), hyper_items.end(), by_intersections);
    std::stable_sort(episodic_items.begin(), episodic_items.end(), by_intersections);

    std::unordered_set<std::string> seen;
    auto emit = [&](EdgeId eid) {
        RetrievedItem item = detail_retrieval::make_item(graph, eid, "watercircles");
        if (auto it = hub_n.find(eid); it != hub_n.end()) item.n_intersections = it->second;
        if (cfg.do_text_pruning && item.source_kind == EdgeKind::EpisodicLink &&
            item.hub_content.size() > static_cast<std::size_t>(cfg.text_prune_chars))
            item.hub_content.resize(cfg.text_prune_chars);
        if (seen.insert(canonical(item.triplet)).second) {
            out.items.push_back(std::move(item));
            return true;
        }
        return false;
    };

    // Primary list first, then the ranked hub lists, then the leftover
    // secondary triplets.
    int emitted = 0;
    for (EdgeId eid : chain_edges) {
        if (emitted >= cfg.chain_triplets_num) break;
        if (emit(eid)) ++emitted;
    }
    emitted = 0;
    for (const HubItem& h : hyper_items) {
        if (emitted >= cfg.hyper_num) break;
        if (emit(h.edge)) ++emitted;
    }
    emitted = 0;
    for (const HubItem& h : episodic_items) {
        if (emitted >= cfg.episodic_num) break;
        if (emit(h.edge)) ++emitted;
    }
    emitted = 0;
    for (EdgeId eid : traversed) {
        if (emitted >= cfg.other_triplets_num) break;
        if (graph.edge(eid).kind != EdgeKind::Simple) continue;
        if (chain_set.count(eid)) continue;
        if (emit(eid)) ++emitted;
    }
    return out;
}

}  // namespace graphmem
