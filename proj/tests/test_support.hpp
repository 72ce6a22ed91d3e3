#pragma once
// Shared fixtures and independent oracles for the test suites.

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphmem/embedding.hpp"
#include "graphmem/graph.hpp"
#include "graphmem/llm.hpp"
#include "graphmem/memorize.hpp"
#include "graphmem/prompts.hpp"
#include "graphmem/retrieval.hpp"

namespace graphmem::testsupport {

// Provider with hand-set vectors for specific texts; anything else falls
// back to the hashed embedder at the same dimension.
class FixedEmbedder final : public EmbeddingProvider {
public:
    explicit FixedEmbedder(std::size_t dim) : dim_(dim), fallback_(dim) {}

    void set(const std::string& text, Vector v) {
        normalize(v);
        fixed_[text] = std::move(v);
    }

    Vector embed(const std::string& text) const override {
        auto it = fixed_.find(text);
        if (it != fixed_.end()) return it->second;
        return fallback_.embed(text);
    }
    std::size_t dimension() const override { return dim_; }
    std::string id() const override { return "fixed-" + std::to_string(dim_); }

private:
    std::size_t dim_;
    HashedBagEmbedder fallback_;
    std::map<std::string, Vector> fixed_;
};

inline const char* kMonaLisaText =
    "Mona Lisa, oil painting on a poplar wood panel by Leonardo da Vinci, probably the "
    "world's most famous painting. It was painted sometime between 1503 and 1519.";

inline const char* kMonaLisaTripletResponse =
    "```\n"
    "(Mona Lisa | is a | oil painting)\n"
    "(Mona Lisa | painted on | poplar wood)\n"
    "(Mona Lisa | creator | Leonardo da Vinci)\n"
    "(Mona Lisa | inception | 1503-1519)\n"
    "```\n";

// The golden-build thesis script: entity lists sized so the graph lands on
// the canonical 6 hyper edges (2 + 2 + 2).
inline const char* kMonaLisaThesisResponse =
    "```\n"
    "Mona Lisa is an oil painting :: [Mona Lisa; oil painting]\n"
    "Mona Lisa was painted on poplar wood :: [Mona Lisa; poplar wood]\n"
    "Mona Lisa was painted by Leonardo da Vinci between 1503 and 1519 :: "
    "[Mona Lisa; Leonardo da Vinci]\n"
    "```\n";

// Scripted responses for memorizing the passage. Rules match on user-text
// substrings; the default prompt set puts a distinct instruction line into
// each user turn.
inline std::shared_ptr<MockLlmClient> mona_lisa_mock() {
    auto mock = std::make_shared<MockLlmClient>();
    mock->add_rule("Extract triplets", kMonaLisaTripletResponse);
    mock->add_rule("Extract thesis statements", kMonaLisaThesisResponse);
    mock->add_rule("Stored triplets", "```\nEMPTY\n```");
    mock->add_rule("Stored statements", "```\nEMPTY\n```");
    return mock;
}

inline KnowledgeGraph build_mona_lisa_graph(
    std::shared_ptr<const EmbeddingProvider> provider = nullptr) {
    if (!provider) provider = std::make_shared<HashedBagEmbedder>(256);
    KnowledgeGraph graph(provider);
    MemorizePipeline pipeline(mona_lisa_mock(), PromptSet::defaults());
    pipeline.memorize(graph, kMonaLisaText);
    return graph;
}

// --- random graphs -------------------------------------------------------

struct RandomGraphOptions {
    int max_objects = 20;
    int max_simple = 30;
    int max_theses = 6;
    int max_episodes = 4;
};

inline KnowledgeGraph random_graph(std::uint64_t seed,
                                   const RandomGraphOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    auto provider = std::make_shared<HashedBagEmbedder>(64);
    KnowledgeGraph g(provider);

    std::uniform_int_distribution<int> obj_count(2, opt.max_objects);
    const int n_obj = obj_count(rng);
    std::vector<NodeId> objects;
    for (int i = 0; i < n_obj; ++i)
        objects.push_back(
            g.upsert_object("obj" + std::to_string(i) + " tok" + std::to_string(i % 7)));

    std::uniform_int_distribution<int> edge_count(0, opt.max_simple);
    std::uniform_int_distribution<std::size_t> pick_obj(0, objects.size() - 1);
    const int n_edges = edge_count(rng);
    for (int i = 0; i < n_edges; ++i) {
        const Node& a = g.node(objects[pick_obj(rng)]);
        const Node& b = g.node(objects[pick_obj(rng)]);
        g.add_simple_relation({a.content, "rel" + std::to_string(i % 5), b.content});
    }

    std::uniform_int_distribution<int> thesis_count(0, opt.max_theses);
    const int n_theses = thesis_count(rng);
    std::vector<NodeId> theses;
    for (int i = 0; i < n_theses; ++i) {
        std::uniform_int_distribution<int> ent_count(0, 4);
        std::vector<std::string> entities;
        std::string statement = "statement " + std::to_string(i);
        const int k = ent_count(rng);
        for (int j = 0; j < k; ++j) {
            const Node& n = g.node(objects[pick_obj(rng)]);
            entities.push_back(n.content);
            statement += " " + n.content;
        }
        theses.push_back(g.add_thesis(statement, entities));
    }

    std::uniform_int_distribution<int> episode_count(0, opt.max_episodes);
    const int n_episodes = episode_count(rng);
    for (int i = 0; i < n_episodes; ++i) {
        std::vector<NodeId> members;
        std::uniform_int_distribution<int> mem_count(0, 5);
        const int k = mem_count(rng);
        for (int j = 0; j < k; ++j) {
            if (!theses.empty() && rng() % 3 == 0)
                members.push_back(theses[rng() % theses.size()]);
            else
                members.push_back(objects[pick_obj(rng)]);
        }
        g.add_episode("episode " + std::to_string(i) + " seed " + std::to_string(seed),
                      members);
    }
    return g;
}

// --- independent oracles --------------------------------------------------

inline bool oracle_visible(const KnowledgeGraph& g, NodeRestriction r, NodeId id) {
    NodeKind k = g.node(id).kind;
    if (r == NodeRestriction::NoEpisodic && k == NodeKind::Episodic) return false;
    if (r == NodeRestriction::NoThesis && k == NodeKind::Thesis) return false;
    if (r == NodeRestriction::NoObject && k == NodeKind::Object) return false;
    return true;
}

// Plain BFS over the raw edge list, restriction applied inline.
inline std::map<NodeId, int> oracle_bfs(const KnowledgeGraph& g, NodeRestriction r,
                                        NodeId from) {
    std::map<NodeId, int> dist;
    if (!oracle_visible(g, r, from)) return dist;
    dist[from] = 0;
    std::deque<NodeId> q{from};
    while (!q.empty()) {
        NodeId cur = q.front();
        q.pop_front();
        for (const auto& [eid, e] : g.edges()) {
            NodeId other;
            if (e.a == cur)
                other = e.b;
            else if (e.b == cur)
                other = e.a;
            else
                continue;
            if (!oracle_visible(g, r, other)) continue;
            if (!dist.count(other)) {
                dist[other] = dist[cur] + 1;
                q.push_back(other);
            }
        }
    }
    return dist;
}

// Exhaustive two-source-meeting oracle for the WaterCircles primary list:
// claims nodes by nearest entity (ties by entity order), finds region-
// crossing edges, then enumerates every shortest in-region path by DFS.
inline std::set<EdgeId> oracle_wc_primary(const KnowledgeGraph& g, NodeRestriction r,
                                          const std::vector<NodeId>& entity_nodes) {
    std::vector<NodeId> entities;
    std::set<NodeId> ent_seen;
    for (NodeId e : entity_nodes)
        if (oracle_visible(g, r, e) && ent_seen.insert(e).second) entities.push_back(e);
    if (entities.empty()) return {};

    std::map<NodeId, std::pair<std::size_t, int>> claim;  // node -> (entity idx, dist)
    for (std::size_t i = 0; i < entities.size(); ++i) {
        for (const auto& [node, d] : oracle_bfs(g, r, entities[i])) {
            auto it = claim.find(node);
            if (it == claim.end() || d < it->second.second) claim[node] = {i, d};
        }
    }

    std::set<EdgeId> primary;
    std::set<NodeId> descended;
    // All shortest same-claim descents from `node` to its entity.
    auto descend = [&](auto&& self, NodeId node) -> void {
        if (!descended.insert(node).second) return;
        auto [entity, d] = claim.at(node);
        if (d == 0) return;
        for (const auto& [eid, e] : g.edges()) {
            NodeId other;
            if (e.a == node)
                other = e.b;
            else if (e.b == node)
                other = e.a;
            else
                continue;
            if (!oracle_visible(g, r, e.a) || !oracle_visible(g, r, e.b)) continue;
            auto it = claim.find(other);
            if (it == claim.end()) continue;
            if (it->second.first == entity && it->second.second == d - 1) {
                primary.insert(eid);
                self(self, other);
            }
        }
    };

    for (const auto& [eid, e] : g.edges()) {
        if (!oracle_visible(g, r, e.a) || !oracle_visible(g, r, e.b)) continue;
        auto ca = claim.find(e.a);
        auto cb = claim.find(e.b);
        if (ca == claim.end() || cb == claim.end()) continue;
        if (ca->second.first == cb->second.first) continue;
        primary.insert(eid);
        descend(descend, e.a);
        descend(descend, e.b);
    }
    return primary;
}

inline std::vector<std::string> canonical_strings(const RetrievedTriplets& r) {
    std::vector<std::string> out;
    out.reserve(r.items.size());
    for (const auto& item : r.items) out.push_back(canonical(item.triplet));
    return out;
}

inline std::vector<NodeId> object_ids(const KnowledgeGraph& g) {
    std::vector<NodeId> out;
    for (const auto& [id, n] : g.nodes())
        if (n.kind == NodeKind::Object) out.push_back(id);
    return out;
}

}  // namespace graphmem::testsupport
