#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graphmem/errors.hpp"
#include "graphmem/graph.hpp"
#include "test_support.hpp"

using namespace graphmem;
using namespace graphmem::testsupport;

namespace {

std::shared_ptr<const EmbeddingProvider> test_embedder() {
    return std::make_shared<HashedBagEmbedder>(64);
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// Recomputes every stats mean by a full scan over the raw node/edge maps.
GraphStats scan_stats(const KnowledgeGraph& g) {
    GraphStats s;
    std::map<NodeId, int> obj_nebrs, epi_obj, epi_thesis, thesis_obj;
    for (const auto& [id, n] : g.nodes()) {
        if (n.kind == NodeKind::Object) ++s.object_nodes;
        if (n.kind == NodeKind::Thesis) ++s.thesis_nodes;
        if (n.kind == NodeKind::Episodic) ++s.episodic_nodes;
    }
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::Simple) {
            ++s.simple_edges;
            obj_nebrs[e.a] += 1;
            obj_nebrs[e.b] += 1;
        } else if (e.kind == EdgeKind::Hyper) {
            ++s.hyper_edges;
            thesis_obj[e.a] += 1;
        } else {
            ++s.episodic_links;
            if (g.node(e.b).kind == NodeKind::Object)
                epi_obj[e.a] += 1;
            else
                epi_thesis[e.a] += 1;
        }
    }
    auto mean_over = [](const std::map<NodeId, int>& counts, std::uint64_t hubs) {
        if (hubs == 0) return 0.0;
        double sum = 0;
        for (const auto& [id, c] : counts) sum += c;
        return sum / static_cast<double>(hubs);
    };
    s.mean_object_per_episodic = mean_over(epi_obj, s.episodic_nodes);
    s.mean_thesis_per_episodic = mean_over(epi_thesis, s.episodic_nodes);
    s.mean_object_per_thesis = mean_over(thesis_obj, s.thesis_nodes);
    s.mean_object_per_object = mean_over(obj_nebrs, s.object_nodes);
    return s;
}

}  // namespace

TEST_CASE("upsert_object normalizes labels to one identity") {
    KnowledgeGraph g(test_embedder());
    NodeId a = g.upsert_object("Mona Lisa");
    CHECK(g.stats().object_nodes == 1);
    NodeId b = g.upsert_object("mona lisa ");
    CHECK(a == b);
    CHECK(g.stats().object_nodes == 1);
    CHECK(g.node(a).content == "Mona Lisa");  // first-seen casing kept
}

TEST_CASE("upsert_object rejects empty labels") {
    KnowledgeGraph g(test_embedder());
    CHECK_THROWS_AS(g.upsert_object("   "), Error);
    try {
        g.upsert_object("");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyLabel);
    }
}

TEST_CASE("the four Mona Lisa triplets yield five distinct objects") {
    KnowledgeGraph g(test_embedder());
    g.add_simple_relation({"Mona Lisa", "is a", "oil painting"});
    g.add_simple_relation({"Mona Lisa", "painted on", "poplar wood"});
    g.add_simple_relation({"Mona Lisa", "creator", "Leonardo da Vinci"});
    g.add_simple_relation({"Mona Lisa", "inception", "1503-1519"});
    CHECK(g.stats().object_nodes == 5);
    CHECK(g.stats().simple_edges == 4);
}

TEST_CASE("add_simple_relation is idempotent") {
    KnowledgeGraph g(test_embedder());
    EdgeId e1 = g.add_simple_relation({"Mona Lisa", "creator", "Leonardo da Vinci"});
    auto before = g.stats();
    EdgeId e2 = g.add_simple_relation({"Mona Lisa", "creator", "Leonardo da Vinci"});
    CHECK(e1 == e2);
    CHECK(g.stats() == before);
    CHECK_THROWS_AS(g.add_simple_relation({"a", "", "b"}), Error);
}

TEST_CASE("self-loop simple edges are accepted") {
    KnowledgeGraph g(test_embedder());
    NodeId a = g.upsert_object("A");
    g.add_simple_relation({"A", "r", "A"});
    CHECK(g.stats().object_nodes == 1);
    CHECK(g.stats().simple_edges == 1);
    // Adjacency enumeration: the loop is incident to its node exactly once.
    CHECK(g.incident(a).size() == 1);
    const Edge& e = g.edge(g.incident(a)[0]);
    CHECK(e.a == a);
    CHECK(e.b == a);
}

TEST_CASE("add_thesis links each distinct entity once") {
    KnowledgeGraph g(test_embedder());
    g.add_thesis("Mona Lisa was painted by Leonardo da Vinci between 1503 and 1519",
                 {"Mona Lisa", "Leonardo da Vinci", "1503-1519"});
    CHECK(g.stats().thesis_nodes == 1);
    CHECK(g.stats().hyper_edges == 3);

    SUBCASE("no entities") {
        g.add_thesis("X holds", {});
        CHECK(g.stats().thesis_nodes == 2);
        CHECK(g.stats().hyper_edges == 3);
    }
    SUBCASE("duplicate entity in list") {
        g.add_thesis("Y holds", {"Mona Lisa", "mona lisa"});
        CHECK(g.stats().hyper_edges == 4);
    }
    SUBCASE("empty statement") {
        CHECK_THROWS_AS(g.add_thesis("  ", {"A"}), Error);
    }
}

TEST_CASE("add_episode validates members") {
    KnowledgeGraph g(test_embedder());
    NodeId obj = g.upsert_object("A");
    NodeId thesis = g.add_thesis("A exists", {"A"});
    NodeId ep = g.add_episode("first text", {obj, thesis, obj});
    CHECK(g.stats().episodic_nodes == 1);
    CHECK(g.stats().episodic_links == 2);  // member dedup

    SUBCASE("empty member list") {
        g.add_episode("second text", {});
        CHECK(g.stats().episodic_nodes == 2);
        CHECK(g.stats().episodic_links == 2);
    }
    SUBCASE("episodic member is rejected") {
        CHECK_THROWS_AS(g.add_episode("third", {ep}), Error);
        try {
            g.add_episode("third", {ep});
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MemberKindViolation);
        }
    }
    SUBCASE("unknown member") {
        try {
            g.add_episode("third", {NodeId{99999}});
            FAIL("expected UnknownMember");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownMember);
        }
    }
}

TEST_CASE("remove_knowledge cascades thesis removal") {
    KnowledgeGraph g(test_embedder());
    NodeId thesis = g.add_thesis("statement", {"A", "B", "C"});
    g.add_episode("text", {thesis, g.upsert_object("A")});
    auto before = g.stats();
    RemovalReport report = g.remove_knowledge({thesis.value});
    auto after = g.stats();
    CHECK(report.thesis_nodes_removed == 1);
    CHECK(report.hyper_edges_removed == 3);
    CHECK(report.episodic_links_removed == 1);
    CHECK(after.thesis_nodes == before.thesis_nodes - 1);
    CHECK(after.hyper_edges == before.hyper_edges - 3);
    CHECK(after.object_nodes == before.object_nodes);  // orphans stay
}

TEST_CASE("remove_knowledge rejects unknown ids and keeps simple-edge endpoints") {
    KnowledgeGraph g(test_embedder());
    EdgeId e = g.add_simple_relation({"A", "r", "B"});
    CHECK_THROWS_AS(g.remove_knowledge({424242}), Error);
    RemovalReport report = g.remove_knowledge({e.value});
    CHECK(report.simple_edges_removed == 1);
    CHECK(g.stats().object_nodes == 2);
    CHECK(g.stats().simple_edges == 0);
}

TEST_CASE("neighborhood matches an exhaustive adjacency scan") {
    KnowledgeGraph g = build_mona_lisa_graph();
    NodeId ml = *g.find_object("Mona Lisa");

    Neighborhood hood = g.neighborhood({ml}, all_node_kinds(), 1);

    // Oracle: every edge incident to Mona Lisa by raw scan.
    std::set<EdgeId> incident_to_ml;
    for (const auto& [eid, e] : g.edges())
        if (e.a == ml || e.b == ml) incident_to_ml.insert(eid);
    std::set<EdgeId> got(hood.edges.begin(), hood.edges.end());
    for (EdgeId eid : incident_to_ml) CHECK(got.count(eid) == 1);

    int simple = 0, hyper = 0, episodic = 0;
    for (EdgeId eid : incident_to_ml) {
        switch (g.edge(eid).kind) {
            case EdgeKind::Simple: ++simple; break;
            case EdgeKind::Hyper: ++hyper; break;
            case EdgeKind::EpisodicLink: ++episodic; break;
        }
    }
    CHECK(simple == 4);
    CHECK(hyper == 3);
    CHECK(episodic == 1);

    SUBCASE("excluding episodic kinds removes episodic nodes and links") {
        Neighborhood filtered =
            g.neighborhood({ml}, {NodeKind::Object, NodeKind::Thesis}, 2);
        for (NodeId n : filtered.nodes) CHECK(g.node(n).kind != NodeKind::Episodic);
        for (EdgeId eid : filtered.edges)
            CHECK(g.edge(eid).kind != EdgeKind::EpisodicLink);
    }
    SUBCASE("no seeds, no result") {
        Neighborhood empty = g.neighborhood({}, all_node_kinds(), 1);
        CHECK(empty.nodes.empty());
        CHECK(empty.edges.empty());
    }
    SUBCASE("unknown seed") {
        CHECK_THROWS_AS(g.neighborhood({NodeId{999999}}, all_node_kinds(), 1), Error);
    }
}

TEST_CASE("stats: empty graph is all zeros") {
    KnowledgeGraph g(test_embedder());
    GraphStats s = g.stats();
    CHECK(s.object_nodes == 0);
    CHECK(s.episodic_links == 0);
    CHECK(s.mean_object_per_object == 0.0);
}

TEST_CASE("stats: Mona Lisa graph matches the canonical counts") {
    KnowledgeGraph g = build_mona_lisa_graph();
    GraphStats s = g.stats();
    CHECK(s.object_nodes == 5);
    CHECK(s.thesis_nodes == 3);
    CHECK(s.episodic_nodes == 1);
    CHECK(s.simple_edges == 4);
    CHECK(s.hyper_edges == 6);
    CHECK(s.episodic_links == 8);
}

TEST_CASE("stats means equal a full-scan recomputation") {
    for (std::uint64_t seed : {1ULL, 7ULL, 42ULL, 1234ULL}) {
        KnowledgeGraph g = random_graph(seed);
        GraphStats s = g.stats();
        GraphStats o = scan_stats(g);
        CHECK(s.mean_object_per_episodic == o.mean_object_per_episodic);
        CHECK(s.mean_thesis_per_episodic == o.mean_thesis_per_episodic);
        CHECK(s.mean_object_per_thesis == o.mean_object_per_thesis);
        CHECK(s.mean_object_per_object == o.mean_object_per_object);
    }
}

TEST_CASE("edge-kind typing holds after arbitrary mutation sequences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        KnowledgeGraph g = random_graph(seed);
        // Remove a few theses to exercise cascades.
        std::vector<std::uint64_t> theses;
        for (const auto& [id, n] : g.nodes())
            if (n.kind == NodeKind::Thesis && theses.size() < 2) theses.push_back(id.value);
        if (!theses.empty()) g.remove_knowledge(theses);

        for (const auto& [eid, e] : g.edges()) {
            switch (e.kind) {
                case EdgeKind::Simple:
                    CHECK(g.node(e.a).kind == NodeKind::Object);
                    CHECK(g.node(e.b).kind == NodeKind::Object);
                    break;
                case EdgeKind::Hyper:
                    CHECK(g.node(e.a).kind == NodeKind::Thesis);
                    CHECK(g.node(e.b).kind == NodeKind::Object);
                    break;
                case EdgeKind::EpisodicLink:
                    CHECK(g.node(e.a).kind == NodeKind::Episodic);
                    CHECK(g.node(e.b).kind != NodeKind::Episodic);
                    break;
            }
        }
    }
}

TEST_CASE("save/load round-trips stats and triplet strings") {
    const std::string path = temp_path("graphmem_roundtrip_test.gm");

    SUBCASE("empty graph") {
        KnowledgeGraph g(test_embedder());
        g.save(path);
        KnowledgeGraph loaded = KnowledgeGraph::load(path, test_embedder());
        CHECK(loaded.stats() == g.stats());
    }
    SUBCASE("Mona Lisa graph") {
        KnowledgeGraph g = build_mona_lisa_graph();
        g.save(path);
        KnowledgeGraph loaded = KnowledgeGraph::load(path, g.embedder_ptr());
        CHECK(loaded.stats() == g.stats());
        for (const auto& [eid, e] : g.edges()) {
            REQUIRE(loaded.has_edge(eid));
            CHECK(canonical(loaded.edge_triplet(loaded.edge(eid))) ==
                  canonical(g.edge_triplet(e)));
        }
        for (const auto& [nid, n] : g.nodes()) {
            REQUIRE(loaded.has_node(nid));
            CHECK(loaded.node(nid).content == n.content);
            CHECK(loaded.node(nid).embedding == n.embedding);
        }
    }
    SUBCASE("ids are not reused after load") {
        KnowledgeGraph g(test_embedder());
        NodeId thesis = g.add_thesis("t", {"A"});
        g.remove_knowledge({thesis.value});
        g.save(path);
        KnowledgeGraph loaded = KnowledgeGraph::load(path, test_embedder());
        NodeId fresh = loaded.upsert_object("B");
        CHECK(fresh.value > thesis.value);
    }
    std::remove(path.c_str());
}

TEST_CASE("load rejects truncated and malformed files") {
    const std::string path = temp_path("graphmem_truncated_test.gm");
    KnowledgeGraph g = build_mona_lisa_graph();
    g.save(path);

    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();

    SUBCASE("truncated file") {
        std::ofstream out(path, std::ios::trunc);
        out << content.substr(0, content.size() / 2);
        out.close();
        try {
            KnowledgeGraph::load(path, test_embedder());
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::FormatError);
            CHECK(std::string(e.what()).find("line") != std::string::npos);
        }
    }
    SUBCASE("bad header") {
        std::ofstream out(path, std::ios::trunc);
        out << "not-a-graph\n";
        out.close();
        CHECK_THROWS_AS(KnowledgeGraph::load(path, test_embedder()), Error);
    }
    SUBCASE("missing file") {
        try {
            KnowledgeGraph::load(temp_path("graphmem_does_not_exist.gm"), test_embedder());
            FAIL("expected IoError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::IoError);
        }
    }
    std::remove(path.c_str());
}
