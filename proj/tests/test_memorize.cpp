#include <doctest.h>

#include <algorithm>

#include "graphmem/errors.hpp"
#include "graphmem/memorize.hpp"
#include "test_support.hpp"

using namespace graphmem;
using namespace graphmem::testsupport;

TEST_CASE("triplet responses parse, dedup and tolerate prose") {
    auto got = parse_triplet_response(
        "Sure, here are the facts:\n"
        "```\n"
        "(Mona Lisa | is a | oil painting)\n"
        "(Mona Lisa | is a | oil painting)\n"
        "some stray commentary line\n"
        "(Mona Lisa | creator | Leonardo da Vinci)\n"
        "```\n"
        "Hope that helps!");
    REQUIRE(got.size() == 2);
    CHECK(got[0] == Triplet{"Mona Lisa", "is a", "oil painting"});
    CHECK(got[1] == Triplet{"Mona Lisa", "creator", "Leonardo da Vinci"});

    SUBCASE("empty marker") {
        CHECK(parse_triplet_response("```\nEMPTY\n```").empty());
        CHECK(parse_triplet_response("```\n\n```").empty());
    }
    SUBCASE("prose without a block") {
        CHECK_THROWS_AS(parse_triplet_response("no facts here, sorry"), Error);
    }
    SUBCASE("block with only noise") {
        CHECK_THROWS_AS(parse_triplet_response("```\njust chatter\n```"), Error);
    }
    SUBCASE("empty fields dropped") {
        CHECK_THROWS_AS(parse_triplet_response("```\n(a || b)\n```"), Error);
    }
}

TEST_CASE("the paper passage parses into the four triplets") {
    auto got = parse_triplet_response(kMonaLisaTripletResponse);
    REQUIRE(got.size() == 4);
    CHECK(got[0] == Triplet{"Mona Lisa", "is a", "oil painting"});
    CHECK(got[1] == Triplet{"Mona Lisa", "painted on", "poplar wood"});
    CHECK(got[2] == Triplet{"Mona Lisa", "creator", "Leonardo da Vinci"});
    CHECK(got[3] == Triplet{"Mona Lisa", "inception", "1503-1519"});
}

TEST_CASE("thesis responses parse with entity lists") {
    auto got = parse_thesis_response(
        "```\n"
        "Mona Lisa is an oil painting :: [Mona Lisa; oil painting]\n"
        "Mona Lisa was painted on poplar wood :: [Mona Lisa; poplar wood]\n"
        "Mona Lisa was painted by Leonardo da Vinci between 1503 and 1519 :: "
        "[Mona Lisa; Leonardo da Vinci; 1503-1519]\n"
        "```");
    REQUIRE(got.size() == 3);
    CHECK(got[0].entities == std::vector<std::string>{"Mona Lisa", "oil painting"});
    CHECK(got[1].entities == std::vector<std::string>{"Mona Lisa", "poplar wood"});
    CHECK(got[2].entities ==
          std::vector<std::string>{"Mona Lisa", "Leonardo da Vinci", "1503-1519"});

    SUBCASE("empty statements dropped, duplicates deduped, containment not required") {
        auto mixed = parse_thesis_response(
            "```\n"
            " :: [ghost]\n"
            "Valid statement :: [A; a; B]\n"
            "No entity list\n"
            "Unrelated entities kept :: [Zanzibar]\n"
            "```");
        REQUIRE(mixed.size() == 3);
        CHECK(mixed[0].statement == "Valid statement");
        CHECK(mixed[0].entities == std::vector<std::string>{"A", "B"});
        CHECK(mixed[1].entities.empty());
        CHECK(mixed[2].entities == std::vector<std::string>{"Zanzibar"});
    }
}

TEST_CASE("memorize builds the canonical Mona Lisa graph") {
    auto provider = std::make_shared<HashedBagEmbedder>(256);
    KnowledgeGraph graph(provider);
    MemorizePipeline pipeline(mona_lisa_mock(), PromptSet::defaults());

    MemorizeReport report = pipeline.memorize(graph, kMonaLisaText);
    CHECK(report.triplets_added == 4);
    CHECK(report.theses_added == 3);
    CHECK(report.objects_added == 5);
    CHECK(report.parse_errors == 0);
    CHECK(report.episodic_id.has_value());

    GraphStats s = graph.stats();
    CHECK(s.object_nodes == 5);
    CHECK(s.thesis_nodes == 3);
    CHECK(s.episodic_nodes == 1);
    CHECK(s.simple_edges == 4);
    CHECK(s.hyper_edges == 6);
    CHECK(s.episodic_links == 8);
    CHECK(s.stored_contexts == 1);

    SUBCASE("second pass keeps the entity layer, appends an episode") {
        MemorizeReport second = pipeline.memorize(graph, kMonaLisaText);
        CHECK(second.objects_added == 0);
        CHECK(second.triplets_added == 0);
        GraphStats after = graph.stats();
        CHECK(after.simple_edges == 4);
        CHECK(after.episodic_nodes == 2);
        CHECK(after.object_nodes == 5);
    }
}

TEST_CASE("parse failures are counted, not fatal") {
    auto mock = std::make_shared<MockLlmClient>();
    mock->add_rule("Extract triplets", "I could not find anything structured.");
    mock->add_rule("Extract thesis statements", "```\nOnly thesis works :: [A]\n```");
    auto provider = std::make_shared<HashedBagEmbedder>(64);
    KnowledgeGraph graph(provider);
    MemorizePipeline pipeline(mock, PromptSet::defaults());

    MemorizeReport report = pipeline.memorize(graph, "some text");
    CHECK(report.parse_errors == 1);
    CHECK(report.theses_added == 1);
    CHECK(report.episodic_id.has_value());
    CHECK(graph.stats().parse_errors == 1);

    SUBCASE("both extractions failing skips the episode") {
        auto bad = std::make_shared<MockLlmClient>();
        bad->add_rule("Extract triplets", "prose");
        bad->add_rule("Extract thesis statements", "more prose");
        KnowledgeGraph g2(provider);
        MemorizePipeline p2(bad, PromptSet::defaults());
        MemorizeReport r2 = p2.memorize(g2, "whatever");
        CHECK(r2.parse_errors == 2);
        CHECK_FALSE(r2.episodic_id.has_value());
        CHECK(g2.stats().episodic_nodes == 0);
        CHECK(g2.stats().stored_contexts == 1);
    }
}

TEST_CASE("find_outdated returns only candidate-set ids") {
    auto provider = std::make_shared<HashedBagEmbedder>(64);
    KnowledgeGraph graph(provider);
    EdgeId paris = graph.add_simple_relation({"X", "lives in", "Paris"});
    graph.add_simple_relation({"Y", "works at", "Acme"});

    auto mock = std::make_shared<MockLlmClient>();
    mock->add_rule("Stored triplets", "```\n(X | lives in | Paris)\n```");
    MemorizePipeline pipeline(mock, PromptSet::defaults());

    std::vector<Triplet> new_triplets{{"X", "lives in", "Rome"}};
    auto outdated = pipeline.find_outdated(new_triplets, {}, graph);
    REQUIRE(outdated.size() == 1);
    CHECK(outdated[0] == paris.value);

    SUBCASE("echo outside the neighborhood is filtered") {
        auto rogue = std::make_shared<MockLlmClient>();
        rogue->add_rule("Stored triplets",
                        "```\n(Y | works at | Acme)\n(X | lives in | Paris)\n```");
        MemorizePipeline p2(rogue, PromptSet::defaults());
        // Y/Acme are not in X's or Rome's neighborhood, so only the Paris
        // edge qualifies.
        auto got = p2.find_outdated(new_triplets, {}, graph);
        REQUIRE(got.size() == 1);
        CHECK(got[0] == paris.value);
    }
    SUBCASE("parse failure means nothing outdated") {
        auto silent = std::make_shared<MockLlmClient>();
        silent->add_rule("Stored triplets", "shrug");
        MemorizePipeline p3(silent, PromptSet::defaults());
        std::uint64_t errors = 0;
        CHECK(p3.find_outdated(new_triplets, {}, graph, &errors).empty());
        CHECK(errors == 1);
    }
    SUBCASE("empty graph yields nothing") {
        KnowledgeGraph empty(provider);
        CHECK(pipeline.find_outdated(new_triplets, {}, empty).empty());
    }
}

TEST_CASE("contradiction replacement keeps only the new fact") {
    auto provider = std::make_shared<HashedBagEmbedder>(64);
    KnowledgeGraph graph(provider);

    auto mock1 = std::make_shared<MockLlmClient>();
    mock1->add_rule("Extract triplets", "```\n(X | lives in | Paris)\n```");
    mock1->add_rule("Extract thesis statements", "```\nEMPTY\n```");
    mock1->add_rule("Stored triplets", "```\nEMPTY\n```");
    MemorizePipeline(mock1, PromptSet::defaults()).memorize(graph, "X lives in Paris");

    auto mock2 = std::make_shared<MockLlmClient>();
    mock2->add_rule("Extract triplets", "```\n(X | lives in | Rome)\n```");
    mock2->add_rule("Extract thesis statements", "```\nEMPTY\n```");
    mock2->add_rule("Stored triplets", "```\n(X | lives in | Paris)\n```");
    MemorizeReport report =
        MemorizePipeline(mock2, PromptSet::defaults()).memorize(graph, "X lives in Rome");

    CHECK(report.edges_removed == 1);
    // Final graph scan: Rome is the only simple edge left.
    std::vector<std::string> simple;
    for (const auto& [eid, e] : graph.edges())
        if (e.kind == EdgeKind::Simple) simple.push_back(canonical(graph.edge_triplet(e)));
    REQUIRE(simple.size() == 1);
    CHECK(simple[0] == "(X, lives in, Rome)");
}

TEST_CASE("referential integrity after memorize sequences") {
    auto provider = std::make_shared<HashedBagEmbedder>(64);
    KnowledgeGraph graph(provider);
    MemorizePipeline pipeline(mona_lisa_mock(), PromptSet::defaults());
    pipeline.memorize(graph, kMonaLisaText);
    pipeline.memorize(graph, kMonaLisaText);

    for (const auto& [eid, e] : graph.edges()) {
        CHECK(graph.has_node(e.a));
        CHECK(graph.has_node(e.b));
    }
}
