#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

#include "graphmem/embedding.hpp"
#include "graphmem/errors.hpp"

using namespace graphmem;

TEST_CASE("embed is deterministic and unit-norm") {
    HashedBagEmbedder e(256);
    Vector a = e.embed("a");
    Vector b = e.embed("a");
    CHECK(a == b);
    CHECK(std::abs(l2_norm(a) - 1.0) < 1e-6);
    CHECK(std::abs(l2_norm(e.embed("some longer text with words")) - 1.0) < 1e-6);
    CHECK_THROWS_AS(e.embed("   "), Error);
}

TEST_CASE("token-disjoint strings are orthogonal") {
    HashedBagEmbedder e(256);
    Vector a = e.embed("aa bb");
    Vector b = e.embed("cc dd");
    // Direct computation: token buckets do not collide for these tokens, so
    // the supports are disjoint.
    double direct = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) direct += a[i] * b[i];
    CHECK(direct == 0.0);
    CHECK(inner_product(a, b) == 0.0);
    // Shared token implies positive similarity.
    CHECK(inner_product(e.embed("aa bb"), e.embed("aa dd")) > 0.0);
}

TEST_CASE("inner_product agrees with elementwise summation and checks dims") {
    HashedBagEmbedder e(128);
    std::mt19937_64 rng(99);
    for (int round = 0; round < 20; ++round) {
        Vector a = e.embed("t" + std::to_string(rng() % 1000));
        Vector b = e.embed("u" + std::to_string(rng() % 1000) + " v" +
                           std::to_string(rng() % 10));
        double direct = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) direct += a[i] * b[i];
        CHECK(inner_product(a, b) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(inner_product(e.embed("x"), e.embed("x")) == doctest::Approx(1.0));
    CHECK_THROWS_AS(inner_product(Vector{1.0}, Vector{1.0, 0.0}), Error);
}

TEST_CASE("top_n equals a full-sort oracle prefix") {
    HashedBagEmbedder e(64);
    std::mt19937_64 rng(7);
    std::vector<std::pair<std::string, Vector>> items;
    for (int i = 0; i < 100; ++i) {
        std::string id = "item" + std::to_string(i);
        items.emplace_back(id, e.embed("w" + std::to_string(rng() % 40) + " z" +
                                       std::to_string(rng() % 40)));
    }
    Vector query = e.embed("w3 z17");

    // Oracle: full stable sort by score.
    std::vector<std::pair<std::string, double>> oracle;
    for (const auto& [id, v] : items) oracle.emplace_back(id, inner_product(query, v));
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    auto got = top_n(query, items, 7);
    REQUIRE(got.size() == 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(got[i].first == oracle[i].first);
        CHECK(got[i].second == oracle[i].second);
    }

    SUBCASE("n = 0") { CHECK(top_n(query, items, 0).empty()); }
    SUBCASE("query vector itself ranks first") {
        items.emplace_back("self", query);
        auto with_self = top_n(query, items, 3);
        CHECK(with_self[0].first == "self");
    }
    SUBCASE("prefix property") {
        auto three = top_n(query, items, 3);
        auto nine = top_n(query, items, 9);
        for (int i = 0; i < 3; ++i) CHECK(three[i].first == nine[i].first);
    }
}

TEST_CASE("embedding cache persists across instances") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "graphmem_embcache_test.jsonl").string();
    std::remove(path.c_str());

    auto inner = std::make_shared<HashedBagEmbedder>(32);
    {
        CachingEmbedder cache(inner, path);
        Vector a = cache.embed("hello world");
        Vector b = cache.embed("hello world");
        CHECK(a == b);
        CHECK(cache.hits() == 1);
        CHECK(cache.misses() == 1);
        cache.flush();
    }
    {
        CachingEmbedder cache(inner, path);
        cache.embed("hello world");
        CHECK(cache.hits() == 1);
        CHECK(cache.misses() == 0);
    }
    std::remove(path.c_str());
}
