#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "support.hpp"

using namespace pcr;

namespace {

constexpr const char* kMinimalDoc = R"({
  "dimension": 3,
  "nodes": [
    {"id": "a", "text": "first node", "embedding": [1, 0, 0]},
    {"id": "b", "text": "second node", "embedding": [0, 1, 0]}
  ],
  "edges": [{"src": "a", "dst": "b", "relation": "links"}]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

TEST(LoadGraph, MinimalDocument) {
    const auto g = load_graph(kMinimalDoc);
    EXPECT_EQ(g.size(), 2u);
    EXPECT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.dimension(), 3u);
    EXPECT_EQ(g.edges()[0].relation, std::optional<std::string>("links"));
}

TEST(LoadGraph, StreamOverloadMatchesString) {
    std::istringstream in(kMinimalDoc);
    EXPECT_EQ(load_graph(in).nodes()[1].text, "second node");
}

TEST(LoadGraph, DanglingEndpointNamesNode) {
    const std::string doc = replace(kMinimalDoc, R"("dst": "b")", R"("dst": "x9")");
    try {
        load_graph(doc);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.element(), "x9");
        EXPECT_NE(std::string(e.what()).find("x9"), std::string::npos);
    }
}

TEST(LoadGraph, DuplicateIdRejected) {
    const std::string doc = replace(kMinimalDoc, R"("id": "b")", R"("id": "a")");
    try {
        load_graph(doc);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.element(), "a");
    }
}

TEST(LoadGraph, DimensionMismatchRejected) {
    const std::string doc = replace(kMinimalDoc, "[0, 1, 0]", "[0, 1]");
    try {
        load_graph(doc);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.element(), "b");
    }
}

TEST(LoadGraph, MalformedJsonCarriesOffset) {
    const std::string doc = R"({"dimension": 3, "nodes": [ )";
    try {
        load_graph(doc);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_GT(e.offset(), 0u);
        EXPECT_LE(e.offset(), doc.size() + 1);
    }
}

TEST(LoadGraph, StructuralProblemsRejected) {
    EXPECT_THROW(load_graph(R"({"nodes": [], "edges": []})"), ValidationError);
    EXPECT_THROW(load_graph(R"({"dimension": 0, "nodes": [], "edges": []})"), ValidationError);
    EXPECT_THROW(load_graph(R"({"dimension": 2, "nodes": {}, "edges": []})"), ValidationError);
    EXPECT_THROW(load_graph(R"({"dimension": 1, "nodes": [{"id": "", "text": "t", "embedding": [1]}], "edges": []})"),
                 ValidationError);
    EXPECT_THROW(load_graph(R"({"dimension": 1, "nodes": [{"id": "a", "text": "", "embedding": [1]}], "edges": []})"),
                 ValidationError);
    EXPECT_THROW(
        load_graph(R"({"dimension": 1, "nodes": [{"id": "a", "text": "t", "embedding": ["x"]}], "edges": []})"),
        ValidationError);
}

TEST(LoadGraph, NonFiniteEmbeddingRejected) {
    std::vector<Node> nodes{{NodeId("a"), "t", {std::nan("")}}};
    EXPECT_THROW(KnowledgeGraph::build(1, nodes, {}), ValidationError);
}

TEST(LoadGraph, JsonRoundTrip) {
    oracle::Rng rng(5);
    const auto g = oracle::random_graph(rng, 25, 40, 6);
    const auto back = load_graph(graph_to_json(g).dump());
    EXPECT_EQ(back.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(back.node(i), g.node(i));
    }
    ASSERT_EQ(back.edges().size(), g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        EXPECT_EQ(back.edges()[e], g.edges()[e]);
    }
}

TEST(LoadGraph, GeneratedTechDomainHasThirtyNodesSixtyEdges) {
    const auto& tech = fixture::reference_dataset().domain("tech");
    const auto g = load_graph(graph_to_json(tech.graph).dump(1));
    EXPECT_EQ(g.size(), 30u);
    EXPECT_EQ(g.edges().size(), 60u);
}

TEST(Reachability, ChainUnlimited) {
    const auto r = reachable_from(fixture::chain(), NodeId("a"));
    const std::map<NodeId, unsigned> expected{{NodeId("a"), 0}, {NodeId("b"), 1}, {NodeId("c"), 2}};
    EXPECT_EQ(r.distances(), expected);
}

TEST(Reachability, ChainDepthOne) {
    const auto r = reachable_from(fixture::chain(), NodeId("a"), 1u);
    const std::map<NodeId, unsigned> expected{{NodeId("a"), 0}, {NodeId("b"), 1}};
    EXPECT_EQ(r.distances(), expected);
}

TEST(Reachability, IsolatedAnchor) {
    const auto r = reachable_from(fixture::chain(), NodeId("c"));
    EXPECT_EQ(r.size(), 1u);
    EXPECT_EQ(r.distance(NodeId("c")), 0u);
}

TEST(Reachability, DirectionMatters) {
    const auto r = reachable_from(fixture::chain(), NodeId("b"));
    EXPECT_FALSE(r.contains(NodeId("a")));
    EXPECT_TRUE(r.contains(NodeId("c")));
}

TEST(Reachability, UnknownAnchor) {
    EXPECT_THROW(reachable_from(fixture::chain(), NodeId("zz")), NotFoundError);
}

TEST(Reachability, CyclesSelfLoopsAndParallelEdges) {
    const auto g = KnowledgeGraph::build(
        3, fixture::axis_nodes({{"a", "x"}, {"b", "y"}, {"c", "z"}}),
        fixture::edges({{"a", "a"}, {"a", "b"}, {"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "a"}}));
    const auto r = reachable_from(g, NodeId("a"));
    EXPECT_EQ(r.distance(NodeId("a")), 0u);
    EXPECT_EQ(r.distance(NodeId("b")), 1u);
    EXPECT_EQ(r.distance(NodeId("c")), 2u);
}

TEST(PathLength, Cases) {
    const auto r = reachable_from(fixture::chain(), NodeId("a"));
    EXPECT_EQ(path_length(r, NodeId("c")), 2u);
    EXPECT_EQ(path_length(r, NodeId("a")), 0u);
    const auto limited = reachable_from(fixture::chain(), NodeId("a"), 1u);
    EXPECT_EQ(path_length(limited, NodeId("c")), std::nullopt);
    EXPECT_EQ(path_length(r, NodeId("nope")), std::nullopt);
}

TEST(ReachabilityProperty, MatchesFloydWarshallOn30Node60EdgeGraphs) {
    oracle::Rng rng(30);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = oracle::random_graph(rng, 30, 60);
        const auto fw = oracle::floyd_warshall(g);
        for (const auto& n : g.nodes()) {
            std::map<NodeId, unsigned> expected;
            for (const auto& [to, d] : fw.at(n.id.value)) expected[NodeId(to)] = d;
            ASSERT_EQ(reachable_from(g, n.id).distances(), expected) << "trial " << trial << " anchor " << n.id.value;
        }
    }
}

TEST(ReachabilityProperty, MatchesFloydWarshallUpTo50Nodes) {
    oracle::Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        const auto g = oracle::random_graph(rng, n, rng.below(3 * n + 1));
        const auto fw = oracle::floyd_warshall(g);
        const auto& anchor = g.node(rng.below(n)).id;
        std::map<NodeId, unsigned> expected;
        for (const auto& [to, d] : fw.at(anchor.value)) expected[NodeId(to)] = d;
        ASSERT_EQ(reachable_from(g, anchor).distances(), expected) << "trial " << trial;
    }
}

TEST(ReachabilityProperty, DepthLimitIsFilterOfUnlimited) {
    oracle::Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        const auto g = oracle::random_graph(rng, n, rng.below(2 * n + 1));
        const auto& anchor = g.node(rng.below(n)).id;
        const auto full = reachable_from(g, anchor);
        for (unsigned d = 1; d <= 6; ++d) {
            std::map<NodeId, unsigned> filtered;
            for (const auto& [v, dist] : full.distances()) {
                if (dist <= d) filtered.emplace(v, dist);
            }
            ASSERT_EQ(reachable_from(g, anchor, d).distances(), filtered);
        }
    }
}

TEST(ReachabilityProperty, EveryEntryHasWitnessPath) {
    // Each node at distance d > 0 must have an edge from some node at
    // distance d - 1; by induction that spells out a path from the anchor.
    oracle::Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(15);
        const auto g = oracle::random_graph(rng, n, rng.below(3 * n + 1));
        const auto& anchor = g.node(rng.below(n)).id;
        const auto r = reachable_from(g, anchor);
        for (const auto& [v, d] : r.distances()) {
            if (d == 0) {
                ASSERT_EQ(v, anchor);
                continue;
            }
            bool witnessed = false;
            for (const auto& e : g.edges()) {
                witnessed = witnessed || (e.dst == v && r.distance(e.src) == d - 1);
            }
            ASSERT_TRUE(witnessed) << v.value;
        }
    }
}

TEST(ReachabilityProperty, LevelCountsMatchFrontierOracle) {
    oracle::Rng rng(34);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        const auto g = oracle::random_graph(rng, n, rng.below(2 * n + 1));
        const auto& anchor = g.node(rng.below(n)).id;
        for (std::optional<unsigned> d : {std::optional<unsigned>{}, std::optional<unsigned>{1u},
                                          std::optional<unsigned>{2u}, std::optional<unsigned>{4u}}) {
            ASSERT_EQ(reachable_from(g, anchor, d).size(), oracle::within_hops(g, anchor.value, d).size());
        }
    }
}
