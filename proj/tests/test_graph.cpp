#include "apnsp/graph.hpp"
#include "apnsp/graph_io.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace apnsp;

TEST(Rng, Mt19937FirstDrawMatchesStandard) {
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    Engine eng;
    eng.discard(9999);
    EXPECT_EQ(eng(), 9981545732273789042ULL);
}

TEST(Rng, Uniform01InRangeAndStreamsDiffer) {
    Engine eng(42);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform01(eng);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    EXPECT_NE(stream_seed(1, "graph-gen"), stream_seed(1, "model-init"));
    EXPECT_NE(stream_seed(1, "graph-gen"), stream_seed(2, "graph-gen"));
    EXPECT_NE(stream_seed(1, "graph-gen", 0), stream_seed(1, "graph-gen", 1));
    EXPECT_EQ(stream_seed(7, "x", 3), stream_seed(7, "x", 3));
}

TEST(Rng, UniformIndexCoversRange) {
    Engine eng(3);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) ++hits[uniform_index(eng, 7)];
    for (int h : hits) EXPECT_GT(h, 800);
}

TEST(GraphParams, SideLength) {
    GraphParams p{50, 5.0, 1000.0, 0};
    EXPECT_DOUBLE_EQ(p.side_length(), std::sqrt(50.0 * 1e6 / 5.0));
    EXPECT_NEAR(p.side_length(), 3162.2776601683795, 1e-9);
}

TEST(GraphParams, RejectsBadValues) {
    EXPECT_THROW((GraphParams{1, 5, 1000, 0}.validate()), ParameterError);
    EXPECT_THROW((GraphParams{10, 0, 1000, 0}.validate()), ParameterError);
    EXPECT_THROW((GraphParams{10, -1, 1000, 0}.validate()), ParameterError);
    EXPECT_THROW((GraphParams{10, 5, 0, 0}.validate()), ParameterError);
    EXPECT_THROW((GraphParams{10, 5, NAN, 0}.validate()), ParameterError);
}

TEST(Graph, EdgesAreExactlyPairsWithinRadius) {
    const Graph g = generate_graph({60, 3.0, 1000.0, 11});
    for (NodeId v = 0; v < g.size(); ++v)
        for (NodeId u = 0; u < g.size(); ++u) {
            if (u == v) continue;
            const double d = distance(g.coord(v), g.coord(u));
            EXPECT_EQ(g.adjacent(v, u), d <= 1000.0);
            if (d <= 1000.0) {
                EXPECT_EQ(g.weight(v, u), d);
            }
        }
}

TEST(Graph, BoundaryDistanceIsAnEdge) {
    const Graph g = fixtures::graph_from_points({{0, 0}, {1000, 0}, {2000.5, 0}});
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_FALSE(g.adjacent(1, 2));
    EXPECT_DOUBLE_EQ(g.weight(0, 1), 1000.0);
    EXPECT_THROW(g.weight(1, 2), ParameterError);
    EXPECT_FALSE(is_connected(g));
}

TEST(Graph, NeighborsSortedAndSymmetric) {
    const Graph g = generate_graph({40, 5.0, 1000.0, 5});
    for (NodeId v = 0; v < g.size(); ++v) {
        const auto& nb = g.neighbors(v);
        for (std::size_t i = 1; i < nb.size(); ++i) EXPECT_LT(nb[i - 1].to, nb[i].to);
        for (const auto& e : nb) EXPECT_TRUE(g.adjacent(e.to, v));
    }
}

TEST(Graph, CoordinatesInsideSquareAndDeterministic) {
    const GraphParams p{50, 5.0, 1000.0, 99};
    const Graph a = generate_graph(p), b = generate_graph(p);
    for (NodeId v = 0; v < a.size(); ++v) {
        EXPECT_EQ(a.coord(v).x, b.coord(v).x);
        EXPECT_EQ(a.coord(v).y, b.coord(v).y);
        EXPECT_GE(a.coord(v).x, 0.0);
        EXPECT_LT(a.coord(v).x, p.side_length());
        EXPECT_LT(a.coord(v).y, p.side_length());
    }
    EXPECT_EQ(a.id(), "udg-n50-rho5-R1000-s99");
}

TEST(Graph, FirstCoordinateFromRawDraws) {
    const GraphParams p{5, 2.0, 1000.0, 123};
    Engine eng(123);
    const double x = static_cast<double>(eng() >> 11) * 0x1.0p-53 * p.side_length();
    const double y = static_cast<double>(eng() >> 11) * 0x1.0p-53 * p.side_length();
    const Graph g = generate_graph(p);
    EXPECT_EQ(g.coord(0).x, x);
    EXPECT_EQ(g.coord(0).y, y);
}

TEST(Graph, AverageDegreeTracksDensity) {
    // Away from the boundary a node sees about pi * rho neighbors; the boundary pulls the mean down.
    double total = 0.0;
    for (std::uint64_t s = 0; s < 30; ++s) total += generate_graph({125, 5.0, 1000.0, s}).average_degree();
    const double mean = total / 30.0;
    EXPECT_GT(mean, 0.6 * M_PI * 5.0);
    EXPECT_LT(mean, M_PI * 5.0);
}

TEST(ConnectedDraw, DenseGraphsConnectQuickly) {
    const auto d = sample_connected_graph({50, 5.0, 1000.0, 0}, 100);
    EXPECT_TRUE(is_connected(d.graph));
    EXPECT_LE(d.attempts, 10u);
    EXPECT_EQ(d.seed_used, d.attempts - 1);
}

TEST(ConnectedDraw, ExhaustionIsReported) {
    // 200 nodes at density 0.3 are essentially never connected.
    EXPECT_THROW(sample_connected_graph({200, 0.3, 1000.0, 0}, 5), ExhaustionError);
    EXPECT_THROW(sample_connected_graph({20, 5.0, 1000.0, 0}, 0), ParameterError);
}

TEST(GraphIo, RoundTripIsExact) {
    const Graph g = generate_graph({30, 4.0, 1000.0, 17});
    const auto path = (std::filesystem::temp_directory_path() / "apnsp_graph_rt.json").string();
    save_graph(g, path);
    const Graph h = load_graph(path);
    EXPECT_EQ(h.id(), g.id());
    EXPECT_EQ(h.size(), g.size());
    EXPECT_EQ(h.edge_count(), g.edge_count());
    for (NodeId v = 0; v < g.size(); ++v) {
        EXPECT_EQ(h.coord(v).x, g.coord(v).x);
        EXPECT_EQ(h.coord(v).y, g.coord(v).y);
    }
    EXPECT_EQ(graph_content_hash(h), graph_content_hash(g));
    std::filesystem::remove(path);
}

TEST(GraphIo, MalformedInputsRejected) {
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"id":"x"})")), FormatError);
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                     R"({"id":"x","n":3,"rho":5,"radius":1000,"seed":0,"nodes":[{"id":0,"x":0,"y":0}]})")),
                 FormatError);
    // Points far apart with a density that should have produced edges.
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(
                     R"({"id":"x","n":2,"rho":5,"radius":1,"seed":0,"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":50,"y":0}]})")),
                 FormatError);
    EXPECT_THROW(load_graph("/nonexistent/graph.json"), FormatError);
    const auto path = (std::filesystem::temp_directory_path() / "apnsp_bad.json").string();
    std::ofstream(path) << "{not json";
    EXPECT_THROW(load_graph(path), FormatError);
    std::filesystem::remove(path);
}

TEST(GraphIo, HashChangesWithCoordinates) {
    const Graph a = fixtures::graph_from_points({{0, 0}, {10, 0}});
    const Graph b = fixtures::graph_from_points({{0, 0}, {10, 1e-9}});
    EXPECT_NE(graph_content_hash(a), graph_content_hash(b));
}
