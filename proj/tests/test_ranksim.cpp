#include "apnsp/ranksim.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace apnsp;

TEST(Dcg, WorkedExampleTablesMatch) {
    const std::vector<int> a{4, 1, 3, 2, 5};
    const std::vector<int> b{1, 2, 4, 5, 6};
    const SimilarityConfig cfg{3};
    const auto rel_a = ideal_relevances(5);
    EXPECT_EQ(rel_a, (std::vector<double>{25, 16, 9, 4, 1}));
    const double dcg_a = dcg(rel_a, 3);
    // B's relevances: 1 -> 16, 2 -> 4, 4 -> 25 (items keep their graded relevance from A).
    const std::vector<double> rel_b{16, 4, 25, 1, 0};
    const double dcg_b = dcg(rel_b, 3);
    EXPECT_NEAR(dcg_a, 39.595, 5e-4);
    EXPECT_NEAR(dcg_b, 31.024, 5e-4);
    EXPECT_NEAR(rank_similarity(a, b, cfg), 0.784, 5e-4);
    EXPECT_DOUBLE_EQ(rank_similarity(a, b, cfg), dcg_b / dcg_a);
}

TEST(Dcg, ClosedForm) {
    const std::vector<double> rel{3, 2, 1};
    EXPECT_DOUBLE_EQ(dcg(rel, 3), 3.0 + 2.0 / std::log2(3.0) + 1.0 / 2.0);
    EXPECT_DOUBLE_EQ(dcg(rel, 1), 3.0);
    EXPECT_THROW(dcg(std::vector<double>{}, 0), ParameterError);
    EXPECT_THROW(dcg(rel, 4), ParameterError);
}

TEST(RankSimilarity, BoundaryCases) {
    const std::vector<int> a{1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(rank_similarity(a, a), 1.0);
    EXPECT_DOUBLE_EQ(rank_similarity(a, std::vector<int>{7, 8, 9, 10}), 0.0);
    const double reversed = rank_similarity(a, std::vector<int>{4, 3, 2, 1});
    EXPECT_GT(reversed, 0.0);
    EXPECT_LT(reversed, 1.0);
    // Swapping the top pair costs more than swapping the bottom pair.
    EXPECT_LT(rank_similarity(a, std::vector<int>{2, 1, 3, 4}), rank_similarity(a, std::vector<int>{1, 2, 4, 3}));
    EXPECT_THROW(rank_similarity(std::vector<int>{}, a), ParameterError);
    // Cutoff larger than the list is clamped to the list length.
    EXPECT_DOUBLE_EQ(rank_similarity(a, a, SimilarityConfig{10}), 1.0);
}

TEST(RankBestFirst, TiesByAscendingId) {
    const auto r = rank_best_first({5, 2, 9, 1}, [](NodeId id) { return id == 9 ? 1.0 : 0.0; });
    EXPECT_EQ(r, (std::vector<NodeId>{9, 1, 2, 5}));
}

TEST(SimContext, TriangleDistanceMetricIsPerfect) {
    const Graph g = fixtures::triangle();
    const SpTable sp = sssp(g, 2);
    // At node 0: Q* prefers 2 (direct) over 1; -uD also prefers 2.
    EXPECT_DOUBLE_EQ(sim_context(g, sp, LinearMetric::distance(), FeatureSet::DistanceOnly, 0, 2, 0, {}), 1.0);
}

TEST(SimContext, DisagreementLowersScore) {
    // From 0 toward 3: node 1 is closer to D but reaching D through it is long.
    const Graph g = fixtures::graph_from_points({{0, 0}, {700, 500}, {600, -300}, {1400, 0}, {1500, 700}},
                                               1000.0);
    const SpTable sp = sssp(g, 3);
    const double s = sim_context(g, sp, LinearMetric::distance(), FeatureSet::DistanceOnly, 0, 3, 0, {});
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    // Against Q* itself the score is 1 by construction: use a metric that mirrors the oracle on this context.
    const auto ideal = rank_best_first({1, 2}, [&](NodeId u) { return optimal_q(g, sp, 0, u); });
    const auto est = rank_best_first({1, 2}, [&](NodeId u) { return -g.euclid(u, 3); });
    EXPECT_DOUBLE_EQ(s, rank_similarity(ideal, est));
}

TEST(SimGraph, ContextCountsAndRange) {
    const Graph g = fixtures::small_random(12, 4.0, 8);
    const auto d = sim_graph(g, LinearMetric::distance(), FeatureSet::DistanceOnly, {}, true);
    EXPECT_EQ(d.contexts, 12u * 11u);
    EXPECT_EQ(d.per_context.size(), d.contexts);
    const auto s = sim_graph(g, LinearMetric::distance_stretch(), FeatureSet::DistanceAndStretch, {});
    EXPECT_EQ(s.contexts, 12u * 11u * 11u);
    for (double v : {d.graph_sim, s.graph_sim}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    double mean = 0.0;
    for (const auto& c : d.per_context) mean += c.sim;
    EXPECT_NEAR(mean / static_cast<double>(d.contexts), d.graph_sim, 1e-12);
}

TEST(SimGraph, InvariantUnderPositiveScaling) {
    const Graph g = fixtures::small_random(25, 5.0, 21);
    const LinearMetric m = LinearMetric::distance_stretch();
    LinearMetric scaled = m;
    for (auto& w : scaled.weights) w *= 3.7;
    const auto a = sim_graph(g, m, FeatureSet::DistanceAndStretch, {});
    const auto b = sim_graph(g, scaled, FeatureSet::DistanceAndStretch, {});
    EXPECT_DOUBLE_EQ(a.graph_sim, b.graph_sim);
}

TEST(SimGraph, NormalizationDoesNotChangeDistanceRanking) {
    const Graph g = fixtures::small_random(25, 5.0, 4);
    const auto a = sim_graph(g, LinearMetric::distance(), FeatureSet::DistanceOnly, {}, false, true);
    const auto b = sim_graph(g, LinearMetric::distance(), FeatureSet::DistanceOnly, {}, false, false);
    EXPECT_DOUBLE_EQ(a.graph_sim, b.graph_sim);
}

TEST(SimPath, MeanOverForwardingNodes) {
    const Graph g = fixtures::small_random(30, 5.0, 12);
    const SpOracle o(g);
    const SpTable& sp = o.to(0);
    NodeId far = 1;
    for (NodeId v = 1; v < g.size(); ++v)
        if (sp.dist[v] > sp.dist[far]) far = v;
    const auto path = shortest_path(g, sp, far);
    ASSERT_GE(path.hops.size(), 3u);
    double expect = 0.0;
    for (std::size_t i = 0; i + 1 < path.hops.size(); ++i)
        expect += sim_context(g, sp, LinearMetric::distance(), FeatureSet::DistanceOnly, far, 0, path.hops[i], {});
    expect /= static_cast<double>(path.hops.size() - 1);
    EXPECT_DOUBLE_EQ(sim_path(g, sp, LinearMetric::distance(), FeatureSet::DistanceOnly, path, {}), expect);
}

TEST(LinearMetric, WidthMismatchThrows) {
    const Graph g = fixtures::triangle();
    const auto f = make_features(g, FeatureSet::DistanceAndStretch, 0, 2, 0, 1, true);
    EXPECT_THROW(LinearMetric::distance()(f), ParameterError);
    EXPECT_DOUBLE_EQ(LinearMetric::distance_stretch()(f), -0.875 * 0.45 - 0.277 * 1.4);
}
