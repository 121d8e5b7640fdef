#include "apnsp/features.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace apnsp;

TEST(Features, TriangleDistanceOnly) {
    const Graph g = fixtures::triangle();
    const auto f = make_features(g, FeatureSet::DistanceOnly, 0, 2, 0, 1, true);
    ASSERT_EQ(f.size, 2u);
    EXPECT_DOUBLE_EQ(f[0], 0.75);
    EXPECT_DOUBLE_EQ(f[1], 0.45);
    const auto raw = make_features(g, FeatureSet::DistanceOnly, 0, 2, 0, 1, false);
    EXPECT_DOUBLE_EQ(raw[0], 750.0);
    EXPECT_DOUBLE_EQ(raw[1], 450.0);
    EXPECT_EQ(f.context.node, 0u);
    EXPECT_EQ(f.context.neighbor, 1u);
}

TEST(Features, TriangleWithStretch) {
    const Graph g = fixtures::triangle();
    const auto f = make_features(g, FeatureSet::DistanceAndStretch, 0, 2, 0, 1, true);
    ASSERT_EQ(f.size, 4u);
    EXPECT_DOUBLE_EQ(f[0], 0.75);
    EXPECT_DOUBLE_EQ(f[1], 1.0);  // v = O lies on segment OD
    EXPECT_DOUBLE_EQ(f[2], 0.45);
    EXPECT_DOUBLE_EQ(f[3], (600.0 + 450.0) / 750.0);
    EXPECT_EQ(f.view().size(), 4u);
}

TEST(Features, StretchFactorAtLeastOne) {
    const Graph g = fixtures::small_random(40, 4.0, 3);
    for (NodeId o = 0; o < 5; ++o)
        for (NodeId v = 0; v < g.size(); ++v) {
            const NodeId d = 39;
            if (o == d) continue;
            EXPECT_GE(stretch_factor(g.coords(), o, d, v), 1.0 - 1e-12);
        }
    // Destination itself: |OD| + 0 over |OD|.
    EXPECT_DOUBLE_EQ(stretch_factor(g.coords(), 0, 39, 39), 1.0);
}

TEST(Features, UndefinedStretch) {
    const Graph g = fixtures::graph_from_points({{0, 0}, {0, 0}, {100, 0}});
    EXPECT_THROW(stretch_factor(g.coords(), 0, 0, 2), UndefinedStretchError);
    EXPECT_THROW(stretch_factor(g.coords(), 0, 1, 2), UndefinedStretchError);
    EXPECT_NO_THROW(make_features(g, FeatureSet::DistanceOnly, 0, 1, 2, 0, true));
}

TEST(Features, SetNames) {
    EXPECT_EQ(omega(FeatureSet::DistanceOnly), 2u);
    EXPECT_EQ(omega(FeatureSet::DistanceAndStretch), 4u);
    EXPECT_EQ(feature_set_from_string("distance"), FeatureSet::DistanceOnly);
    EXPECT_EQ(feature_set_from_string("4"), FeatureSet::DistanceAndStretch);
    EXPECT_EQ(feature_set_from_string(to_string(FeatureSet::DistanceAndStretch)), FeatureSet::DistanceAndStretch);
    EXPECT_THROW(feature_set_from_string("hops"), ParameterError);
    EXPECT_THROW(feature_set_for_omega(3), ParameterError);
}
