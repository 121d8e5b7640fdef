#include "apnsp/dataset_io.hpp"
#include "apnsp/sampling.hpp"
#include "helpers.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace apnsp;

namespace {

std::size_t hop_count(const SpTable& sp, NodeId v) {
    std::size_t h = 0;
    for (; v != sp.dest; v = *sp.pred[v]) ++h;
    return h;
}

} // namespace

TEST(DatasetBuilder, DropsRepeatedContexts) {
    const Graph g = fixtures::triangle();
    DatasetBuilder b(g, FeatureSet::DistanceAndStretch, true);
    EXPECT_TRUE(b.add(0, 0, 2, 0, 1, -1050));
    EXPECT_FALSE(b.add(1, 0, 2, 0, 1, -1050));
    EXPECT_TRUE(b.add(1, 1, 2, 0, 1, -1050));  // different origin is a different context
    Dataset ds = b.take();
    EXPECT_EQ(ds.size(), 2u);

    DatasetBuilder d(g, FeatureSet::DistanceOnly, true);
    EXPECT_TRUE(d.add(0, 0, 2, 0, 1, -1050));
    EXPECT_FALSE(d.add(1, 1, 2, 0, 1, -1050));  // origin does not enter DistanceOnly features
    EXPECT_EQ(d.take().size(), 1u);
}

TEST(Subsample, OriginsAreLowestStretchMultiHop) {
    const Graph g = fixtures::small_random(50, 5.0, 31);
    const SpOracle o(g);
    const auto set = FeatureSet::DistanceAndStretch;
    const auto c = select_subsample(g, o, LinearMetric::reference(set), set, 3, 1234);
    Engine eng(1234);
    EXPECT_EQ(c.destination, uniform_index(eng, 50));
    const SpTable& sp = o.to(c.destination);
    ASSERT_EQ(c.origins.size(), 3u);
    // Independent scan: every other eligible origin has stretch >= the chosen ones.
    double worst_chosen = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_GE(hop_count(sp, c.origins[i]), 2u);
        EXPECT_DOUBLE_EQ(c.stretches[i], path_stretch(g, sp, c.origins[i]));
        EXPECT_EQ(c.paths[i].hops.front(), c.origins[i]);
        EXPECT_EQ(c.paths[i].hops.back(), c.destination);
        if (i > 0) {
            EXPECT_LE(c.stretches[i - 1], c.stretches[i]);
        }
        worst_chosen = std::max(worst_chosen, c.stretches[i]);
    }
    const std::set<NodeId> chosen(c.origins.begin(), c.origins.end());
    for (NodeId v = 0; v < g.size(); ++v) {
        if (v == c.destination || chosen.count(v) || hop_count(sp, v) < 2) continue;
        EXPECT_GE(path_stretch(g, sp, v), worst_chosen);
    }
    EXPECT_GT(c.graph_sim, 0.0);
    EXPECT_EQ(c.path_sims.size(), 3u);
}

TEST(Subsample, SingleHopFilterOffPicksNeighborsOfDestination) {
    const Graph g = fixtures::small_random(50, 5.0, 31);
    const SpOracle o(g);
    SubsampleOptions opt;
    opt.min_hops = 1;
    opt.dest_override = 7;
    const auto c = select_subsample(g, o, LinearMetric::distance(), FeatureSet::DistanceOnly, 2, 0, opt);
    EXPECT_EQ(c.destination, 7u);
    for (double z : c.stretches) EXPECT_EQ(z, 1.0);
}

TEST(Subsample, RejectsBadPhiAndDestination) {
    const Graph g = fixtures::small_random(20, 5.0, 3);
    const SpOracle o(g);
    const auto m = LinearMetric::distance();
    EXPECT_THROW(select_subsample(g, o, m, FeatureSet::DistanceOnly, 0, 1), ParameterError);
    EXPECT_THROW(select_subsample(g, o, m, FeatureSet::DistanceOnly, 19, 1), ParameterError);
    SubsampleOptions opt;
    opt.dest_override = 20;
    EXPECT_THROW(select_subsample(g, o, m, FeatureSet::DistanceOnly, 3, 1, opt), ParameterError);
}

TEST(BuildDataset, RowsCarryOptimalQ) {
    const Graph g = fixtures::small_random(50, 5.0, 8);
    const SpOracle o(g);
    const auto set = FeatureSet::DistanceAndStretch;
    const auto c = select_subsample(g, o, LinearMetric::reference(set), set, 3, 99);
    const SpTable& sp = o.to(c.destination);
    const Dataset ds = build_dataset(g, c, set, sp);
    std::size_t expect = 0;
    for (const auto& p : c.paths)
        for (std::size_t h = 0; h + 1 < p.hops.size(); ++h) expect += g.degree(p.hops[h]);
    EXPECT_EQ(ds.size(), expect);  // distinct origins never collide under DistanceAndStretch
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const auto& pv = ds.provenance[k];
        EXPECT_EQ(ds.Y[k], -(g.weight(pv.v, pv.u) + sp.dist[pv.u]));
        const auto f = make_features(g, set, pv.origin, pv.dest, pv.v, pv.u, true);
        EXPECT_EQ(ds.X[k], std::vector<double>(f.values.begin(), f.values.begin() + 4));
        EXPECT_NE(pv.v, c.destination);
    }
    EXPECT_THROW(build_dataset(g, c, set, o.to((c.destination + 1) % 50)), ParameterError);
}

TEST(BuildDataset, AllNodesCoversEveryNonDestinationNode) {
    const Graph g = fixtures::small_random(30, 5.0, 2);
    const SpOracle o(g);
    const Dataset d2 = build_dataset_all_nodes(g, 4, FeatureSet::DistanceOnly, o.to(4));
    EXPECT_EQ(d2.size(), 2 * g.edge_count() - g.degree(4));
    SubsampleOptions opt;
    opt.dest_override = 4;
    const auto c = select_subsample(g, o, LinearMetric::distance_stretch(), FeatureSet::DistanceAndStretch, 3, 0, opt);
    const Dataset strict = build_dataset_all_nodes(g, 4, FeatureSet::DistanceAndStretch, o.to(4), true, &c, true);
    const Dataset with_paths = build_dataset_all_nodes(g, 4, FeatureSet::DistanceAndStretch, o.to(4), true, &c);
    EXPECT_EQ(strict.size(), d2.size());
    EXPECT_GE(with_paths.size(), strict.size());
}

TEST(SeedGraph, PicksHighestSimilarity) {
    std::vector<Graph> cands;
    for (std::uint64_t s = 0; s < 6; ++s) cands.push_back(fixtures::small_random(20, 5.0, 100 * s));
    const auto pick = select_seed_graph(cands, LinearMetric::distance(), FeatureSet::DistanceOnly, {});
    ASSERT_EQ(pick.candidate_sims.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(pick.candidate_sims[i],
                         sim_graph(cands[i], LinearMetric::distance(), FeatureSet::DistanceOnly, {}).graph_sim);
        EXPECT_LE(pick.candidate_sims[i], pick.graph_sim);
    }
    EXPECT_EQ(pick.graph_sim, pick.candidate_sims[pick.index]);
}

TEST(SeedGraph, TiesGoToLowestId) {
    const Graph a = fixtures::graph_from_points({{0, 0}, {500, 0}}, 1000.0, "b-graph");
    const Graph b = fixtures::graph_from_points({{0, 0}, {500, 0}}, 1000.0, "a-graph");
    const std::vector<Graph> cands{a, b};
    EXPECT_EQ(select_seed_graph(cands, LinearMetric::distance(), FeatureSet::DistanceOnly, {}).index, 1u);
    EXPECT_THROW(select_seed_graph(std::vector<Graph>{}, LinearMetric::distance(), FeatureSet::DistanceOnly, {}),
                 ParameterError);
}

TEST(DatasetCsv, RoundTrip) {
    const Graph g = fixtures::small_random(25, 5.0, 6);
    const SpOracle o(g);
    const auto c = select_subsample(g, o, LinearMetric::distance_stretch(), FeatureSet::DistanceAndStretch, 2, 5);
    const Dataset ds = build_dataset(g, c, FeatureSet::DistanceAndStretch, o.to(c.destination));
    const auto path = (std::filesystem::temp_directory_path() / "apnsp_ds.csv").string();
    save_dataset_csv(ds, path, {"provenance line"});
    const Dataset r = load_dataset_csv(path);
    EXPECT_EQ(r.set, ds.set);
    EXPECT_EQ(r.normalize_by_radius, ds.normalize_by_radius);
    EXPECT_EQ(r.X, ds.X);
    EXPECT_EQ(r.Y, ds.Y);
    ASSERT_EQ(r.provenance.size(), ds.provenance.size());
    EXPECT_EQ(r.provenance[3].u, ds.provenance[3].u);
    EXPECT_EQ(r.provenance[3].path_idx, ds.provenance[3].path_idx);
    std::filesystem::remove(path);
}

TEST(DatasetCsv, MalformedFilesRejected) {
    const auto path = (std::filesystem::temp_directory_path() / "apnsp_ds_bad.csv").string();
    std::ofstream(path) << "graph_id,path_idx,O,D,v,u,x_0,x_1,y\ng,0,0,1,0,1,0.5,0.4,-1\n";
    EXPECT_THROW(load_dataset_csv(path), FormatError);  // no feature_set line
    std::ofstream(path) << "# feature_set: distance\ngraph_id,path_idx,O,D,v,u,x_0,x_1,y\ng,0,0,1,0,1,0.5,-1\n";
    EXPECT_THROW(load_dataset_csv(path), FormatError);  // short row
    std::ofstream(path) << "# feature_set: distance\ngraph_id,path_idx,O,D,v,u,x_0,x_1,y\ng,0,0,1,0,1,abc,0.4,-1\n";
    EXPECT_THROW(load_dataset_csv(path), FormatError);
    EXPECT_THROW(load_dataset_csv("/nonexistent.csv"), FormatError);
    std::filesystem::remove(path);
}
