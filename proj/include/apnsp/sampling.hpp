#pragma once

#include "apnsp/error.hpp"
#include "apnsp/features.hpp"
#include "apnsp/graph.hpp"
#include "apnsp/ranksim.hpp"
#include "apnsp/rng.hpp"
#include "apnsp/sp_oracle.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace apnsp {

struct SampleProvenance {
    std::string graph_id;
    int path_idx = -1;  ///< index into the chosen paths, -1 for rows not taken from a path
    NodeId origin = 0;
    NodeId dest = 0;
    NodeId v = 0;
    NodeId u = 0;
};

/// Training rows. Y holds Q targets in length units; trainers rescale them.
struct Dataset {
    FeatureSet set = FeatureSet::DistanceOnly;
    bool normalize_by_radius = true;
    std::vector<std::vector<double>> X;
    std::vector<double> Y;
    std::vector<SampleProvenance> provenance;

    std::size_t size() const { return X.size(); }
    bool empty() const { return X.empty(); }
};

/// Appends rows while dropping repeated (O, D, v, u) contexts. For DistanceOnly the
/// origin does not enter the features, so it is ignored in the key.
class DatasetBuilder {
public:
    DatasetBuilder(const Graph& g, FeatureSet set, bool normalize_by_radius) : g_(g) {
        ds_.set = set;
        ds_.normalize_by_radius = normalize_by_radius;
    }

    bool add(int path_idx, NodeId origin, NodeId dest, NodeId v, NodeId u, double y) {
        const NodeId key_origin = ds_.set == FeatureSet::DistanceOnly ? NodeId(-1) : origin;
        if (!seen_.emplace(key_origin, dest, v, u).second) return false;
        const auto f = make_features(g_, ds_.set, origin, dest, v, u, ds_.normalize_by_radius);
        ds_.X.emplace_back(f.values.begin(), f.values.begin() + static_cast<std::ptrdiff_t>(f.size));
        ds_.Y.push_back(y);
        ds_.provenance.push_back({g_.id(), path_idx, origin, dest, v, u});
        return true;
    }

    Dataset take() { return std::move(ds_); }

private:
    const Graph& g_;
    Dataset ds_;
    std::set<std::tuple<NodeId, NodeId, NodeId, NodeId>> seen_;
};

struct SeedGraphChoice {
    std::size_t index = 0;
    double graph_sim = 0.0;
    std::vector<double> candidate_sims;
};

/// Picks the candidate with the largest SIM_G; ties go to the lexicographically lowest id.
inline SeedGraphChoice select_seed_graph(std::span<const Graph> candidates, const LinearMetric& metric,
                                         FeatureSet set, const SimilarityConfig& cfg,
                                         bool normalize_by_radius = true) {
    if (candidates.empty()) throw ParameterError("seed graph selection needs at least one candidate");
    SeedGraphChoice best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!is_connected(candidates[i])) throw ParameterError("candidate '" + candidates[i].id() + "' is not connected");
        const double s = sim_graph(candidates[i], metric, set, cfg, false, normalize_by_radius).graph_sim;
        best.candidate_sims.push_back(s);
        if (i == 0 || s > best.graph_sim ||
            (s == best.graph_sim && candidates[i].id() < candidates[best.index].id())) {
            best.index = i;
            best.graph_sim = s;
        }
    }
    return best;
}

struct SeedChoice {
    NodeId destination = 0;
    std::vector<NodeId> origins;
    std::vector<double> stretches;   ///< zeta(O_i, D)
    std::vector<PathRecord> paths;
    std::vector<double> path_sims;   ///< SIM_p of each path under the selection metric
    double graph_sim = 0.0;          ///< SIM_G of the graph under the selection metric
};

struct SubsampleOptions {
    std::optional<NodeId> dest_override;
    /// Origins whose shortest path to D has fewer hops are skipped. Every neighbor of D
    /// has stretch exactly 1, so with min_hops = 1 the lowest-stretch origins are all
    /// one-hop paths carrying a single forwarding decision each.
    std::size_t min_hops = 2;
    SimilarityConfig sim;
    bool normalize_by_radius = true;
};

/// Destination uniformly from mt19937_64(dest_seed) unless overridden; origins are the phi
/// nodes with the lowest path stretch to it (ties by id), with their shortest paths.
inline SeedChoice select_subsample(const Graph& g, const SpOracle& oracle, const LinearMetric& metric, FeatureSet set,
                                   std::size_t phi, std::uint64_t dest_seed, const SubsampleOptions& opt = {}) {
    const auto& dest_override = opt.dest_override;
    const auto& cfg = opt.sim;
    const bool normalize_by_radius = opt.normalize_by_radius;
    const std::size_t n = g.size();
    if (phi < 1 || phi >= n - 1)
        throw ParameterError("phi must satisfy 1 <= phi < n-1 (phi=" + std::to_string(phi) + ", n=" + std::to_string(n) + ")");
    SeedChoice c;
    if (dest_override) {
        if (*dest_override >= n) throw ParameterError("destination override out of range");
        c.destination = *dest_override;
    } else {
        Engine eng(dest_seed);
        c.destination = static_cast<NodeId>(uniform_index(eng, n));
    }
    const SpTable& sp = oracle.to(c.destination);

    std::vector<std::pair<double, NodeId>> ranked;
    for (NodeId o = 0; o < n; ++o) {
        if (o == c.destination || !sp.reachable(o) || g.euclid(o, c.destination) == 0.0) continue;
        std::size_t hops = 0;
        for (NodeId v = o; v != c.destination; v = *sp.pred[v]) ++hops;
        if (hops < opt.min_hops) continue;
        ranked.emplace_back(path_stretch(g, sp, o), o);
    }
    if (ranked.size() < phi)
        throw ParameterError("only " + std::to_string(ranked.size()) + " eligible origins for phi=" + std::to_string(phi));
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < phi; ++i) {
        c.origins.push_back(ranked[i].second);
        c.stretches.push_back(ranked[i].first);
        c.paths.push_back(shortest_path(g, sp, ranked[i].second));
        c.path_sims.push_back(sim_path(g, sp, metric, set, c.paths.back(), cfg, normalize_by_radius));
    }
    c.graph_sim = sim_graph(g, oracle, metric, set, cfg, false, normalize_by_radius).graph_sim;
    return c;
}

/// One row per (path origin, D, v, u) for every forwarding node v on the chosen paths,
/// labelled with Q*(v, u).
inline Dataset build_dataset(const Graph& g, const SeedChoice& choice, FeatureSet set, const SpTable& sp,
                             bool normalize_by_radius = true) {
    if (sp.dest != choice.destination) throw ParameterError("shortest-path table is for a different destination");
    DatasetBuilder b(g, set, normalize_by_radius);
    for (std::size_t i = 0; i < choice.paths.size(); ++i) {
        const auto& p = choice.paths[i];
        for (std::size_t h = 0; h + 1 < p.hops.size(); ++h) {
            const NodeId v = p.hops[h];
            for (const auto& e : g.neighbors(v))
                b.add(static_cast<int>(i), p.origin, p.dest, v, e.to, optimal_q(g, sp, v, e.to));
        }
    }
    return b.take();
}

/// Rows for every (v, u) with v != D. Each v acts as its own origin; with a choice and
/// DistanceAndStretch features, the path contexts of the choice are added too unless strict.
inline Dataset build_dataset_all_nodes(const Graph& g, NodeId dest, FeatureSet set, const SpTable& sp,
                                       bool normalize_by_radius = true, const SeedChoice* choice = nullptr,
                                       bool strict = false) {
    if (sp.dest != dest) throw ParameterError("shortest-path table is for a different destination");
    DatasetBuilder b(g, set, normalize_by_radius);
    if (choice && set == FeatureSet::DistanceAndStretch && !strict) {
        for (std::size_t i = 0; i < choice->paths.size(); ++i) {
            const auto& p = choice->paths[i];
            if (p.dest != dest) throw ParameterError("choice paths end at a different destination");
            for (std::size_t h = 0; h + 1 < p.hops.size(); ++h)
                for (const auto& e : g.neighbors(p.hops[h]))
                    b.add(static_cast<int>(i), p.origin, dest, p.hops[h], e.to, optimal_q(g, sp, p.hops[h], e.to));
        }
    }
    for (NodeId v = 0; v < g.size(); ++v) {
        if (v == dest) continue;
        if (set == FeatureSet::DistanceAndStretch && g.euclid(v, dest) == 0.0) continue;
        for (const auto& e : g.neighbors(v)) b.add(-1, v, dest, v, e.to, optimal_q(g, sp, v, e.to));
    }
    return b.take();
}

} // namespace apnsp
