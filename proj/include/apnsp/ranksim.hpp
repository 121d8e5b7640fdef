#pragma once

#include "apnsp/error.hpp"
#include "apnsp/features.hpp"
#include "apnsp/graph.hpp"
#include "apnsp/sp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace apnsp {

/// Linear ranking metric over a feature vector: m(x) = sum_i weights[i] * x[i].
struct LinearMetric {
    std::vector<double> weights;

    double operator()(const FeatureVector& f) const {
        if (weights.size() != f.size)
            throw ParameterError("metric has " + std::to_string(weights.size()) + " weights, features have " +
                                 std::to_string(f.size));
        double s = 0.0;
        for (std::size_t i = 0; i < f.size; ++i) s += weights[i] * f.values[i];
        return s;
    }

    std::string describe() const {
        std::ostringstream os;
        os << "linear(";
        for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? ";" : "") << weights[i];
        os << ")";
        return os.str();
    }

    /// m = -uD.
    static LinearMetric distance() { return {{0.0, -1.0}}; }
    /// m = -0.875 uD - 0.277 SF(u), zero weight on the node's own features.
    static LinearMetric distance_stretch() { return {{0.0, 0.0, -0.875, -0.277}}; }
    static LinearMetric reference(FeatureSet s) {
        return s == FeatureSet::DistanceOnly ? distance() : distance_stretch();
    }
};

struct SimilarityConfig {
    std::optional<std::size_t> tau;  ///< DCG cutoff; nullopt means the full ranking length

    std::size_t cutoff(std::size_t len) const { return tau ? std::min(*tau, len) : len; }
};

/// DCG_tau = sum_{r=1..tau} rel[r] / log2(r + 1).
inline double dcg(std::span<const double> relevances, std::size_t tau) {
    if (relevances.empty()) throw ParameterError("dcg of an empty relevance list");
    if (tau > relevances.size())
        throw ParameterError("dcg cutoff " + std::to_string(tau) + " exceeds list length " +
                             std::to_string(relevances.size()));
    double s = 0.0;
    for (std::size_t r = 1; r <= tau; ++r) s += relevances[r - 1] / std::log2(static_cast<double>(r) + 1.0);
    return s;
}

/// Graded relevance of the ideal ranking: (L - r + 1)^2 at 1-based position r.
inline std::vector<double> ideal_relevances(std::size_t len) {
    std::vector<double> rel(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double g = static_cast<double>(len - i);
        rel[i] = g * g;
    }
    return rel;
}

/// DCG of the estimated ranking relative to the ideal one, in [0, 1]. Elements of
/// `estimated` that do not occur in `ideal` have relevance 0.
template <typename Id>
double rank_similarity(std::span<const Id> ideal, std::span<const Id> estimated, const SimilarityConfig& cfg = {}) {
    if (ideal.empty() || estimated.empty()) throw ParameterError("rank_similarity needs non-empty rankings");
    const auto rel_a = ideal_relevances(ideal.size());
    std::vector<double> rel_b(estimated.size(), 0.0);
    for (std::size_t j = 0; j < estimated.size(); ++j) {
        const auto it = std::find(ideal.begin(), ideal.end(), estimated[j]);
        if (it != ideal.end()) rel_b[j] = rel_a[static_cast<std::size_t>(it - ideal.begin())];
    }
    const double ideal_dcg = dcg(rel_a, cfg.cutoff(rel_a.size()));
    const double est_dcg = dcg(rel_b, cfg.cutoff(rel_b.size()));
    return std::clamp(est_dcg / ideal_dcg, 0.0, 1.0);
}

template <typename Id>
double rank_similarity(const std::vector<Id>& ideal, const std::vector<Id>& estimated, const SimilarityConfig& cfg = {}) {
    return rank_similarity(std::span<const Id>(ideal), std::span<const Id>(estimated), cfg);
}

/// Orders ids best-first by score, ties by ascending id.
template <typename Score>
std::vector<NodeId> rank_best_first(std::vector<NodeId> ids, Score&& score) {
    std::vector<std::pair<double, NodeId>> keyed;
    keyed.reserve(ids.size());
    for (NodeId id : ids) keyed.emplace_back(score(id), id);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; i < keyed.size(); ++i) ids[i] = keyed[i].second;
    return ids;
}

/// SIM_v: neighbors of v ranked by Q* against the same neighbors ranked by the metric.
inline double sim_context(const Graph& g, const SpTable& sp, const LinearMetric& metric, FeatureSet set,
                          NodeId origin, NodeId dest, NodeId v, const SimilarityConfig& cfg,
                          bool normalize_by_radius = true) {
    const auto& nbrs = g.neighbors(v);
    if (nbrs.empty()) throw ParameterError("node " + std::to_string(v) + " has no neighbors");
    std::vector<NodeId> ids;
    ids.reserve(nbrs.size());
    for (const auto& e : nbrs) ids.push_back(e.to);
    const auto ideal = rank_best_first(ids, [&](NodeId u) { return optimal_q(g, sp, v, u); });
    const auto est = rank_best_first(ids, [&](NodeId u) {
        return metric(make_features(g, set, origin, dest, v, u, normalize_by_radius));
    });
    return rank_similarity(ideal, est, cfg);
}

struct ContextSimilarity {
    NodeId v;
    NodeId origin;
    NodeId dest;
    double sim;
};

struct SimilarityReport {
    std::string graph_id;
    std::string metric;
    FeatureSet set = FeatureSet::DistanceOnly;
    double graph_sim = 0.0;
    std::size_t contexts = 0;
    std::vector<ContextSimilarity> per_context;  ///< filled only when requested
};

/// SIM_G. DistanceOnly: every (v, D) with v != D (origin recorded as v). DistanceAndStretch:
/// every (v, O, D) with v != D and O != D.
inline SimilarityReport sim_graph(const Graph& g, const SpOracle& oracle, const LinearMetric& metric, FeatureSet set,
                                  const SimilarityConfig& cfg, bool keep_contexts = false,
                                  bool normalize_by_radius = true) {
    SimilarityReport rep;
    rep.graph_id = g.id();
    rep.metric = metric.describe();
    rep.set = set;
    const auto n = static_cast<NodeId>(g.size());
    double total = 0.0;
    auto record = [&](NodeId v, NodeId o, NodeId d, double s) {
        total += s;
        ++rep.contexts;
        if (keep_contexts) rep.per_context.push_back({v, o, d, s});
    };
    for (NodeId d = 0; d < n; ++d) {
        const SpTable& sp = oracle.to(d);
        for (NodeId v = 0; v < n; ++v) {
            if (v == d) continue;
            if (set == FeatureSet::DistanceOnly) {
                record(v, v, d, sim_context(g, sp, metric, set, v, d, v, cfg, normalize_by_radius));
            } else {
                for (NodeId o = 0; o < n; ++o) {
                    if (o == d) continue;
                    record(v, o, d, sim_context(g, sp, metric, set, o, d, v, cfg, normalize_by_radius));
                }
            }
        }
    }
    rep.graph_sim = rep.contexts ? total / static_cast<double>(rep.contexts) : 1.0;
    return rep;
}

inline SimilarityReport sim_graph(const Graph& g, const LinearMetric& metric, FeatureSet set,
                                  const SimilarityConfig& cfg, bool keep_contexts = false,
                                  bool normalize_by_radius = true) {
    return sim_graph(g, SpOracle(g), metric, set, cfg, keep_contexts, normalize_by_radius);
}

/// SIM_p: mean SIM_v over the path's forwarding nodes (destination excluded), with the
/// path origin as the context origin.
inline double sim_path(const Graph& g, const SpTable& sp, const LinearMetric& metric, FeatureSet set,
                       const PathRecord& path, const SimilarityConfig& cfg, bool normalize_by_radius = true) {
    if (path.hops.size() < 2 || path.dest != sp.dest) throw ParameterError("sim_path needs a path to the table's destination");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.hops.size(); ++i)
        total += sim_context(g, sp, metric, set, path.origin, path.dest, path.hops[i], cfg, normalize_by_radius);
    return total / static_cast<double>(path.hops.size() - 1);
}

} // namespace apnsp
