#pragma once

#include "apnsp/graph.hpp"
#include "apnsp/qmodel.hpp"
#include "apnsp/sp_oracle.hpp"

#include <limits>
#include <string>
#include <vector>

namespace apnsp {

/// Outcome of routing one packet. eta is 1 iff the packet was delivered on a path
/// within zeta(O,D) * (1 + epsilon) of shortest.
struct RoutingOutcome {
    NodeId origin = 0;
    NodeId dest = 0;
    std::vector<NodeId> hops;
    bool delivered = false;
    double length = kInf;
    int eta = 0;
};

/// Local routing walk shared by every policy: from the current node move to the
/// unvisited neighbor with the highest score (ties to the lowest id) until the destination
/// is reached, no unvisited neighbor remains, or max_hops moves were made.
/// `score(v, u)` ranks neighbor u of v.
template <typename Score>
RoutingOutcome walk(const Graph& g, NodeId origin, NodeId dest, Score&& score, std::size_t max_hops) {
    RoutingOutcome out;
    out.origin = origin;
    out.dest = dest;
    std::vector<char> visited(g.size(), 0);
    NodeId v = origin;
    visited[v] = 1;
    out.hops.push_back(v);
    double length = 0.0;
    for (std::size_t step = 0; step < max_hops && v != dest; ++step) {
        bool found = false;
        NodeId best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        double best_w = 0.0;
        for (const auto& e : g.neighbors(v)) {
            if (visited[e.to]) continue;
            const double s = score(v, e.to);
            if (!found || s > best_score) {
                found = true;
                best = e.to;
                best_score = s;
                best_w = e.weight;
            }
        }
        if (!found) break;
        length += best_w;
        v = best;
        visited[v] = 1;
        out.hops.push_back(v);
    }
    out.delivered = (v == dest);
    out.length = out.delivered ? length : kInf;
    return out;
}

/// Greedy forwarding: closest unvisited neighbor to the destination.
struct GreedyPolicy {
    const Graph* g;
    std::string name() const { return "gf"; }
    double score(NodeId, NodeId dest, NodeId, NodeId u) const { return -g->euclid(u, dest); }
};

/// Learned Q network.
struct ModelPolicy {
    const Graph* g;
    const QModel* model;
    std::string label = "model";
    std::string name() const { return label; }
    double score(NodeId origin, NodeId dest, NodeId v, NodeId u) const { return model->score(*g, origin, dest, v, u); }
};

/// Exact Q* lookup.
struct OraclePolicy {
    const Graph* g;
    const SpOracle* oracle;
    std::string name() const { return "oracle"; }
    double score(NodeId, NodeId dest, NodeId v, NodeId u) const { return optimal_q(*g, oracle->to(dest), v, u); }
};

template <typename Policy>
RoutingOutcome route(const Graph& g, const Policy& policy, NodeId origin, NodeId dest, std::size_t max_hops = 0) {
    if (max_hops == 0) max_hops = g.size();
    return walk(g, origin, dest, [&](NodeId v, NodeId u) { return policy.score(origin, dest, v, u); }, max_hops);
}

inline RoutingOutcome route_policy(const Graph& g, const QModel& model, NodeId origin, NodeId dest,
                                   std::size_t max_hops = 0) {
    return route(g, ModelPolicy{&g, &model}, origin, dest, max_hops);
}

inline RoutingOutcome greedy_forwarding(const Graph& g, NodeId origin, NodeId dest) {
    return route(g, GreedyPolicy{&g}, origin, dest);
}

/// eta(O, D) = 1 iff delivered and d_p / d_sp <= zeta(O, D) * (1 + epsilon).
inline int eta(const Graph& g, const SpTable& sp, const RoutingOutcome& out, double epsilon) {
    if (!out.delivered || out.origin == out.dest) return out.delivered ? 1 : 0;
    const double dsp = sp.dist[out.origin];
    if (g.euclid(out.origin, out.dest) == 0.0) return 1;  // zeta unbounded for coincident endpoints
    const double zeta = path_stretch(g, sp, out.origin);
    return out.length / dsp <= zeta * (1.0 + epsilon) ? 1 : 0;
}

struct AccuracyReport {
    std::string graph_id;
    std::string policy;
    double accuracy = 0.0;
    double epsilon = 0.05;
    std::size_t delivered = 0;
    std::size_t near_shortest = 0;  ///< sum of eta over ordered pairs O != D
    std::vector<RoutingOutcome> outcomes;  ///< filled only when requested
};

/// Routes every ordered pair O != D. Pairs with O == D count as eta = 1, so
/// accuracy = (sum eta + |V|) / |V|^2.
template <typename Policy>
AccuracyReport apnsp_accuracy(const Graph& g, const SpOracle& oracle, const Policy& policy, double epsilon = 0.05,
                              bool keep_outcomes = false) {
    AccuracyReport rep;
    rep.graph_id = g.id();
    rep.policy = policy.name();
    rep.epsilon = epsilon;
    const auto n = static_cast<NodeId>(g.size());
    for (NodeId d = 0; d < n; ++d) {
        const SpTable& sp = oracle.to(d);
        for (NodeId o = 0; o < n; ++o) {
            if (o == d) continue;
            auto out = route(g, policy, o, d);
            out.eta = eta(g, sp, out, epsilon);
            rep.delivered += out.delivered ? 1 : 0;
            rep.near_shortest += static_cast<std::size_t>(out.eta);
            if (keep_outcomes) rep.outcomes.push_back(std::move(out));
        }
    }
    const double nn = static_cast<double>(n);
    rep.accuracy = (static_cast<double>(rep.near_shortest) + nn) / (nn * nn);
    return rep;
}

/// Number of ordered pairs O != D on which two policies take different hop sequences.
template <typename PolicyA, typename PolicyB>
std::size_t route_mismatches(const Graph& g, const PolicyA& a, const PolicyB& b) {
    std::size_t diff = 0;
    const auto n = static_cast<NodeId>(g.size());
    for (NodeId d = 0; d < n; ++d)
        for (NodeId o = 0; o < n; ++o)
            if (o != d && route(g, a, o, d).hops != route(g, b, o, d).hops) ++diff;
    return diff;
}

} // namespace apnsp
