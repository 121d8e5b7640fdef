#pragma once

#include "apnsp/error.hpp"
#include "apnsp/graph.hpp"
#include "apnsp/graph_io.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

namespace apnsp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest-path distances and next hops toward one destination.
struct SpTable {
    NodeId dest = 0;
    std::vector<double> dist;                 ///< d_sp(v, dest); +inf if unreachable
    std::vector<std::optional<NodeId>> pred;  ///< next hop from v toward dest

    bool reachable(NodeId v) const { return dist[v] < kInf; }
};

struct PathRecord {
    NodeId origin = 0;
    NodeId dest = 0;
    std::vector<NodeId> hops;  ///< hops.front() == origin, hops.back() == dest
    double length = 0.0;
};

/// Dijkstra from the destination. Distances are accumulated outward from dest, so
/// dist[v] == dist[pred[v]] + w(v, pred[v]) holds bit-exactly. Among equal-distance
/// next hops the lowest id wins; a next hop is always settled before the node it serves.
inline SpTable sssp(const Graph& g, NodeId dest) {
    const std::size_t n = g.size();
    if (dest >= n) throw ParameterError("destination " + std::to_string(dest) + " out of range");
    SpTable t;
    t.dest = dest;
    t.dist.assign(n, kInf);
    t.pred.assign(n, std::nullopt);
    std::vector<char> settled(n, 0);

    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    t.dist[dest] = 0.0;
    heap.push({0.0, dest});
    while (!heap.empty()) {
        const auto [d, x] = heap.top();
        heap.pop();
        if (settled[x]) continue;
        settled[x] = 1;
        for (const auto& e : g.neighbors(x)) {
            const NodeId v = e.to;
            if (settled[v]) continue;
            const double nd = d + e.weight;
            if (nd < t.dist[v]) {
                t.dist[v] = nd;
                t.pred[v] = x;
                heap.push({nd, v});
            } else if (nd == t.dist[v] && t.pred[v] && x < *t.pred[v]) {
                t.pred[v] = x;
            }
        }
    }
    return t;
}

/// zeta(O, D) = d_sp(O, D) / d_e(O, D).
inline double path_stretch(const Graph& g, const SpTable& sp, NodeId origin) {
    if (origin == sp.dest) throw UndefinedStretchError("path stretch undefined for origin == destination");
    if (!sp.reachable(origin))
        throw UndefinedStretchError("origin " + std::to_string(origin) + " cannot reach destination");
    const double de = g.euclid(origin, sp.dest);
    if (de == 0.0) throw UndefinedStretchError("path stretch undefined for coincident endpoints");
    return sp.dist[origin] / de;
}

/// Q*(v,u) = -(w(v,u) + d_sp(u, D)); -inf when u cannot reach D.
inline double optimal_q(const Graph& g, const SpTable& sp, NodeId v, NodeId u) {
    const double w = g.weight(v, u);
    if (!sp.reachable(u)) return -kInf;
    return -(w + sp.dist[u]);
}

inline PathRecord shortest_path(const Graph& g, const SpTable& sp, NodeId origin) {
    if (!sp.reachable(origin))
        throw UnreachableError("node " + std::to_string(origin) + " cannot reach " + std::to_string(sp.dest));
    PathRecord p;
    p.origin = origin;
    p.dest = sp.dest;
    NodeId v = origin;
    p.hops.push_back(v);
    while (v != sp.dest) {
        const NodeId next = *sp.pred[v];
        p.length += g.weight(v, next);
        v = next;
        p.hops.push_back(v);
    }
    return p;
}

/// All per-destination tables of one graph, computed once.
class SpOracle {
public:
    explicit SpOracle(const Graph& g) {
        tables_.reserve(g.size());
        for (NodeId d = 0; d < g.size(); ++d) tables_.push_back(sssp(g, d));
    }
    const SpTable& to(NodeId dest) const { return tables_.at(dest); }
    std::size_t size() const { return tables_.size(); }

private:
    std::vector<SpTable> tables_;
};

// Cache files: {"graph_hash", "graph_id", "dest", "dist": [..|null], "pred": [..|-1]}.

inline void save_sp_table(const Graph& g, const SpTable& t, const std::string& path) {
    nlohmann::json j;
    j["graph_hash"] = graph_content_hash(g);
    j["graph_id"] = g.id();
    j["dest"] = t.dest;
    auto& dist = j["dist"] = nlohmann::json::array();
    auto& pred = j["pred"] = nlohmann::json::array();
    for (std::size_t v = 0; v < t.dist.size(); ++v) {
        if (t.reachable(static_cast<NodeId>(v)))
            dist.push_back(t.dist[v]);
        else
            dist.push_back(nullptr);
        pred.push_back(t.pred[v] ? static_cast<std::int64_t>(*t.pred[v]) : std::int64_t{-1});
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << j.dump() << '\n';
}

/// Loads a cached table; rejects caches written for a different graph.
inline SpTable load_sp_table(const Graph& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open cache " + path);
    try {
        nlohmann::json j;
        in >> j;
        if (j.at("graph_hash").get<std::uint64_t>() != graph_content_hash(g))
            throw FormatError("cache " + path + " was written for a different graph");
        SpTable t;
        t.dest = j.at("dest").get<NodeId>();
        const auto& dist = j.at("dist");
        const auto& pred = j.at("pred");
        if (dist.size() != g.size() || pred.size() != g.size()) throw FormatError("cache size mismatch in " + path);
        for (std::size_t v = 0; v < g.size(); ++v) {
            t.dist.push_back(dist[v].is_null() ? kInf : dist[v].get<double>());
            const auto p = pred[v].get<std::int64_t>();
            t.pred.push_back(p < 0 ? std::nullopt : std::optional<NodeId>(static_cast<NodeId>(p)));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed cache " + path + ": " + e.what());
    }
}

} // namespace apnsp
