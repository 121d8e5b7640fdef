#pragma once

#include "apnsp/error.hpp"
#include "apnsp/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace apnsp {

using NodeId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Unit-disk uniform random graph parameters: n nodes at density rho (nodes per
/// radius^2 area) in a square of side sqrt(n * radius^2 / rho).
struct GraphParams {
    std::uint32_t n = 50;
    double rho = 5.0;
    double radius = 1000.0;
    std::uint64_t seed = 0;

    double side_length() const { return std::sqrt(static_cast<double>(n) * radius * radius / rho); }

    void validate() const {
        if (n < 2) throw ParameterError("graph needs n >= 2 nodes, got " + std::to_string(n));
        if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("density rho must be positive");
        if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("radius must be positive");
        const double side = side_length();
        if (!(side > 0.0) || !std::isfinite(side)) throw ParameterError("side length is not finite");
    }
};

struct Edge {
    NodeId to;
    double weight;
};

/// Immutable unit-disk graph. Edges are always derived from coordinates and radius,
/// so (v,u) is an edge iff |vu| <= radius and w(v,u) = |vu|.
class Graph {
public:
    Graph(GraphParams params, std::vector<Point> coords, std::string id = {})
        : params_(params), coords_(std::move(coords)), id_(std::move(id)) {
        params_.validate();
        if (coords_.size() != params_.n)
            throw ParameterError("coordinate count " + std::to_string(coords_.size()) + " != n " +
                                 std::to_string(params_.n));
        if (id_.empty()) id_ = default_id(params_);
        build_edges();
    }

    static std::string default_id(const GraphParams& p) {
        auto fmt = [](double v) {
            std::string s = std::to_string(v);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return s;
        };
        return "udg-n" + std::to_string(p.n) + "-rho" + fmt(p.rho) + "-R" + fmt(p.radius) + "-s" +
               std::to_string(p.seed);
    }

    const GraphParams& params() const { return params_; }
    const std::string& id() const { return id_; }
    std::size_t size() const { return coords_.size(); }
    double radius() const { return params_.radius; }

    const std::vector<Point>& coords() const { return coords_; }
    Point coord(NodeId v) const { return coords_[v]; }

    /// Neighbors sorted by ascending id.
    const std::vector<Edge>& neighbors(NodeId v) const { return adjacency_[v]; }
    std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& row : adjacency_) twice += row.size();
        return twice / 2;
    }

    bool adjacent(NodeId v, NodeId u) const {
        for (const auto& e : adjacency_[v])
            if (e.to == u) return true;
        return false;
    }

    /// Edge weight; throws if (v,u) is not an edge.
    double weight(NodeId v, NodeId u) const {
        for (const auto& e : adjacency_[v])
            if (e.to == u) return e.weight;
        throw ParameterError("no edge " + std::to_string(v) + "-" + std::to_string(u));
    }

    double euclid(NodeId a, NodeId b) const { return distance(coords_[a], coords_[b]); }

    double average_degree() const { return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(size()); }

private:
    void build_edges() {
        const std::size_t n = coords_.size();
        adjacency_.assign(n, {});
        for (NodeId v = 0; v < n; ++v)
            for (NodeId u = v + 1; u < n; ++u) {
                const double d = distance(coords_[v], coords_[u]);
                if (d <= params_.radius) {
                    adjacency_[v].push_back({u, d});
                    adjacency_[u].push_back({v, d});
                }
            }
    }

    GraphParams params_;
    std::vector<Point> coords_;
    std::vector<std::vector<Edge>> adjacency_;
    std::string id_;
};

/// Draws n i.i.d. uniform points on [0, side]^2 from mt19937_64(seed), x then y per node.
inline Graph generate_graph(const GraphParams& params) {
    params.validate();
    Engine eng(params.seed);
    const double side = params.side_length();
    std::vector<Point> coords(params.n);
    for (auto& p : coords) {
        p.x = uniform01(eng) * side;
        p.y = uniform01(eng) * side;
    }
    return Graph(params, std::move(coords));
}

inline bool is_connected(const Graph& g) {
    const std::size_t n = g.size();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (const auto& e : g.neighbors(v))
            if (!seen[e.to]) {
                seen[e.to] = 1;
                ++reached;
                stack.push_back(e.to);
            }
    }
    return reached == n;
}

struct ConnectedDraw {
    Graph graph;
    std::uint64_t seed_used;
    std::uint32_t attempts;
};

/// Tries seed, seed+1, ... until a connected graph appears.
inline ConnectedDraw sample_connected_graph(GraphParams params, std::uint32_t max_attempts) {
    if (max_attempts < 1) throw ParameterError("max_attempts must be >= 1");
    params.validate();
    const std::uint64_t first = params.seed;
    for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
        params.seed = first + attempt;
        Graph g = generate_graph(params);
        if (is_connected(g)) return {std::move(g), params.seed, attempt + 1};
    }
    throw ExhaustionError("no connected graph (n=" + std::to_string(params.n) + ", rho=" +
                          std::to_string(params.rho) + ") within " + std::to_string(max_attempts) +
                          " attempts from seed " + std::to_string(first) +
                          "; density too low for reliable connectivity");
}

} // namespace apnsp
