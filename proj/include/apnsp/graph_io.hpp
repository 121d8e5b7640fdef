#pragma once

#include "apnsp/error.hpp"
#include "apnsp/graph.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace apnsp {

// Graph files carry coordinates only; edges are recomputed from coordinates and
// radius on load.

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["id"] = g.id();
    j["n"] = g.params().n;
    j["rho"] = g.params().rho;
    j["radius"] = g.params().radius;
    j["seed"] = g.params().seed;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (NodeId v = 0; v < g.size(); ++v) nodes.push_back({{"id", v}, {"x", g.coord(v).x}, {"y", g.coord(v).y}});
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    try {
        GraphParams p;
        p.n = j.at("n").get<std::uint32_t>();
        p.rho = j.at("rho").get<double>();
        p.radius = j.at("radius").get<double>();
        p.seed = j.at("seed").get<std::uint64_t>();
        const auto& nodes = j.at("nodes");
        if (nodes.size() != p.n) throw FormatError("graph file lists " + std::to_string(nodes.size()) + " nodes, n=" + std::to_string(p.n));
        std::vector<Point> coords(p.n);
        std::vector<char> seen(p.n, 0);
        for (const auto& node : nodes) {
            const auto id = node.at("id").get<std::uint32_t>();
            if (id >= p.n || seen[id]) throw FormatError("bad or duplicate node id " + std::to_string(id));
            seen[id] = 1;
            coords[id] = {node.at("x").get<double>(), node.at("y").get<double>()};
        }
        Graph g(p, std::move(coords), j.value("id", std::string{}));
        if (g.size() >= 2 && p.rho >= 2.0 && g.edge_count() == 0)
            throw FormatError("graph '" + g.id() + "' has no edges after recomputation at rho >= 2");
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed graph json: ") + e.what());
    }
}

inline void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << graph_to_json(g).dump(2) << '\n';
}

inline Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open graph file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("cannot parse " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

/// Content hash over parameters and exact coordinate bits.
inline std::uint64_t graph_content_hash(const Graph& g) {
    std::uint64_t h = fnv1a(g.id());
    auto mix = [&h](const void* p, std::size_t len) {
        h = fnv1a(std::string_view(static_cast<const char*>(p), len), h);
    };
    const auto& prm = g.params();
    mix(&prm.n, sizeof prm.n);
    mix(&prm.rho, sizeof prm.rho);
    mix(&prm.radius, sizeof prm.radius);
    for (const auto& c : g.coords()) {
        mix(&c.x, sizeof c.x);
        mix(&c.y, sizeof c.y);
    }
    return h;
}

} // namespace apnsp
