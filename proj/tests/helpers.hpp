#pragma once

#include "apnsp/graph.hpp"

#include <string>
#include <vector>

namespace apnsp::fixtures {

// Graph over hand-placed points. rho only affects the id and validation.
inline Graph graph_from_points(std::vector<Point> pts, double radius = 1000.0, std::string id = "hand") {
    GraphParams p;
    p.n = static_cast<std::uint32_t>(pts.size());
    p.radius = radius;
    p.rho = 1.0;
    return Graph(p, std::move(pts), std::move(id));
}

// Triangle (0,0), (600,0), (600,450): sides 600, 450, 750, all within R = 1000.
inline Graph triangle() { return graph_from_points({{0, 0}, {600, 0}, {600, 450}}); }

inline Graph small_random(std::uint32_t n, double rho, std::uint64_t seed) {
    return sample_connected_graph({n, rho, 1000.0, seed}, 10000).graph;
}

} // namespace apnsp::fixtures
