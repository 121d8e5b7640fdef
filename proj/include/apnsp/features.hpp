#pragma once

#include "apnsp/error.hpp"
#include "apnsp/graph.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace apnsp {

enum class FeatureSet {
    DistanceOnly,        ///< [vD, uD]
    DistanceAndStretch,  ///< [vD, SF(v), uD, SF(u)]
};

inline constexpr std::size_t omega(FeatureSet s) {
    return s == FeatureSet::DistanceOnly ? 2 : 4;
}

inline std::string_view to_string(FeatureSet s) {
    return s == FeatureSet::DistanceOnly ? "distance" : "distance_stretch";
}

inline FeatureSet feature_set_from_string(std::string_view s) {
    if (s == "distance" || s == "2") return FeatureSet::DistanceOnly;
    if (s == "distance_stretch" || s == "4") return FeatureSet::DistanceAndStretch;
    throw ParameterError("unknown feature set '" + std::string(s) + "' (expected distance | distance_stretch)");
}

inline FeatureSet feature_set_for_omega(std::size_t om) {
    if (om == 2) return FeatureSet::DistanceOnly;
    if (om == 4) return FeatureSet::DistanceAndStretch;
    throw ParameterError("unsupported input width " + std::to_string(om) + " (expected 2 or 4)");
}

/// Routing context: packet from origin to dest currently at node, candidate neighbor.
struct Context {
    NodeId origin;
    NodeId dest;
    NodeId node;
    NodeId neighbor;
};

struct FeatureVector {
    std::array<double, 4> values{};
    std::size_t size = 0;
    Context context{};

    std::span<const double> view() const { return {values.data(), size}; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// (|Ov| + |vD|) / |OD|.
inline double stretch_factor(std::span<const Point> coords, NodeId origin, NodeId dest, NodeId v) {
    if (origin == dest) throw UndefinedStretchError("stretch factor undefined for origin == destination");
    const double od = distance(coords[origin], coords[dest]);
    if (od == 0.0) throw UndefinedStretchError("stretch factor undefined for coincident origin and destination");
    return (distance(coords[origin], coords[v]) + distance(coords[v], coords[dest])) / od;
}

/// distance_scale divides the distance entries (the graph radius by default; 1 keeps raw lengths).
/// Stretch factors are dimensionless and left unscaled.
inline FeatureVector make_features(std::span<const Point> coords, FeatureSet set, NodeId origin, NodeId dest,
                                   NodeId v, NodeId u, double distance_scale = 1.0) {
    FeatureVector f;
    f.context = {origin, dest, v, u};
    const double vd = distance(coords[v], coords[dest]) / distance_scale;
    const double ud = distance(coords[u], coords[dest]) / distance_scale;
    if (set == FeatureSet::DistanceOnly) {
        f.values = {vd, ud, 0.0, 0.0};
        f.size = 2;
    } else {
        f.values = {vd, stretch_factor(coords, origin, dest, v), ud, stretch_factor(coords, origin, dest, u)};
        f.size = 4;
    }
    return f;
}

/// Convenience overload: features on a graph with the radius normalization switch.
inline FeatureVector make_features(const Graph& g, FeatureSet set, NodeId origin, NodeId dest, NodeId v, NodeId u,
                                   bool normalize_by_radius) {
    return make_features(g.coords(), set, origin, dest, v, u, normalize_by_radius ? g.radius() : 1.0);
}

} // namespace apnsp
