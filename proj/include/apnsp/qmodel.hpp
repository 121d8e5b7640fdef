#pragma once

#include "apnsp/error.hpp"
#include "apnsp/features.hpp"
#include "apnsp/graph.hpp"
#include "apnsp/mlp.hpp"

#include <json.hpp>

#include <fstream>
#include <span>
#include <string>

namespace apnsp {

/// A Q-value network together with how its inputs and targets are scaled.
/// With normalize_by_radius, distance features are divided by the radius of the graph
/// being routed and targets were divided by target_scale (the training graph radius).
struct QModel {
    Mlp net;
    FeatureSet set = FeatureSet::DistanceOnly;
    bool normalize_by_radius = true;
    double target_scale = 1.0;
    std::uint64_t init_seed = 0;
    nlohmann::json meta = nlohmann::json::object();

    FeatureVector features(const Graph& g, NodeId origin, NodeId dest, NodeId v, NodeId u) const {
        return make_features(g, set, origin, dest, v, u, normalize_by_radius);
    }

    /// Raw network output for (O, D, v, u); used for ranking neighbors.
    double score(const Graph& g, NodeId origin, NodeId dest, NodeId v, NodeId u) const {
        return net.forward(features(g, origin, dest, v, u));
    }

    /// Network output mapped back to length units.
    double q_value(const Graph& g, NodeId origin, NodeId dest, NodeId v, NodeId u) const {
        return score(g, origin, dest, v, u) * target_scale;
    }
};

inline QModel make_q_model(FeatureSet set, std::uint64_t seed, double train_radius, bool normalize_by_radius = true,
                           double leak = 0.0) {
    QModel m;
    m.net = init_model(omega(set), seed, leak);
    m.set = set;
    m.normalize_by_radius = normalize_by_radius;
    m.target_scale = normalize_by_radius ? train_radius : 1.0;
    m.init_seed = seed;
    return m;
}

inline nlohmann::json model_to_json(const QModel& m) {
    nlohmann::json j;
    j["layer_dims"] = m.net.dims();
    j["hidden_activation"] = m.net.leak() == 0.0 ? "relu" : "leaky_relu";
    j["leak"] = m.net.leak();
    auto& ws = j["weights"] = nlohmann::json::array();
    auto& bs = j["biases"] = nlohmann::json::array();
    for (std::size_t l = 0; l < m.net.layers(); ++l) {
        const std::size_t in = m.net.dims()[l], out = m.net.dims()[l + 1];
        auto w = m.net.weights(l);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < out; ++r) rows.push_back(std::vector<double>(w.begin() + r * in, w.begin() + (r + 1) * in));
        ws.push_back(std::move(rows));
        auto b = m.net.biases(l);
        bs.push_back(std::vector<double>(b.begin(), b.end()));
    }
    j["init_seed"] = m.init_seed;
    j["feature_set"] = to_string(m.set);
    j["normalization"] = {{"distance_by_radius", m.normalize_by_radius}, {"target_scale", m.target_scale}};
    j["meta"] = m.meta;
    return j;
}

inline QModel model_from_json(const nlohmann::json& j) {
    try {
        QModel m;
        m.net = Mlp(j.at("layer_dims").get<std::vector<std::size_t>>(), j.value("leak", 0.0));
        m.set = feature_set_from_string(j.at("feature_set").get<std::string>());
        if (m.net.input_size() != omega(m.set)) throw FormatError("model input width does not match its feature set");
        const auto& ws = j.at("weights");
        const auto& bs = j.at("biases");
        if (ws.size() != m.net.layers() || bs.size() != m.net.layers()) throw FormatError("model layer count mismatch");
        for (std::size_t l = 0; l < m.net.layers(); ++l) {
            const std::size_t in = m.net.dims()[l], out = m.net.dims()[l + 1];
            auto w = m.net.weights(l);
            if (ws[l].size() != out) throw FormatError("weight matrix " + std::to_string(l) + " has wrong row count");
            for (std::size_t r = 0; r < out; ++r) {
                const auto row = ws[l][r].get<std::vector<double>>();
                if (row.size() != in) throw FormatError("weight matrix " + std::to_string(l) + " has wrong column count");
                std::copy(row.begin(), row.end(), w.begin() + r * in);
            }
            const auto b = bs[l].get<std::vector<double>>();
            if (b.size() != out) throw FormatError("bias vector " + std::to_string(l) + " has wrong length");
            std::copy(b.begin(), b.end(), m.net.biases(l).begin());
        }
        m.init_seed = j.at("init_seed").get<std::uint64_t>();
        const auto& norm = j.at("normalization");
        m.normalize_by_radius = norm.at("distance_by_radius").get<bool>();
        m.target_scale = norm.at("target_scale").get<double>();
        m.meta = j.value("meta", nlohmann::json::object());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model json: ") + e.what());
    } catch (const ParameterError& e) {
        throw FormatError(std::string("invalid model: ") + e.what());
    }
}

inline void save_model(const QModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << model_to_json(m).dump(1) << '\n';
}

inline QModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("cannot parse " + path + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace apnsp
