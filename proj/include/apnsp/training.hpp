#pragma once

#include "apnsp/error.hpp"
#include "apnsp/mlp.hpp"
#include "apnsp/qmodel.hpp"
#include "apnsp/routing.hpp"
#include "apnsp/rng.hpp"
#include "apnsp/sampling.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace apnsp {

struct SupervisedResult {
    QModel model;
    std::vector<double> losses;
};

/// Fits the network to the dataset's Q* labels (rescaled by the model's target scale).
inline SupervisedResult train_supervised(const Dataset& data, QModel model, const TrainConfig& cfg) {
    if (data.empty()) throw ParameterError("supervised training on an empty dataset");
    if (data.set != model.set || data.normalize_by_radius != model.normalize_by_radius)
        throw ParameterError("dataset features do not match the model's feature configuration");
    std::vector<double> ys(data.Y.size());
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = data.Y[k] / model.target_scale;
    auto res = train(std::move(model.net), data.X, ys, cfg);
    model.net = std::move(res.model);
    return {std::move(model), std::move(res.losses)};
}

/// Greedy walk on the model's scores for (O, D); each node visited at most once. The
/// returned hop list may end short of D.
inline std::vector<NodeId> rl_rollout(const Graph& g, const QModel& model, NodeId origin, NodeId dest) {
    if (origin == dest) throw ParameterError("rollout needs origin != destination");
    return route_policy(g, model, origin, dest).hops;
}

/// Q_target(v, u) = -w(v, u) + gamma * max_{u' in nbr(u)} Q(u, u'), with 0 bootstrap at D.
/// Returned in length units.
inline double q_target(const Graph& g, const QModel& model, NodeId origin, NodeId v, NodeId u, NodeId dest,
                       double gamma) {
    const double r = -g.weight(v, u);
    if (u == dest || gamma == 0.0) return r;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : g.neighbors(u)) best = std::max(best, model.q_value(g, origin, dest, u, e.to));
    return r + gamma * best;
}

struct RlConfig {
    std::size_t episodes = 20;
    std::size_t iterations = 1000;
    double gamma = 1.0;
    std::vector<NodeId> origins;
    NodeId dest = 0;
    double explore_epsilon = 0.0;  ///< probability of a uniformly random unvisited hop in rollouts
    std::uint64_t explore_seed = 0;
    bool keep_snapshots = false;   ///< retain each episode's start model and dataset
};

struct EpisodeLog {
    std::size_t episode = 0;
    std::vector<std::vector<NodeId>> paths;
    std::size_t sample_count = 0;
    double first_loss = 0.0;
    double final_loss = 0.0;
    std::optional<QModel> start_model;
    std::optional<Dataset> samples;
};

struct RlResult {
    QModel model;
    std::vector<EpisodeLog> episodes;
};

namespace detail {

inline std::vector<NodeId> explore_rollout(const Graph& g, const QModel& model, NodeId origin, NodeId dest,
                                           double eps, Engine& eng) {
    if (eps <= 0.0) return rl_rollout(g, model, origin, dest);
    std::vector<char> visited(g.size(), 0);
    std::vector<NodeId> hops{origin};
    visited[origin] = 1;
    NodeId v = origin;
    while (v != dest) {
        std::vector<NodeId> open;
        for (const auto& e : g.neighbors(v))
            if (!visited[e.to]) open.push_back(e.to);
        if (open.empty()) break;
        NodeId next = open.front();
        if (uniform01(eng) < eps) {
            next = open[uniform_index(eng, open.size())];
        } else {
            double best = -std::numeric_limits<double>::infinity();
            for (NodeId u : open) {
                const double s = model.score(g, origin, dest, v, u);
                if (s > best) best = s, next = u;
            }
        }
        v = next;
        visited[v] = 1;
        hops.push_back(v);
    }
    return hops;
}

} // namespace detail

/// Episodic Q-learning on one graph. Each episode rolls out the current policy from every
/// origin, collects (v, u) rows for the forwarding nodes it visited, labels them with
/// q_target under the episode-start model, then trains for `iterations` steps.
inline RlResult rl_train(const Graph& g, const RlConfig& cfg, QModel model, TrainConfig train_cfg) {
    if (cfg.episodes < 1 || cfg.iterations < 1) throw ParameterError("episodes and iterations must be >= 1");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ParameterError("gamma must be in [0, 1]");
    if (cfg.origins.empty()) throw ParameterError("RL needs at least one origin");
    if (cfg.dest >= g.size()) throw ParameterError("RL destination out of range");
    for (NodeId o : cfg.origins)
        if (o == cfg.dest || o >= g.size()) throw ParameterError("RL origins must be valid and differ from the destination");
    train_cfg.iterations = cfg.iterations;

    Engine explore(cfg.explore_seed);
    RlResult res;
    for (std::size_t ep = 1; ep <= cfg.episodes; ++ep) {
        const QModel start = model;
        EpisodeLog log;
        log.episode = ep;
        DatasetBuilder builder(g, model.set, model.normalize_by_radius);
        for (NodeId o : cfg.origins) {
            auto hops = detail::explore_rollout(g, start, o, cfg.dest, cfg.explore_epsilon, explore);
            for (NodeId v : hops) {
                if (v == cfg.dest) continue;
                for (const auto& e : g.neighbors(v))
                    builder.add(-1, o, cfg.dest, v, e.to, q_target(g, start, o, v, e.to, cfg.dest, cfg.gamma));
            }
            log.paths.push_back(std::move(hops));
        }
        Dataset data = builder.take();
        if (data.empty()) throw TrainingError("episode " + std::to_string(ep) + " produced no samples");
        log.sample_count = data.size();

        auto fit = train_supervised(data, std::move(model), train_cfg);
        model = std::move(fit.model);
        log.first_loss = fit.losses.front();
        log.final_loss = fit.losses.back();
        if (cfg.keep_snapshots) {
            log.start_model = start;
            log.samples = std::move(data);
        }
        res.episodes.push_back(std::move(log));
    }
    res.model = std::move(model);
    return res;
}

} // namespace apnsp
