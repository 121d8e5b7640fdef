#pragma once

#include "apnsp/config.hpp"
#include "apnsp/csv.hpp"
#include "apnsp/graph.hpp"
#include "apnsp/graph_io.hpp"
#include "apnsp/qmodel.hpp"
#include "apnsp/routing.hpp"
#include "apnsp/sampling.hpp"
#include "apnsp/training.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace apnsp {

using Logger = std::function<void(const std::string&)>;

struct SeedStage {
    Graph graph;
    SeedGraphChoice choice;
    std::vector<std::uint64_t> candidate_seeds;
};

/// Draws seed_candidates connected training graphs from the "graph-gen" stream and keeps the
/// one whose neighbor ranking under -uD agrees best with the shortest-path ranking.
inline SeedStage select_seed_stage(const ExperimentConfig& c) {
    std::vector<Graph> cands;
    std::vector<std::uint64_t> seeds;
    std::uint64_t s = stream_seed(c.root_seed, "graph-gen");
    for (std::size_t i = 0; i < c.seed_candidates; ++i) {
        auto d = sample_connected_graph({c.train_size, c.train_density, c.radius, s}, c.max_attempts);
        s = d.seed_used + 1;
        seeds.push_back(d.seed_used);
        cands.push_back(std::move(d.graph));
    }
    SimilarityConfig sim{c.tau};
    auto choice = select_seed_graph(cands, LinearMetric::distance(), FeatureSet::DistanceOnly, sim, c.normalize_features);
    Graph g = cands[choice.index];
    return {std::move(g), std::move(choice), std::move(seeds)};
}

struct TrainedPolicy {
    std::string name;  ///< e.g. "sup_phi3_w4"
    std::string kind;  ///< sup_phi3 | sup_all | rl_phi3 | rl_all
    QModel model;
    SeedChoice choice;
    std::size_t sample_count = 0;
    std::vector<double> losses;
    std::vector<EpisodeLog> episodes;
    std::vector<double> restart_accuracies;  ///< seed-graph accuracy of each supervised restart
    std::size_t selected_restart = 0;
};

inline SeedChoice training_choice(const ExperimentConfig& c, const Graph& g, const SpOracle& oracle, FeatureSet set) {
    SubsampleOptions opt;
    opt.dest_override = c.dest;
    opt.min_hops = c.min_origin_hops;
    opt.sim = SimilarityConfig{c.tau};
    opt.normalize_by_radius = c.normalize_features;
    return select_subsample(g, oracle, LinearMetric::reference(set), set, c.phi, stream_seed(c.root_seed, "destination"), opt);
}

/// `replica` > 0 draws an independent initialization (and exploration stream) for repeated runs.
inline TrainedPolicy train_policy(const ExperimentConfig& c, const Graph& g, const SpOracle& oracle,
                                  const std::string& kind, std::size_t om, std::size_t replica = 0) {
    const std::string suffix = replica ? "/replica" + std::to_string(replica) : "";
    const FeatureSet set = feature_set_for_omega(om);
    TrainedPolicy p;
    p.kind = kind;
    p.name = kind + "_w" + std::to_string(om);
    p.choice = training_choice(c, g, oracle, set);
    QModel model = make_q_model(set, stream_seed(c.root_seed, "model-init" + suffix, om), c.radius, c.normalize_features, c.leak);
    const SpTable& sp = oracle.to(p.choice.destination);

    if (kind == "sup_phi3" || kind == "sup_all") {
        Dataset data = kind == "sup_phi3"
                           ? build_dataset(g, p.choice, set, sp, c.normalize_features)
                           : build_dataset_all_nodes(g, p.choice.destination, set, sp, c.normalize_features, &p.choice);
        p.sample_count = data.size();
        // Restarts are ranked by all-pairs accuracy on the seed graph itself; ties keep the earlier one.
        for (std::size_t r = 0; r < c.restarts; ++r) {
            QModel init = r == 0 ? model
                                 : make_q_model(set, stream_seed(model.init_seed, "restart", r), c.radius,
                                                c.normalize_features, c.leak);
            auto fit = train_supervised(data, std::move(init), c.supervised_train());
            const double acc =
                apnsp_accuracy(g, oracle, ModelPolicy{&g, &fit.model, p.name}, c.epsilon).accuracy;
            p.restart_accuracies.push_back(acc);
            if (r == 0 || acc > p.restart_accuracies[p.selected_restart]) {
                p.selected_restart = r;
                p.model = std::move(fit.model);
                p.losses = std::move(fit.losses);
            }
        }
    } else {
        RlConfig rc;
        rc.episodes = c.episodes;
        rc.iterations = c.iter_rl;
        rc.gamma = c.gamma;
        rc.dest = p.choice.destination;
        rc.explore_epsilon = c.explore_epsilon;
        rc.explore_seed = stream_seed(c.root_seed, "explore" + suffix, om);
        if (kind == "rl_phi3") {
            rc.origins = p.choice.origins;
        } else {
            for (NodeId v = 0; v < g.size(); ++v)
                if (v != rc.dest) rc.origins.push_back(v);
        }
        auto res = rl_train(g, rc, std::move(model), c.rl_train());
        p.model = std::move(res.model);
        for (const auto& e : res.episodes) {
            p.sample_count += e.sample_count;
            p.losses.push_back(e.final_loss);
        }
        p.episodes = std::move(res.episodes);
    }
    p.model.meta = {{"policy", p.name}, {"seed_graph", g.id()}, {"destination", p.choice.destination},
                    {"origins", p.choice.origins}, {"config_hash", c.hash()}};
    return p;
}

inline std::vector<TrainedPolicy> train_policies(const ExperimentConfig& c, const Graph& g, const SpOracle& oracle,
                                                 const Logger& log = {}) {
    std::vector<TrainedPolicy> out;
    for (const auto& kind : c.policies)
        for (auto om : c.omegas) {
            out.push_back(train_policy(c, g, oracle, kind, om));
            if (log) {
                const auto& p = out.back();
                log("trained " + p.name + " on " + std::to_string(p.sample_count) + " samples, final loss " +
                    std::to_string(p.losses.back()));
            }
        }
    return out;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first exception is rethrown.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct ResultRow {
    std::uint32_t size = 0;
    double density = 0.0;
    std::size_t rep = 0;
    std::uint64_t graph_seed = 0;
    std::string graph_id;
    std::string policy;
    double accuracy = 0.0;
    std::size_t gf_mismatches = 0;  ///< ordered pairs whose hop sequence differs from GF
};

struct CellSummary {
    std::uint32_t size = 0;
    double density = 0.0;
    std::string policy;
    std::size_t graphs = 0;
    double mean_accuracy = 0.0;
    double mean_gf = 0.0;
    double delta_vs_gf = 0.0;
    std::size_t gf_mismatches = 0;
};

struct ExperimentResult {
    std::string experiment_id;
    std::vector<ResultRow> rows;
    std::vector<CellSummary> summary;
};

inline std::uint64_t cell_stream(std::uint64_t root, std::uint32_t size, double density) {
    return stream_seed(root, "test-graphs/n" + std::to_string(size) + "/rho" + fmt_double(density));
}

/// Zero-shot evaluation grid. Graphs are drawn sequentially per cell (so the draw is
/// independent of the worker count); evaluation fans out over graphs.
inline ExperimentResult run_experiment(const ExperimentConfig& c, const std::vector<TrainedPolicy>& policies,
                                       const Logger& log = {}) {
    struct Job {
        std::uint32_t size;
        double density;
        std::size_t rep;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto size : c.test_sizes)
        for (auto rho : c.test_densities) {
            std::uint64_t s = cell_stream(c.root_seed, size, rho);
            for (std::size_t r = 0; r < c.reps; ++r) {
                // Only the seed is kept; graphs are rebuilt inside the workers.
                auto d = sample_connected_graph({size, rho, c.radius, s}, c.max_attempts);
                jobs.push_back({size, rho, r, d.seed_used});
                s = d.seed_used + 1;
            }
        }

    const std::size_t per_graph = policies.size() + 1;
    ExperimentResult res;
    res.experiment_id = "exp-" + fmt_hex(c.hash());
    res.rows.resize(jobs.size() * per_graph);
    std::atomic<std::size_t> done{0};
    std::mutex log_mu;

    parallel_for(jobs.size(), c.workers, [&](std::size_t j) {
        const Job& job = jobs[j];
        const Graph g = generate_graph({job.size, job.density, c.radius, job.seed});
        const SpOracle oracle(g);
        const GreedyPolicy gf{&g};
        auto row = [&](std::size_t k) -> ResultRow& {
            ResultRow& r = res.rows[j * per_graph + k];
            r.size = job.size;
            r.density = job.density;
            r.rep = job.rep;
            r.graph_seed = job.seed;
            r.graph_id = g.id();
            return r;
        };
        ResultRow& base = row(0);
        base.policy = gf.name();
        base.accuracy = apnsp_accuracy(g, oracle, gf, c.epsilon).accuracy;
        for (std::size_t k = 0; k < policies.size(); ++k) {
            const ModelPolicy mp{&g, &policies[k].model, policies[k].name};
            ResultRow& r = row(k + 1);
            r.policy = mp.name();
            r.accuracy = apnsp_accuracy(g, oracle, mp, c.epsilon).accuracy;
            r.gf_mismatches = route_mismatches(g, mp, gf);
        }
        const std::size_t finished = ++done;
        if (log && (finished % std::max<std::size_t>(1, c.reps) == 0 || finished == jobs.size())) {
            std::lock_guard lock(log_mu);
            log("evaluated " + std::to_string(finished) + "/" + std::to_string(jobs.size()) + " graphs");
        }
    });

    for (auto size : c.test_sizes)
        for (auto rho : c.test_densities)
            for (std::size_t k = 0; k < per_graph; ++k) {
                CellSummary s;
                s.size = size;
                s.density = rho;
                for (std::size_t j = 0; j < jobs.size(); ++j) {
                    if (jobs[j].size != size || jobs[j].density != rho) continue;
                    const ResultRow& r = res.rows[j * per_graph + k];
                    s.policy = r.policy;
                    s.mean_accuracy += r.accuracy;
                    s.mean_gf += res.rows[j * per_graph].accuracy;
                    s.gf_mismatches += r.gf_mismatches;
                    ++s.graphs;
                }
                if (s.graphs) {
                    s.mean_accuracy /= static_cast<double>(s.graphs);
                    s.mean_gf /= static_cast<double>(s.graphs);
                }
                s.delta_vs_gf = s.mean_accuracy - s.mean_gf;
                res.summary.push_back(std::move(s));
            }
    return res;
}

inline nlohmann::json training_manifest(const ExperimentConfig& c, const SeedStage& seed,
                                        const std::vector<TrainedPolicy>& policies) {
    nlohmann::json j;
    j["config"] = c.to_text();
    j["config_hash"] = fmt_hex(c.hash());
    j["root_seed"] = c.root_seed;
    j["seed_graph"] = {{"id", seed.graph.id()},
                       {"content_hash", fmt_hex(graph_content_hash(seed.graph))},
                       {"candidate_index", seed.choice.index},
                       {"graph_sim", seed.choice.graph_sim},
                       {"candidate_sims", seed.choice.candidate_sims}};
    for (const auto& p : policies) {
        nlohmann::json e{{"name", p.name},
                         {"kind", p.kind},
                         {"feature_set", to_string(p.model.set)},
                         {"init_seed", p.model.init_seed},
                         {"destination", p.choice.destination},
                         {"origins", p.choice.origins},
                         {"origin_stretches", p.choice.stretches},
                         {"subsample_sim", p.choice.graph_sim},
                         {"sample_count", p.sample_count}};
        if (p.episodes.empty()) {
            e["restart_accuracies"] = p.restart_accuracies;
            e["selected_restart"] = p.selected_restart;
            e["first_loss"] = p.losses.front();
            e["final_loss"] = p.losses.back();
        } else {
            for (const auto& ep : p.episodes)
                e["episodes"].push_back({{"episode", ep.episode},
                                         {"sample_count", ep.sample_count},
                                         {"first_loss", ep.first_loss},
                                         {"final_loss", ep.final_loss},
                                         {"paths", ep.paths}});
        }
        j["policies"].push_back(std::move(e));
    }
    return j;
}

} // namespace apnsp
