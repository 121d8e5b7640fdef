// Command-line driver: graph generation, similarity analysis, seed/subsample selection,
// supervised and RL training, single-graph evaluation and the full zero-shot grid.
// Exit codes: 0 ok, 1 user error (bad flags, config, input files), 2 internal error.

#include "apnsp/config.hpp"
#include "apnsp/csv.hpp"
#include "apnsp/dataset_io.hpp"
#include "apnsp/experiment.hpp"
#include "apnsp/graph_io.hpp"
#include "apnsp/qmodel.hpp"
#include "apnsp/ranksim.hpp"
#include "apnsp/routing.hpp"
#include "apnsp/sampling.hpp"
#include "apnsp/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace apnsp;

namespace {

struct ConfigOpts {
    std::string file;
    std::vector<std::string> sets;

    ExperimentConfig resolve() const {
        ExperimentConfig c = file.empty() ? ExperimentConfig{} : load_config(file);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
            apply_setting(c, detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
        }
        c.validate();
        return c;
    }
};

void add_config_opts(CLI::App* sub, ConfigOpts& o) {
    sub->add_option("--config", o.file, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "override one config key (key=value), repeatable");
}

std::string joined_command;

std::vector<std::string> provenance(const ExperimentConfig* c, const std::vector<std::string>& extra = {}) {
    std::vector<std::string> lines{"apnsp " + joined_command};
    if (c) {
        lines.push_back("config_hash: " + fmt_hex(c->hash()));
        std::istringstream in(c->to_text());
        for (std::string l; std::getline(in, l);) lines.push_back("config: " + l);
    }
    lines.insert(lines.end(), extra.begin(), extra.end());
    return lines;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << j.dump(2) << '\n';
}

void ensure_parent(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

LinearMetric parse_metric(const std::string& s) {
    if (s == "distance" || s == "dist") return LinearMetric::distance();
    if (s == "distance_stretch" || s == "dist_stretch") return LinearMetric::distance_stretch();
    std::vector<double> w;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            w.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw ParameterError("metric must be distance, distance_stretch or comma-separated weights");
        }
    }
    if (w.size() != 2 && w.size() != 4) throw ParameterError("metric needs 2 or 4 weights");
    return LinearMetric{w};
}

int cmd_gen(const ConfigOpts& co, std::optional<std::uint32_t> n, std::optional<double> rho,
            std::optional<std::uint64_t> seed, std::size_t count, const std::string& out) {
    const auto c = co.resolve();
    GraphParams p{n.value_or(c.train_size), rho.value_or(c.train_density), c.radius,
                  seed.value_or(stream_seed(c.root_seed, "graph-gen"))};
    p.validate();
    if (count < 1) throw ParameterError("--count must be >= 1");
    if (count > 1) fs::create_directories(out);
    else ensure_parent(out);
    for (std::size_t i = 0; i < count; ++i) {
        auto d = sample_connected_graph(p, c.max_attempts);
        p.seed = d.seed_used + 1;
        const std::string path = count == 1 ? out : (fs::path(out) / ("graph_" + std::to_string(i) + ".json")).string();
        save_graph(d.graph, path);
        std::cout << path << " " << d.graph.id() << " attempts=" << d.attempts
                  << " avg_degree=" << fmt_double(d.graph.average_degree()) << '\n';
    }
    return 0;
}

int cmd_sim(const ConfigOpts& co, const std::vector<std::string>& graphs, std::size_t count, const std::string& metric_name,
            const std::string& prefix) {
    const auto c = co.resolve();
    const LinearMetric metric = parse_metric(metric_name);
    const FeatureSet set = feature_set_for_omega(metric.weights.size());
    const SimilarityConfig sim{c.tau};
    std::vector<Graph> gs;
    for (const auto& path : graphs) gs.push_back(load_graph(path));
    if (gs.empty()) {
        std::uint64_t s = stream_seed(c.root_seed, "graph-gen");
        for (std::size_t i = 0; i < count; ++i) {
            auto d = sample_connected_graph({c.train_size, c.train_density, c.radius, s}, c.max_attempts);
            s = d.seed_used + 1;
            gs.push_back(std::move(d.graph));
        }
    }
    ensure_parent(prefix);
    const auto prov = provenance(&c, {"metric: " + metric.describe()});
    CsvWriter summary(prefix + "_summary.csv");
    for (const auto& l : prov) summary.comment(l);
    summary.header({"graph_id", "metric", "feature_set", "contexts", "sim_g"});
    const bool detail = gs.size() == 1;
    std::optional<CsvWriter> contexts;
    if (detail) {
        contexts.emplace(prefix + "_contexts.csv");
        for (const auto& l : prov) contexts->comment(l);
        contexts->header({"graph_id", "v", "O", "D", "sim"});
    }
    std::size_t high = 0;
    for (const auto& g : gs) {
        const auto rep = sim_graph(g, metric, set, sim, detail, c.normalize_features);
        summary.row(g.id(), metric.describe(), std::string(to_string(set)), rep.contexts, rep.graph_sim);
        if (rep.graph_sim >= 0.9) ++high;
        if (detail)
            for (const auto& e : rep.per_context) contexts->row(g.id(), e.v, e.origin, e.dest, e.sim);
    }
    std::cout << gs.size() << " graphs, " << high << " with SIM_G >= 0.9; wrote " << summary.path() << '\n';
    return 0;
}

int cmd_seed(const ConfigOpts& co, const std::string& out_dir) {
    const auto c = co.resolve();
    fs::create_directories(out_dir);
    const auto stage = select_seed_stage(c);
    const auto gpath = (fs::path(out_dir) / "seed_graph.json").string();
    save_graph(stage.graph, gpath);
    CsvWriter w((fs::path(out_dir) / "seed_candidates.csv").string());
    for (const auto& l : provenance(&c)) w.comment(l);
    w.header({"index", "graph_seed", "sim_g", "selected"});
    for (std::size_t i = 0; i < stage.candidate_seeds.size(); ++i)
        w.row(i, stage.candidate_seeds[i], stage.choice.candidate_sims[i], i == stage.choice.index ? 1 : 0);
    std::cout << "seed graph " << stage.graph.id() << " SIM_G=" << fmt_double(stage.choice.graph_sim) << " -> " << gpath
              << '\n';
    return 0;
}

int cmd_sample(const ConfigOpts& co, const std::string& graph_path, std::size_t om, bool all_nodes,
               const std::string& out) {
    const auto c = co.resolve();
    const Graph g = load_graph(graph_path);
    const SpOracle oracle(g);
    const FeatureSet set = feature_set_for_omega(om);
    const auto choice = training_choice(c, g, oracle, set);
    const SpTable& sp = oracle.to(choice.destination);
    const Dataset ds = all_nodes ? build_dataset_all_nodes(g, choice.destination, set, sp, c.normalize_features, &choice)
                                 : build_dataset(g, choice, set, sp, c.normalize_features);
    std::ostringstream origins;
    for (std::size_t i = 0; i < choice.origins.size(); ++i)
        origins << (i ? " " : "") << choice.origins[i] << "(zeta=" << fmt_double(choice.stretches[i]) << ")";
    ensure_parent(out);
    save_dataset_csv(ds, out,
                     provenance(&c, {"graph: " + g.id() + " hash " + fmt_hex(graph_content_hash(g)),
                                     "destination: " + std::to_string(choice.destination),
                                     "origins: " + origins.str(), "subsample_sim_g: " + fmt_double(choice.graph_sim)}));
    std::cout << "D=" << choice.destination << " origins " << origins.str() << ", " << ds.size() << " rows -> " << out
              << '\n';
    return 0;
}

void write_losses(const std::string& path, const std::vector<double>& losses, const std::vector<std::string>& prov) {
    CsvWriter w(path);
    for (const auto& l : prov) w.comment(l);
    w.header({"step", "loss"});
    for (std::size_t i = 0; i < losses.size(); ++i) w.row(i + 1, losses[i]);
}

int cmd_train_sup(const ConfigOpts& co, const std::string& dataset, const std::string& out, const std::string& loss_path) {
    const auto c = co.resolve();
    const Dataset ds = load_dataset_csv(dataset);
    const auto om = omega(ds.set);
    QModel model = make_q_model(ds.set, stream_seed(c.root_seed, "model-init", om), c.radius, ds.normalize_by_radius, c.leak);
    auto fit = train_supervised(ds, std::move(model), c.supervised_train());
    fit.model.meta = {{"policy", "sup"}, {"dataset", dataset}, {"config_hash", fmt_hex(c.hash())}, {"rows", ds.size()}};
    ensure_parent(out);
    save_model(fit.model, out);
    if (!loss_path.empty()) write_losses(loss_path, fit.losses, provenance(&c, {"dataset: " + dataset}));
    std::cout << "trained on " << ds.size() << " rows, loss " << fmt_double(fit.losses.front()) << " -> "
              << fmt_double(fit.losses.back()) << "; model -> " << out << '\n';
    return 0;
}

int cmd_train_rl(const ConfigOpts& co, const std::string& graph_path, std::size_t om, bool all_origins,
                 const std::string& out, const std::string& manifest) {
    const auto c = co.resolve();
    const Graph g = load_graph(graph_path);
    const SpOracle oracle(g);
    const auto p = train_policy(c, g, oracle, all_origins ? "rl_all" : "rl_phi3", om);
    ensure_parent(out);
    save_model(p.model, out);
    if (!manifest.empty()) {
        SeedStage stage{g, SeedGraphChoice{}, {}};
        write_json(training_manifest(c, stage, {p}), manifest);
    }
    for (const auto& e : p.episodes)
        std::cout << "episode " << e.episode << ": " << e.sample_count << " rows, loss " << fmt_double(e.first_loss)
                  << " -> " << fmt_double(e.final_loss) << '\n';
    std::cout << "model -> " << out << '\n';
    return 0;
}

int cmd_eval(const ConfigOpts& co, const std::vector<std::string>& graphs, const std::vector<std::string>& models,
             bool with_oracle, const std::string& out, const std::string& pairs_path) {
    const auto c = co.resolve();
    if (graphs.empty()) throw ParameterError("eval needs at least one --graph");
    std::vector<QModel> qs;
    for (const auto& m : models) qs.push_back(load_model(m));
    std::optional<CsvWriter> w, pairs;
    const auto prov = provenance(&c);
    if (!out.empty()) {
        ensure_parent(out);
        w.emplace(out);
        for (const auto& l : prov) w->comment(l);
        w->header({"graph_id", "policy", "accuracy", "epsilon", "delivered", "near_shortest", "gf_mismatches"});
    }
    if (!pairs_path.empty()) {
        ensure_parent(pairs_path);
        pairs.emplace(pairs_path);
        for (const auto& l : prov) pairs->comment(l);
        pairs->header({"graph_id", "policy", "O", "D", "hops", "delivered", "d_p", "eta"});
    }
    for (const auto& path : graphs) {
        const Graph g = load_graph(path);
        const SpOracle oracle(g);
        const GreedyPolicy gf{&g};
        auto emit = [&](const auto& policy, std::size_t mism) {
            const auto rep = apnsp_accuracy(g, oracle, policy, c.epsilon, pairs.has_value());
            std::cout << g.id() << " " << rep.policy << " accuracy=" << fmt_double(rep.accuracy) << '\n';
            if (w) w->row(g.id(), rep.policy, rep.accuracy, rep.epsilon, rep.delivered, rep.near_shortest, mism);
            if (pairs)
                for (const auto& o : rep.outcomes)
                    pairs->row(g.id(), rep.policy, o.origin, o.dest, o.hops.size() - 1, o.delivered ? 1 : 0, o.length, o.eta);
        };
        emit(gf, 0);
        if (with_oracle) emit(OraclePolicy{&g, &oracle}, route_mismatches(g, OraclePolicy{&g, &oracle}, gf));
        for (std::size_t k = 0; k < qs.size(); ++k) {
            const ModelPolicy mp{&g, &qs[k], fs::path(models[k]).stem().string()};
            emit(mp, route_mismatches(g, mp, gf));
        }
    }
    return 0;
}

int cmd_experiment(const ConfigOpts& co, std::string out_dir) {
    auto c = co.resolve();
    if (!out_dir.empty()) c.output_dir = out_dir;
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    auto log = [](const std::string& s) { std::cerr << s << std::endl; };

    const auto stage = select_seed_stage(c);
    log("seed graph " + stage.graph.id() + " SIM_G=" + fmt_double(stage.choice.graph_sim));
    save_graph(stage.graph, (dir / "seed_graph.json").string());
    const SpOracle oracle(stage.graph);
    const auto policies = train_policies(c, stage.graph, oracle, log);
    for (const auto& p : policies) save_model(p.model, (dir / ("model_" + p.name + ".json")).string());
    write_json(training_manifest(c, stage, policies), (dir / "manifest.json").string());

    {
        CsvWriter w((dir / "seed_accuracy.csv").string());
        for (const auto& l : provenance(&c)) w.comment(l);
        w.header({"graph_id", "policy", "accuracy"});
        const GreedyPolicy gf{&stage.graph};
        w.row(stage.graph.id(), gf.name(), apnsp_accuracy(stage.graph, oracle, gf, c.epsilon).accuracy);
        for (const auto& p : policies) {
            const double acc = apnsp_accuracy(stage.graph, oracle, ModelPolicy{&stage.graph, &p.model, p.name}, c.epsilon).accuracy;
            w.row(stage.graph.id(), p.name, acc);
            log("seed-graph accuracy " + p.name + " " + fmt_double(acc));
        }
    }

    const auto res = run_experiment(c, policies, log);
    const auto prov = provenance(&c, {"experiment_id: " + res.experiment_id, "seed_graph: " + stage.graph.id()});
    CsvWriter rows((dir / "results.csv").string());
    for (const auto& l : prov) rows.comment(l);
    rows.header({"experiment_id", "size", "density", "rep", "graph_seed", "policy", "accuracy", "gf_mismatches"});
    for (const auto& r : res.rows)
        rows.row(res.experiment_id, r.size, r.density, r.rep, r.graph_seed, r.policy, r.accuracy, r.gf_mismatches);
    CsvWriter sum((dir / "summary.csv").string());
    for (const auto& l : prov) sum.comment(l);
    sum.header({"experiment_id", "size", "density", "policy", "graphs", "mean_accuracy", "mean_gf", "delta_vs_gf",
                "gf_mismatches"});
    for (const auto& s : res.summary) {
        sum.row(res.experiment_id, s.size, s.density, s.policy, s.graphs, s.mean_accuracy, s.mean_gf, s.delta_vs_gf,
                s.gf_mismatches);
        std::cout << s.size << " " << fmt_double(s.density) << " " << s.policy << " " << fmt_double(s.mean_accuracy)
                  << " (gf " << fmt_double(s.mean_gf) << ")\n";
    }
    std::cout << "results in " << dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) joined_command += (i > 1 ? " " : "") + std::string(argv[i]);

    CLI::App app{"Learned local routing policies on unit-disk graphs"};
    app.require_subcommand(1);
    int status = 0;

    ConfigOpts gen_co, sim_co, seed_co, sample_co, sup_co, rl_co, eval_co, exp_co;

    auto* gen = app.add_subcommand("gen", "generate connected unit-disk graphs");
    add_config_opts(gen, gen_co);
    std::optional<std::uint32_t> gen_n;
    std::optional<double> gen_rho;
    std::optional<std::uint64_t> gen_seed;
    std::size_t gen_count = 1;
    std::string gen_out = "graph.json";
    gen->add_option("-n,--nodes", gen_n, "node count (default train_size)");
    gen->add_option("--rho", gen_rho, "density (default train_density)");
    gen->add_option("--seed", gen_seed, "first graph seed (default from the graph-gen stream)");
    gen->add_option("--count", gen_count, "number of graphs; >1 writes a directory");
    gen->add_option("-o,--out", gen_out, "output file or directory");

    auto* sim = app.add_subcommand("sim", "rank similarity of a linear metric against shortest paths");
    add_config_opts(sim, sim_co);
    std::vector<std::string> sim_graphs;
    std::size_t sim_count = 100;
    std::string sim_metric = "distance", sim_prefix = "sim";
    sim->add_option("--graph", sim_graphs, "graph JSON file(s); default draws --count training graphs");
    sim->add_option("--count", sim_count, "graphs to draw when no --graph is given");
    sim->add_option("--metric", sim_metric, "distance | distance_stretch | comma-separated weights");
    sim->add_option("-o,--out-prefix", sim_prefix, "writes <prefix>_summary.csv and, for one graph, <prefix>_contexts.csv");

    auto* seed = app.add_subcommand("seed", "select the training graph from seed_candidates draws");
    add_config_opts(seed, seed_co);
    std::string seed_out = "out";
    seed->add_option("-o,--out-dir", seed_out, "output directory");

    auto* sample = app.add_subcommand("sample", "build a training dataset of optimal Q labels");
    add_config_opts(sample, sample_co);
    std::string sample_graph, sample_out = "dataset.csv";
    std::size_t sample_omega = 4;
    bool sample_all = false;
    sample->add_option("--graph", sample_graph, "graph JSON")->required()->check(CLI::ExistingFile);
    sample->add_option("--omega", sample_omega, "feature count (2 or 4)");
    sample->add_flag("--all-nodes", sample_all, "label every node's neighbors, not just the phi paths");
    sample->add_option("-o,--out", sample_out, "dataset CSV");

    auto* sup = app.add_subcommand("train-sup", "supervised training on a dataset CSV");
    add_config_opts(sup, sup_co);
    std::string sup_data, sup_out = "model.json", sup_losses;
    sup->add_option("--dataset", sup_data, "dataset CSV from 'sample'")->required()->check(CLI::ExistingFile);
    sup->add_option("-o,--out", sup_out, "model JSON");
    sup->add_option("--losses", sup_losses, "optional loss trace CSV");

    auto* rl = app.add_subcommand("train-rl", "episodic Q-learning on one graph");
    add_config_opts(rl, rl_co);
    std::string rl_graph, rl_out = "model.json", rl_manifest;
    std::size_t rl_omega = 4;
    bool rl_all = false;
    rl->add_option("--graph", rl_graph, "graph JSON")->required()->check(CLI::ExistingFile);
    rl->add_option("--omega", rl_omega, "feature count (2 or 4)");
    rl->add_flag("--all-origins", rl_all, "roll out from every node instead of the phi subsample");
    rl->add_option("-o,--out", rl_out, "model JSON");
    rl->add_option("--manifest", rl_manifest, "training manifest JSON");

    auto* ev = app.add_subcommand("eval", "all-pairs accuracy of GF and learned models");
    add_config_opts(ev, eval_co);
    std::vector<std::string> ev_graphs, ev_models;
    bool ev_oracle = false;
    std::string ev_out, ev_pairs;
    ev->add_option("--graph", ev_graphs, "graph JSON file(s)")->required()->check(CLI::ExistingFile);
    ev->add_option("--model", ev_models, "model JSON file(s)")->check(CLI::ExistingFile);
    ev->add_flag("--oracle", ev_oracle, "also evaluate the exact shortest-path policy");
    ev->add_option("-o,--out", ev_out, "accuracy CSV");
    ev->add_option("--pairs", ev_pairs, "per-pair outcome CSV");

    auto* ex = app.add_subcommand("experiment", "seed selection, training and the zero-shot test grid");
    add_config_opts(ex, exp_co);
    std::string ex_out;
    ex->add_option("-o,--out-dir", ex_out, "output directory (default output_dir)");

    try {
        app.parse(argc, argv);
        if (*gen) status = cmd_gen(gen_co, gen_n, gen_rho, gen_seed, gen_count, gen_out);
        else if (*sim) status = cmd_sim(sim_co, sim_graphs, sim_count, sim_metric, sim_prefix);
        else if (*seed) status = cmd_seed(seed_co, seed_out);
        else if (*sample) status = cmd_sample(sample_co, sample_graph, sample_omega, sample_all, sample_out);
        else if (*sup) status = cmd_train_sup(sup_co, sup_data, sup_out, sup_losses);
        else if (*rl) status = cmd_train_rl(rl_co, rl_graph, rl_omega, rl_all, rl_out, rl_manifest);
        else if (*ev) status = cmd_eval(eval_co, ev_graphs, ev_models, ev_oracle, ev_out, ev_pairs);
        else if (*ex) status = cmd_experiment(exp_co, ex_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return status;
}
