#pragma once

#include "apnsp/csv.hpp"
#include "apnsp/error.hpp"
#include "apnsp/features.hpp"
#include "apnsp/mlp.hpp"
#include "apnsp/rng.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace apnsp {

/// Full experiment configuration. Defaults reproduce the reference protocol:
/// 50-node density-5 seed graph, test sizes {27, 64, 125} x densities {2..5}, R = 1000,
/// epsilon = 0.05, phi = 3, gamma = 1, 5000 supervised iterations, 20 RL episodes of 1000.
struct ExperimentConfig {
    std::uint64_t root_seed = 1;
    std::uint32_t train_size = 50;
    double train_density = 5.0;
    std::vector<std::uint32_t> test_sizes{27, 64, 125};
    std::vector<double> test_densities{2.0, 3.0, 4.0, 5.0};
    double radius = 1000.0;
    std::vector<std::size_t> omegas{2, 4};
    std::size_t hidden_layers = 2;
    double epsilon = 0.05;
    std::size_t phi = 3;
    double gamma = 1.0;
    std::size_t iter_supervised = 5000;
    std::size_t iter_rl = 1000;
    std::size_t episodes = 20;
    std::size_t reps = 20;
    std::size_t seed_candidates = 100;
    double learning_rate = 1e-3;
    /// Supervised fits from this many initializations; the one most accurate on the seed graph is kept.
    std::size_t restarts = 5;
    /// Bootstrapped targets chase the network's own outputs; at 1e-3 most runs diverge
    /// within 20 episodes, so RL gets a smaller step.
    double rl_learning_rate = 3e-4;
    Optimizer optimizer = Optimizer::Adam;
    std::size_t batch = 0;  ///< 0 = full batch
    double leak = 0.01;
    bool normalize_features = true;
    std::optional<std::size_t> tau;  ///< nullopt = full ranking
    std::size_t min_origin_hops = 2;
    std::uint32_t max_attempts = 1000;
    std::vector<std::string> policies{"sup_phi3", "rl_phi3"};
    std::size_t workers = 0;  ///< 0 = hardware concurrency
    std::optional<std::uint32_t> dest;
    double explore_epsilon = 0.0;
    std::string output_dir = "out";

    TrainConfig supervised_train() const {
        TrainConfig t;
        t.iterations = iter_supervised;
        t.learning_rate = learning_rate;
        t.optimizer = optimizer;
        t.batch = batch;
        return t;
    }

    TrainConfig rl_train() const {
        TrainConfig t = supervised_train();
        t.iterations = iter_rl;
        t.learning_rate = rl_learning_rate;
        return t;
    }

    void validate() const {
        if (hidden_layers != 2) throw ParameterError("only 2 hidden layers are supported");
        if (test_sizes.empty() || test_densities.empty()) throw ParameterError("test grid is empty");
        for (auto om : omegas)
            if (om != 2 && om != 4) throw ParameterError("omegas must be 2 and/or 4");
        if (epsilon < 0.0) throw ParameterError("epsilon must be >= 0");
        if (gamma < 0.0 || gamma > 1.0) throw ParameterError("gamma must be in [0, 1]");
        if (phi < 1) throw ParameterError("phi must be >= 1");
        if (iter_supervised < 1 || iter_rl < 1 || episodes < 1 || reps < 1 || seed_candidates < 1 || restarts < 1)
            throw ParameterError("iteration, episode, rep, candidate and restart counts must be >= 1");
        if (!(learning_rate > 0.0) || !(rl_learning_rate > 0.0)) throw ParameterError("learning rates must be positive");
        if (!(leak >= 0.0 && leak < 1.0)) throw ParameterError("leak must be in [0, 1)");
        for (const auto& p : policies)
            if (p != "sup_phi3" && p != "sup_all" && p != "rl_phi3" && p != "rl_all")
                throw ParameterError("unknown policy '" + p + "' (sup_phi3 | sup_all | rl_phi3 | rl_all)");
    }

    /// Canonical "key = value" listing; also the input format of load_config.
    std::string to_text() const {
        std::ostringstream os;
        auto list = [](const auto& v) {
            std::ostringstream s;
            s << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                s << (i ? ", " : "");
                if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>)
                    s << fmt_double(v[i]);
                else
                    s << v[i];
            }
            s << "]";
            return s.str();
        };
        os << "root_seed = " << root_seed << '\n'
           << "train_size = " << train_size << '\n'
           << "train_density = " << fmt_double(train_density) << '\n'
           << "test_sizes = " << list(test_sizes) << '\n'
           << "test_densities = " << list(test_densities) << '\n'
           << "radius = " << fmt_double(radius) << '\n'
           << "omegas = " << list(omegas) << '\n'
           << "hidden_layers = " << hidden_layers << '\n'
           << "epsilon = " << fmt_double(epsilon) << '\n'
           << "phi = " << phi << '\n'
           << "gamma = " << fmt_double(gamma) << '\n'
           << "iter_supervised = " << iter_supervised << '\n'
           << "iter_rl = " << iter_rl << '\n'
           << "episodes = " << episodes << '\n'
           << "reps = " << reps << '\n'
           << "seed_candidates = " << seed_candidates << '\n'
           << "learning_rate = " << fmt_double(learning_rate) << '\n'
           << "restarts = " << restarts << '\n'
           << "rl_learning_rate = " << fmt_double(rl_learning_rate) << '\n'
           << "optimizer = " << to_string(optimizer) << '\n'
           << "batch = " << (batch ? std::to_string(batch) : "full") << '\n'
           << "leak = " << fmt_double(leak) << '\n'
           << "normalize_features = " << (normalize_features ? "true" : "false") << '\n'
           << "tau = " << (tau ? std::to_string(*tau) : "full") << '\n'
           << "min_origin_hops = " << min_origin_hops << '\n'
           << "max_attempts = " << max_attempts << '\n'
           << "policies = " << list(policies) << '\n'
           << "dest = " << (dest ? std::to_string(*dest) : "auto") << '\n'
           << "explore_epsilon = " << fmt_double(explore_epsilon) << '\n';
        return os.str();
    }

    /// Hash of the canonical listing (output_dir and workers do not affect results).
    std::uint64_t hash() const { return fnv1a(to_text()); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"'");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"'");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty() || s.front() != '[' || s.back() != ']') return {s};
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        T out;
        if constexpr (std::is_floating_point_v<T>)
            out = static_cast<T>(std::stod(v, &used));
        else
            out = static_cast<T>(std::stoull(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
        if constexpr (!std::is_floating_point_v<T>)
            if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParameterError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParameterError("config key '" + key + "': expected true/false, got '" + v + "'");
}

} // namespace detail

/// Applies one "key = value" setting. Lists use [a, b, c].
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
    using detail::parse_number;
    const std::string v = detail::trim(raw);
    auto list_of = [&](auto parse) {
        std::vector<decltype(parse(std::string{}))> out;
        for (const auto& item : detail::split_list(raw)) out.push_back(parse(item));
        return out;
    };
    if (key == "root_seed") c.root_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "train_size") c.train_size = parse_number<std::uint32_t>(key, v);
    else if (key == "train_density") c.train_density = parse_number<double>(key, v);
    else if (key == "test_sizes") c.test_sizes = list_of([&](const std::string& s) { return parse_number<std::uint32_t>(key, s); });
    else if (key == "test_densities") c.test_densities = list_of([&](const std::string& s) { return parse_number<double>(key, s); });
    else if (key == "radius") c.radius = parse_number<double>(key, v);
    else if (key == "omegas") c.omegas = list_of([&](const std::string& s) { return parse_number<std::size_t>(key, s); });
    else if (key == "hidden_layers") c.hidden_layers = parse_number<std::size_t>(key, v);
    else if (key == "epsilon") c.epsilon = parse_number<double>(key, v);
    else if (key == "phi") c.phi = parse_number<std::size_t>(key, v);
    else if (key == "gamma") c.gamma = parse_number<double>(key, v);
    else if (key == "iter_supervised") c.iter_supervised = parse_number<std::size_t>(key, v);
    else if (key == "iter_rl") c.iter_rl = parse_number<std::size_t>(key, v);
    else if (key == "episodes") c.episodes = parse_number<std::size_t>(key, v);
    else if (key == "reps") c.reps = parse_number<std::size_t>(key, v);
    else if (key == "seed_candidates") c.seed_candidates = parse_number<std::size_t>(key, v);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, v);
    else if (key == "restarts") c.restarts = parse_number<std::size_t>(key, v);
    else if (key == "rl_learning_rate") c.rl_learning_rate = parse_number<double>(key, v);
    else if (key == "optimizer") c.optimizer = optimizer_from_string(v);
    else if (key == "batch") c.batch = v == "full" ? 0 : parse_number<std::size_t>(key, v);
    else if (key == "leak") c.leak = parse_number<double>(key, v);
    else if (key == "normalize_features") c.normalize_features = detail::parse_bool(key, v);
    else if (key == "tau") c.tau = v == "full" ? std::nullopt : std::optional<std::size_t>(parse_number<std::size_t>(key, v));
    else if (key == "min_origin_hops") c.min_origin_hops = parse_number<std::size_t>(key, v);
    else if (key == "max_attempts") c.max_attempts = parse_number<std::uint32_t>(key, v);
    else if (key == "policies") c.policies = list_of([](const std::string& s) { return s; });
    else if (key == "workers") c.workers = parse_number<std::size_t>(key, v);
    else if (key == "dest") c.dest = v == "auto" ? std::nullopt : std::optional<std::uint32_t>(parse_number<std::uint32_t>(key, v));
    else if (key == "explore_epsilon") c.explore_epsilon = parse_number<double>(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else throw ParameterError("unknown config key '" + key + "'");
}

/// Parses "key = value" lines; '#' starts a comment; [section] headers are ignored.
inline void apply_config_text(ExperimentConfig& c, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c;
    apply_config_text(c, ss.str());
    c.validate();
    return c;
}

} // namespace apnsp
