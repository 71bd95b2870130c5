#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ogp/csv.hpp>
#include <ogp/harness/config.hpp>
#include <ogp/optimize.hpp>
#include <ogp/snapshot.hpp>

namespace ogp::harness {

/// Data-scaled starting point: signal variance = target variance,
/// lengthscale = feature spread, noise = 1% of the signal.
inline Hyperparameters initial_guess(const Dataset& d)
{
    const double var = (d.targets().array() - d.targets().mean()).square().mean();
    Hyperparameters h;
    h.signal_variance = var > 0.0 ? var : 1.0;
    h.lengthscales.resize(d.dim());
    for (Index c = 0; c < d.dim(); ++c) {
        const auto col = d.inputs().col(c).array();
        const double sd = std::sqrt((col - col.mean()).square().mean());
        h.lengthscales[c] = sd > 0.0 ? sd : 1.0;
    }
    h.noise_variance = 1e-2 * h.signal_variance;
    return h;
}

/// Box on the log parameters around the data scale. The noise floor keeps
/// the partition systems well conditioned on noise-free targets.
inline OptimizeOptions training_options(const Dataset& d, int max_iters)
{
    const Hyperparameters g = initial_guess(d);
    OptimizeOptions o;
    o.max_iters = max_iters;
    const Index p = d.dim();
    Vector lo(p + 2), hi(p + 2);
    lo[0] = std::log(g.signal_variance * 1e-3);
    hi[0] = std::log(g.signal_variance * 1e3);
    for (Index c = 0; c < p; ++c) {
        lo[c + 1] = std::log(g.lengthscales[c] * 1e-2);
        hi[c + 1] = std::log(g.lengthscales[c] * 1e2);
    }
    lo[p + 1] = std::log(g.signal_variance * 1e-6);
    hi[p + 1] = std::log(g.signal_variance);
    o.lower = lo;
    o.upper = hi;
    return o;
}

inline OptimizeResult fit_hyperparameters(const Dataset& d, int max_iters)
{
    return train_hyperparameters(d, initial_guess(d), training_options(d, max_iters));
}

struct HyperEntry {
    std::uint64_t seed = 0;
    Hyperparameters hyper;
    double lml = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline constexpr const char* hyper_file_format = "ogp-hyperparameters";

inline nlohmann::ordered_json hyper_file_json(const std::string& benchmark, const std::vector<HyperEntry>& entries)
{
    nlohmann::ordered_json j;
    j["format"] = hyper_file_format;
    j["version"] = 1;
    j["benchmark"] = benchmark;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json row;
        row["seed"] = e.seed;
        row["hyperparameters"] = hyper_to_json(e.hyper);
        row["lml"] = e.lml;
        row["iterations"] = e.iterations;
        row["converged"] = e.converged;
        arr.push_back(std::move(row));
    }
    j["entries"] = std::move(arr);
    return j;
}

/// Hyperparameters persisted by `train` for one seed.
inline Hyperparameters load_hyperparameters(const std::string& path, const std::string& benchmark, std::uint64_t seed)
{
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(ogp::detail::read_file(path));
    }
    catch (const std::exception& e) {
        throw ConfigError("hyper-file", e.what());
    }
    if (j.value("format", "") != hyper_file_format)
        throw ConfigError("hyper-file", path + " is not a hyperparameter file");
    if (j.value("benchmark", "") != benchmark)
        throw ConfigError("hyper-file", path + " was trained on '" + j.value("benchmark", "") + "', not '" + benchmark + "'");
    for (const auto& row : j.at("entries"))
        if (row.at("seed").get<std::uint64_t>() == seed)
            return hyper_from_json(row.at("hyperparameters"));
    throw ConfigError("hyper-file", path + " has no entry for seed " + std::to_string(seed));
}

/// Hyperparameters for one experiment cell: the persisted file when
/// given, else LML training on the initial set (or the heuristic guess
/// when training is switched off).
inline Hyperparameters resolve_hyperparameters(const ExperimentConfig& cfg, const Dataset& initial, std::uint64_t seed)
{
    Hyperparameters h;
    if (cfg.hyper_file)
        h = load_hyperparameters(*cfg.hyper_file, cfg.benchmark, seed);
    else if (cfg.train)
        h = fit_hyperparameters(initial, cfg.train_iters).hyper;
    else
        h = initial_guess(initial);
    if (h.dim() != initial.dim())
        throw ConfigError("hyper-file", "hyperparameters have " + std::to_string(h.dim()) + " lengthscales, data has "
                + std::to_string(initial.dim()) + " features");
    return h;
}

} // namespace ogp::harness
