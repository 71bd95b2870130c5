#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ogp/csv.hpp>
#include <ogp/functions.hpp>
#include <ogp/harness/config.hpp>
#include <ogp/lag.hpp>
#include <ogp/normalize.hpp>
#include <ogp/params.hpp>
#include <ogp/simulate.hpp>

namespace ogp::harness {

/// splitmix64 of (seed, stream): independent generator seeds per use.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// A benchmark before normalization: the training split in arrival
/// order and a held-out validation set.
struct RawBenchmark {
    std::string name;
    Dataset train;
    Dataset validation;
    std::vector<std::string> feature_names;
    std::string target_name = "y";
    /// Function benchmarks keep their native box; everything else is z-scored.
    bool scale_inputs = true;
    std::optional<ParameterFile> params;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

/// Normalized splits used by the experiment commands.
struct PreparedBenchmark {
    std::string name;
    Dataset train;
    Dataset initial;
    Dataset stream;
    Dataset validation;
    NormalizationStats stats;
    std::vector<std::string> feature_names;
};

inline constexpr std::int64_t default_function_stream = 500;

namespace detail {

inline ParameterFile system_parameters(System s, const ExperimentConfig& cfg)
{
    if (!cfg.params_file)
        return default_parameter_file(s);
    ParameterFile f;
    try {
        f = read_params(*cfg.params_file);
    }
    catch (const Error& e) {
        throw ConfigError("params-file", e.what());
    }
    if (f.system != s)
        throw ConfigError("params-file", "parameter file is for system '" + std::string(to_string(f.system))
                + "', benchmark is '" + std::string(to_string(s)) + "'");
    return f;
}

inline SimConfig sim_config(const ParameterFile& f, std::uint64_t seed)
{
    SimConfig c = f.sim;
    c.params = f.params;
    c.noise_scales = f.noise;
    c.seed = seed;
    return c;
}

inline std::vector<std::string> lag_feature_names(const LagSpec& lags, const std::vector<std::string>& inputs)
{
    std::vector<std::string> names;
    for (Index l = 1; l <= lags.n_y; ++l)
        names.push_back("y_lag" + std::to_string(l));
    for (std::size_t j = 0; j < inputs.size(); ++j)
        for (Index l = 1; l <= lags.n_u[j]; ++l)
            names.push_back(inputs[j] + "_lag" + std::to_string(l));
    return names;
}

/// 20 trajectories from uniform initial conditions in [-2, 2]^2.
inline Dataset van_der_pol_set(const ParameterFile& f, std::uint64_t seed, int trajectories = 20)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ic(-2.0, 2.0);
    std::vector<Dataset> parts;
    for (int k = 0; k < trajectories; ++k) {
        SimConfig c = sim_config(f, derive_seed(seed, static_cast<std::uint64_t>(k)));
        c.params["x0"] = ic(rng);
        c.params["v0"] = ic(rng);
        const SimResult r = simulate(System::VanDerPol, c);
        parts.push_back(lag_embed(r.y, {}, lag_preset(System::VanDerPol)));
    }
    return concatenate(parts);
}

inline std::vector<std::vector<double>> excitation(System s, Index samples, double dt, std::uint64_t seed)
{
    switch (s) {
    case System::BoucWen: return {multisine(samples, dt, seed, 50.0, 5.0, 150.0, 64)};
    case System::Tanks: return {random_steps(samples, seed, 2.0, 8.0, 25)};
    case System::Building: return {ambient_temperature(samples, dt, seed)};
    case System::VanDerPol: return {};
    }
    throw InvalidArgument("unknown system");
}

inline Dataset embed(System s, const SimResult& r)
{
    return lag_embed(r.y, r.u, lag_preset(s));
}

inline RawBenchmark system_benchmark(System s, const ExperimentConfig& cfg, std::uint64_t seed)
{
    RawBenchmark b;
    b.name = std::string(to_string(s));
    const ParameterFile f = system_parameters(s, cfg);
    b.params = f;
    const LagSpec lags = lag_preset(s);
    switch (s) {
    case System::VanDerPol:
        b.train = van_der_pol_set(f, derive_seed(seed, 100));
        b.validation = van_der_pol_set(f, derive_seed(seed, 200));
        b.feature_names = lag_feature_names(lags, {});
        break;
    case System::BoucWen:
    case System::Tanks: {
        const SimConfig c1 = sim_config(f, derive_seed(seed, 100));
        const SimConfig c2 = sim_config(f, derive_seed(seed, 200));
        b.train = embed(s, simulate(s, c1, excitation(s, c1.samples(), c1.dt, derive_seed(seed, 101))));
        b.validation = embed(s, simulate(s, c2, excitation(s, c2.samples(), c2.dt, derive_seed(seed, 201))));
        b.feature_names = lag_feature_names(lags, {"u"});
        break;
    }
    case System::Building: {
        // one simulated year, first half for training
        const SimConfig c = sim_config(f, derive_seed(seed, 100));
        const Dataset all = embed(s, simulate(s, c, excitation(s, c.samples(), c.dt, derive_seed(seed, 101))));
        auto [train, validation] = split_first(all, all.size() / 2);
        b.train = std::move(train);
        b.validation = std::move(validation);
        b.feature_names = lag_feature_names(lags, {"Ta", "mdot"});
        break;
    }
    }
    b.target_name = "dy";
    b.metadata["params_checksum"] = params_checksum(f);
    b.metadata["lags"] = {{"n_y", lags.n_y}, {"n_u", lags.n_u}};
    return b;
}

inline RawBenchmark tabular_benchmark(const ExperimentConfig& cfg)
{
    const TabularDataset t = load_csv_dataset(*cfg.data_path, cfg.target_column);
    const Dataset all = t.to_dataset();
    const Index rows = cfg.train_rows ? static_cast<Index>(*cfg.train_rows) : (all.size() * 9) / 10;
    if (rows >= all.size())
        throw ConfigError("train-rows", "leaves no validation rows out of " + std::to_string(all.size()));
    RawBenchmark b;
    b.name = cfg.benchmark;
    auto [train, validation] = split_first(all, rows);
    b.train = std::move(train);
    b.validation = std::move(validation);
    b.feature_names = t.feature_names;
    b.target_name = t.target_name;
    b.metadata["source"] = t.provenance.path;
    b.metadata["source_checksum"] = t.provenance.checksum;
    b.metadata["rejected_rows"] = t.rejected_rows;
    return b;
}

} // namespace detail

/// Materializes a benchmark for one seed. Tabular data ignores the seed.
inline RawBenchmark make_benchmark(const ExperimentConfig& cfg, std::uint64_t seed)
{
    switch (benchmark_kind(cfg.benchmark)) {
    case BenchmarkKind::Function: {
        const BenchmarkFunction f = parse_benchmark_function(cfg.benchmark);
        const std::int64_t stream = cfg.stream_size.value_or(default_function_stream);
        RawBenchmark b;
        b.name = cfg.benchmark;
        b.train = sample_uniform(f, static_cast<Index>(cfg.initial_size + stream), derive_seed(seed, 100));
        b.validation = evaluation_grid(f, static_cast<Index>(cfg.grid));
        b.feature_names = {"x1", "x2"};
        b.scale_inputs = false;
        return b;
    }
    case BenchmarkKind::System: return detail::system_benchmark(parse_system(cfg.benchmark), cfg, seed);
    case BenchmarkKind::Tabular: return detail::tabular_benchmark(cfg);
    }
    throw ConfigError("benchmark", "unknown benchmark kind");
}

/// Normalizes with statistics of the training split only, then splits it
/// into the initial set and the stream.
inline PreparedBenchmark prepare(const RawBenchmark& raw, const ExperimentConfig& cfg)
{
    if (raw.train.size() < cfg.initial_size)
        throw ConfigError("initial-size", std::to_string(cfg.initial_size) + " exceeds the "
                + std::to_string(raw.train.size()) + " training rows of " + raw.name);
    PreparedBenchmark p;
    p.name = raw.name;
    p.feature_names = raw.feature_names;
    p.stats = normalize_fit(raw.train, raw.name + ":train", raw.feature_names);
    if (!raw.scale_inputs) {
        p.stats.feature_means.setZero();
        p.stats.feature_stds.setOnes();
    }
    p.train = normalize_apply(p.stats, raw.train);
    p.validation = normalize_apply(p.stats, raw.validation);
    const Index initial = static_cast<Index>(cfg.initial_size);
    Index stream = p.train.size() - initial;
    if (cfg.stream_size)
        stream = std::min<Index>(stream, static_cast<Index>(*cfg.stream_size));
    p.initial = p.train.slice(0, initial);
    p.stream = p.train.slice(initial, stream);
    return p;
}

inline std::vector<Point> as_points(const Dataset& d)
{
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(d.size()));
    for (Index i = 0; i < d.size(); ++i)
        out.push_back({d.input(i), d.target(i)});
    return out;
}

} // namespace ogp::harness
