#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ogp/criteria.hpp>
#include <ogp/csv.hpp>
#include <ogp/error.hpp>
#include <ogp/functions.hpp>
#include <ogp/simulate.hpp>

namespace ogp::harness {

enum class BenchmarkKind { Function, Tabular, System };

/// Everything a harness command needs. Keys in JSON config files use the
/// same kebab-case names as the command-line flags.
struct ExperimentConfig {
    std::string benchmark = "rastrigin";
    std::vector<CriterionKind> criteria{
        CriterionKind::PriorEntropy, CriterionKind::MeanRelevance, CriterionKind::MarginalLogLikelihood};
    std::int64_t budget = 100;
    std::optional<double> var_threshold;
    std::optional<double> err_threshold;
    /// Unset runs both modes where a command compares them.
    std::optional<bool> accept;
    std::vector<std::uint64_t> seeds{0};
    std::int64_t initial_size = 100;
    /// Streamed points after the initial set; unset streams the whole
    /// training remainder (functions default to 500).
    std::optional<std::int64_t> stream_size;
    bool train = true;
    int train_iters = 100;
    std::optional<std::string> hyper_file;
    std::string out = "results.csv";
    bool verify = false;
    std::optional<std::string> maps_dir;
    std::int64_t grid = 50;
    std::int64_t min_size = 1;
    std::vector<double> err_grid;
    std::int64_t repetitions = 1000;
    std::vector<std::int64_t> bench_sizes{20, 100};
    std::optional<std::string> data_path;
    std::string target_column = "target";
    /// Training rows of a tabular file; unset uses the first 90%.
    std::optional<std::int64_t> train_rows;
    std::optional<std::string> params_file;
    std::int64_t baseline_size = 1000;
    MeanReference mean_reference = MeanReference::Model;

    void validate() const;
};

inline BenchmarkKind benchmark_kind(const std::string& name)
{
    if (name == "boston" || name == "concrete" || name == "csv")
        return BenchmarkKind::Tabular;
    for (auto s : {System::BoucWen, System::Tanks, System::VanDerPol, System::Building})
        if (name == to_string(s))
            return BenchmarkKind::System;
    for (auto f : {BenchmarkFunction::Himmelblau, BenchmarkFunction::Rastrigin, BenchmarkFunction::SixHumpCamel,
             BenchmarkFunction::Rosenbrock})
        if (name == to_string(f))
            return BenchmarkKind::Function;
    throw ConfigError("benchmark", "unknown benchmark '" + name + "'");
}

inline void ExperimentConfig::validate() const
{
    const BenchmarkKind kind = benchmark_kind(benchmark);
    if (criteria.empty())
        throw ConfigError("criterion", "at least one criterion is required");
    if (seeds.empty())
        throw ConfigError("seeds", "at least one seed is required");
    if (budget < 1)
        throw ConfigError("budget", "must be at least 1");
    if (var_threshold && !(*var_threshold >= 0.0))
        throw ConfigError("var-threshold", "must be non-negative");
    if (err_threshold && !(*err_threshold >= 0.0))
        throw ConfigError("err-threshold", "must be non-negative");
    if (initial_size < 2)
        throw ConfigError("initial-size", "must be at least 2");
    if (stream_size && *stream_size < 0)
        throw ConfigError("stream-size", "must be non-negative");
    if (train_iters < 0)
        throw ConfigError("train-iters", "must be non-negative");
    if (out.empty())
        throw ConfigError("out", "output path is required");
    if (grid < 2)
        throw ConfigError("grid", "must be at least 2");
    if (min_size < 1)
        throw ConfigError("min-size", "must be at least 1");
    for (double e : err_grid)
        if (!(e >= 0.0))
            throw ConfigError("err-grid", "thresholds must be non-negative");
    if (repetitions < 1)
        throw ConfigError("repetitions", "must be at least 1");
    if (bench_sizes.empty())
        throw ConfigError("bench-sizes", "at least one size is required");
    for (auto n : bench_sizes)
        if (n < 2)
            throw ConfigError("bench-sizes", "sizes must be at least 2");
    if (kind == BenchmarkKind::Tabular && !data_path)
        throw ConfigError("data", "tabular benchmark '" + benchmark + "' needs a CSV path");
    if (train_rows && *train_rows < initial_size)
        throw ConfigError("train-rows", "must be at least the initial size");
    if (baseline_size < 2)
        throw ConfigError("baseline-size", "must be at least 2");
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception& e) {
        throw ConfigError(key, std::string("bad value: ") + e.what());
    }
}

inline std::vector<CriterionKind> parse_criteria_list(const std::vector<std::string>& names, const char* field)
{
    std::vector<CriterionKind> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.assign(all_criteria.begin(), all_criteria.end());
            continue;
        }
        try {
            out.push_back(parse_criterion(n));
        }
        catch (const InvalidArgument& e) {
            throw ConfigError(field, e.what());
        }
    }
    return out;
}

inline MeanReference parse_mean_reference(const std::string& s)
{
    if (s == "model")
        return MeanReference::Model;
    if (s == "target")
        return MeanReference::Target;
    throw ConfigError("mean-reference", "expected 'model' or 'target', got '" + s + "'");
}

} // namespace detail

/// Applies the keys present in `j` on top of `cfg`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j)
{
    using detail::get_field;
    if (!j.is_object())
        throw ConfigError("config", "top level must be an object");
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        auto opt_double = [&]() -> std::optional<double> {
            if (value.is_null())
                return std::nullopt;
            return get_field<double>(j, k);
        };
        auto opt_string = [&]() -> std::optional<std::string> {
            if (value.is_null())
                return std::nullopt;
            return get_field<std::string>(j, k);
        };
        auto opt_int = [&]() -> std::optional<std::int64_t> {
            if (value.is_null())
                return std::nullopt;
            return get_field<std::int64_t>(j, k);
        };
        if (key == "benchmark")
            cfg.benchmark = get_field<std::string>(j, k);
        else if (key == "criterion" || key == "criteria") {
            if (value.is_string())
                cfg.criteria = detail::parse_criteria_list({value.get<std::string>()}, k);
            else
                cfg.criteria = detail::parse_criteria_list(get_field<std::vector<std::string>>(j, k), k);
        }
        else if (key == "budget")
            cfg.budget = get_field<std::int64_t>(j, k);
        else if (key == "var-threshold")
            cfg.var_threshold = opt_double();
        else if (key == "err-threshold")
            cfg.err_threshold = opt_double();
        else if (key == "accept")
            cfg.accept = value.is_null() ? std::nullopt : std::optional<bool>(get_field<bool>(j, k));
        else if (key == "seeds")
            cfg.seeds = get_field<std::vector<std::uint64_t>>(j, k);
        else if (key == "initial-size")
            cfg.initial_size = get_field<std::int64_t>(j, k);
        else if (key == "stream-size")
            cfg.stream_size = opt_int();
        else if (key == "train")
            cfg.train = get_field<bool>(j, k);
        else if (key == "train-iters")
            cfg.train_iters = get_field<int>(j, k);
        else if (key == "hyper-file")
            cfg.hyper_file = opt_string();
        else if (key == "out")
            cfg.out = get_field<std::string>(j, k);
        else if (key == "verify")
            cfg.verify = get_field<bool>(j, k);
        else if (key == "maps-dir")
            cfg.maps_dir = opt_string();
        else if (key == "grid")
            cfg.grid = get_field<std::int64_t>(j, k);
        else if (key == "min-size")
            cfg.min_size = get_field<std::int64_t>(j, k);
        else if (key == "err-grid")
            cfg.err_grid = get_field<std::vector<double>>(j, k);
        else if (key == "repetitions")
            cfg.repetitions = get_field<std::int64_t>(j, k);
        else if (key == "bench-sizes")
            cfg.bench_sizes = get_field<std::vector<std::int64_t>>(j, k);
        else if (key == "data")
            cfg.data_path = opt_string();
        else if (key == "target-column")
            cfg.target_column = get_field<std::string>(j, k);
        else if (key == "train-rows")
            cfg.train_rows = opt_int();
        else if (key == "params-file")
            cfg.params_file = opt_string();
        else if (key == "baseline-size")
            cfg.baseline_size = get_field<std::int64_t>(j, k);
        else if (key == "mean-reference")
            cfg.mean_reference = detail::parse_mean_reference(get_field<std::string>(j, k));
        else
            throw ConfigError(key, "unknown configuration key");
    }
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {})
{
    std::string text;
    try {
        text = ogp::detail::read_file(path);
    }
    catch (const Error& e) {
        throw ConfigError("config", e.what());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", std::string("cannot parse ") + path + ": " + e.what());
    }
    apply_json(base, j);
    return base;
}

/// The effective configuration, written next to every result file.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c)
{
    nlohmann::ordered_json j;
    auto opt = [](const auto& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
    j["benchmark"] = c.benchmark;
    std::vector<std::string> crit;
    for (auto k : c.criteria)
        crit.emplace_back(to_string(k));
    j["criteria"] = crit;
    j["budget"] = c.budget;
    j["var-threshold"] = opt(c.var_threshold);
    j["err-threshold"] = opt(c.err_threshold);
    j["accept"] = opt(c.accept);
    j["seeds"] = c.seeds;
    j["initial-size"] = c.initial_size;
    j["stream-size"] = opt(c.stream_size);
    j["train"] = c.train;
    j["train-iters"] = c.train_iters;
    j["hyper-file"] = opt(c.hyper_file);
    j["out"] = c.out;
    j["verify"] = c.verify;
    j["maps-dir"] = opt(c.maps_dir);
    j["grid"] = c.grid;
    j["min-size"] = c.min_size;
    j["err-grid"] = c.err_grid;
    j["repetitions"] = c.repetitions;
    j["bench-sizes"] = c.bench_sizes;
    j["data"] = opt(c.data_path);
    j["target-column"] = c.target_column;
    j["train-rows"] = opt(c.train_rows);
    j["params-file"] = opt(c.params_file);
    j["baseline-size"] = c.baseline_size;
    j["mean-reference"] = c.mean_reference == MeanReference::Model ? "model" : "target";
    return j;
}

/// Acceptance modes a comparison command runs.
inline std::vector<bool> accept_modes(const ExperimentConfig& c)
{
    if (c.accept)
        return {*c.accept};
    return {false, true};
}

} // namespace ogp::harness
