#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ogp/criteria.hpp>
#include <ogp/csv.hpp>
#include <ogp/gp.hpp>
#include <ogp/harness/benchmarks.hpp>
#include <ogp/harness/config.hpp>
#include <ogp/harness/training.hpp>
#include <ogp/harness/verify.hpp>
#include <ogp/metrics.hpp>
#include <ogp/online.hpp>
#include <ogp/params.hpp>
#include <ogp/record.hpp>
#include <ogp/results.hpp>

namespace ogp::harness {

namespace detail {

inline void ensure_parent(const std::string& path)
{
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
}

inline void write_file(const std::string& path, std::string_view text)
{
    ensure_parent(path);
    write_text_file(path, text);
}

/// `out` with the extension replaced, e.g. ("a/b.csv", ".meta.json") -> "a/b.meta.json".
inline std::string sibling(const std::string& out, const std::string& suffix)
{
    std::filesystem::path p(out);
    p.replace_extension();
    return p.string() + suffix;
}

inline ResultRecord base_record(const char* command, const ExperimentConfig& cfg, std::uint64_t seed)
{
    ResultRecord r;
    r.command = command;
    r.benchmark = cfg.benchmark;
    r.seed = static_cast<std::int64_t>(seed);
    r.budget = cfg.budget;
    return r;
}

struct Evaluation {
    double smse = 0.0;
    double mean_variance = 0.0;
};

inline Evaluation evaluate(const Dataset& train, const Hyperparameters& h, const Dataset& validation)
{
    const PosteriorCache cache = fit_cache(train, h);
    const Prediction p = predict(cache, train, h, validation.inputs());
    return {smse(p.mean, validation.targets()), p.variance.mean()};
}

inline void check_initial_budget(const ExperimentConfig& cfg)
{
    if (cfg.initial_size > cfg.budget)
        throw ConfigError("initial-size", "initial set of " + std::to_string(cfg.initial_size)
                + " points exceeds the budget of " + std::to_string(cfg.budget));
}

/// Prediction error and standard deviation over the validation grid plus
/// the stored points, in original units.
inline void write_maps(const std::string& dir, const std::string& stem, const OnlineGp& model,
    const PreparedBenchmark& prep)
{
    const Dataset& v = prep.validation;
    const Prediction p = model.predict(v.inputs());
    const Dataset raw_v = denormalize(prep.stats, v);
    std::string grid = "x1,x2,target,mean,error,std\n";
    for (Index r = 0; r < v.size(); ++r) {
        const double mean = p.mean[r] + prep.stats.target_mean;
        grid += format_double(raw_v.inputs()(r, 0)) + "," + format_double(raw_v.inputs()(r, 1)) + ","
            + format_double(raw_v.target(r)) + "," + format_double(mean) + "," + format_double(raw_v.target(r) - mean)
            + "," + format_double(std::sqrt(p.variance[r])) + "\n";
    }
    const Dataset stored = denormalize(prep.stats, model.dataset());
    std::string points = "x1,x2,y\n";
    for (Index r = 0; r < stored.size(); ++r)
        points += format_double(stored.inputs()(r, 0)) + "," + format_double(stored.inputs()(r, 1)) + ","
            + format_double(stored.target(r)) + "\n";
    const std::string base = (std::filesystem::path(dir) / stem).string();
    write_file(base + "_map.csv", grid);
    write_file(base + "_points.csv", points);
}

} // namespace detail

/// Writes the result table and the effective configuration next to it.
inline void write_outputs(const std::string& command, const ExperimentConfig& cfg, const std::vector<ResultRecord>& records)
{
    detail::ensure_parent(cfg.out);
    write_results(records, cfg.out, result_format_for(cfg.out));
    nlohmann::ordered_json meta;
    meta["command"] = command;
    meta["config"] = config_to_json(cfg);
    detail::write_file(cfg.out + ".config.json", meta.dump(1) + "\n");
}

/// Materializes the benchmark training and validation splits (original
/// units) with a metadata sidecar and, for simulated systems, the
/// parameter file. Multiple seeds get one file set each.
inline std::vector<std::string> cmd_generate(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<std::string> written;
    for (std::uint64_t seed : cfg.seeds) {
        const RawBenchmark raw = make_benchmark(cfg, seed);
        std::string out = cfg.out;
        if (cfg.seeds.size() > 1)
            out = detail::sibling(cfg.out, "_seed" + std::to_string(seed) + ".csv");
        const std::string train_csv = format_dataset_csv(raw.train, raw.feature_names, raw.target_name);
        const std::string val_csv = format_dataset_csv(raw.validation, raw.feature_names, raw.target_name);
        const std::string val_path = detail::sibling(out, ".validation.csv");
        detail::write_file(out, train_csv);
        detail::write_file(val_path, val_csv);
        written.push_back(out);
        written.push_back(val_path);

        nlohmann::ordered_json meta;
        meta["benchmark"] = raw.name;
        meta["seed"] = seed;
        meta["train_rows"] = raw.train.size();
        meta["validation_rows"] = raw.validation.size();
        meta["features"] = raw.feature_names;
        meta["target"] = raw.target_name;
        meta["train_file"] = std::filesystem::path(out).filename().string();
        meta["train_checksum"] = hex64(fnv1a64(train_csv));
        meta["validation_file"] = std::filesystem::path(val_path).filename().string();
        meta["validation_checksum"] = hex64(fnv1a64(val_csv));
        if (raw.params) {
            const std::string params_path = detail::sibling(out, ".params");
            detail::write_file(params_path, format_params(*raw.params));
            meta["params_file"] = std::filesystem::path(params_path).filename().string();
            written.push_back(params_path);
        }
        for (const auto& [k, v] : raw.metadata.items())
            meta[k] = v;
        meta["config"] = config_to_json(cfg);
        const std::string meta_path = detail::sibling(out, ".meta.json");
        detail::write_file(meta_path, meta.dump(1) + "\n");
        written.push_back(meta_path);
    }
    return written;
}

/// LML training on the initial set of every seed; persists a
/// hyperparameter file that later commands take via `hyper-file`.
inline std::vector<HyperEntry> cmd_train(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<HyperEntry> entries;
    for (std::uint64_t seed : cfg.seeds) {
        const PreparedBenchmark prep = prepare(make_benchmark(cfg, seed), cfg);
        const OptimizeResult r = fit_hyperparameters(prep.initial, cfg.train_iters);
        entries.push_back({seed, r.hyper, r.lml, r.iterations, r.converged});
    }
    detail::write_file(cfg.out, hyper_file_json(cfg.benchmark, entries).dump(1) + "\n");
    return entries;
}

/// Offline reduction: from the initial set, repeatedly delete the
/// argmin-scored point down to `min_size`, logging validation SMSE at
/// every size.
inline std::vector<ResultRecord> cmd_reduce_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<ResultRecord> out;
    for (std::uint64_t seed : cfg.seeds) {
        const PreparedBenchmark prep = prepare(make_benchmark(cfg, seed), cfg);
        const Hyperparameters h = resolve_hyperparameters(cfg, prep.initial, seed);
        for (CriterionKind kind : cfg.criteria) {
            Dataset d = prep.initial;
            auto log = [&] {
                const auto e = detail::evaluate(d, h, prep.validation);
                ResultRecord r = detail::base_record("reduce-sweep", cfg, seed);
                r.criterion = std::string(to_string(kind));
                r.budget = cfg.initial_size;
                r.size = d.size();
                r.smse = e.smse;
                r.mean_variance = e.mean_variance;
                out.push_back(std::move(r));
            };
            log();
            while (d.size() > cfg.min_size) {
                const RemovalChoice c = choose_removal(kind, d, h, std::nullopt, cfg.mean_reference);
                if (cfg.verify && d.size() <= 12)
                    verify_removal(kind, d, h, std::nullopt, cfg.mean_reference, c.index);
                d.remove(c.index);
                log();
            }
        }
    }
    return out;
}

namespace detail {

/// Streams the training remainder through one online GP per (seed,
/// criterion, accept mode).
template <typename Hook>
std::vector<ResultRecord> run_online(const char* command, const ExperimentConfig& cfg, Hook&& after_run)
{
    check_initial_budget(cfg);
    std::vector<ResultRecord> out;
    for (std::uint64_t seed : cfg.seeds) {
        const PreparedBenchmark prep = prepare(make_benchmark(cfg, seed), cfg);
        const Hyperparameters h = resolve_hyperparameters(cfg, prep.initial, seed);
        const std::vector<Point> stream = as_points(prep.stream);
        for (CriterionKind kind : cfg.criteria)
            for (bool accept : accept_modes(cfg)) {
                OnlineConfig oc;
                oc.budget = static_cast<Index>(cfg.budget);
                oc.var_threshold = cfg.var_threshold;
                oc.err_threshold = cfg.err_threshold;
                oc.criterion = kind;
                oc.use_acceptance = accept;
                oc.mean_reference = cfg.mean_reference;
                OnlineGp model(prep.initial, h, oc);
                StreamResult res = run_stream(model, stream, prep.validation);
                ResultRecord r = std::move(res.summary);
                r.command = command;
                r.benchmark = cfg.benchmark;
                r.seed = static_cast<std::int64_t>(seed);
                after_run(model, prep, seed, kind, accept);
                out.push_back(std::move(r));
            }
    }
    return out;
}

} // namespace detail

/// Insertion gate off; every criterion with and without acceptance.
/// Writes spatial selection maps for two-dimensional benchmarks when
/// `maps-dir` is set.
inline std::vector<ResultRecord> cmd_accept_eval(ExperimentConfig cfg)
{
    cfg.validate();
    if (cfg.var_threshold || cfg.err_threshold)
        throw ConfigError("var-threshold", "accept-eval runs without insertion thresholds");
    return detail::run_online("accept-eval", cfg,
        [&](const OnlineGp& model, const PreparedBenchmark& prep, std::uint64_t seed, CriterionKind kind, bool accept) {
            if (!cfg.maps_dir || prep.validation.dim() != 2)
                return;
            const std::string stem = cfg.benchmark + "_" + std::string(to_string(kind)) + (accept ? "_accept" : "_normal")
                + "_seed" + std::to_string(seed);
            detail::write_maps(*cfg.maps_dir, stem, model, prep);
        });
}

/// Exactly one insertion threshold active; every criterion with and
/// without acceptance.
inline std::vector<ResultRecord> cmd_online_eval(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.var_threshold.has_value() == cfg.err_threshold.has_value())
        throw ConfigError(cfg.var_threshold ? "err-threshold" : "var-threshold",
            "online-eval needs exactly one of var-threshold and err-threshold");
    return detail::run_online("online-eval", cfg, [](auto&&...) {});
}

inline std::vector<double> default_err_grid(const std::string& benchmark)
{
    if (benchmark == "van-der-pol")
        return {0.0005, 0.001, 0.0025, 0.005, 0.0075, 0.01, 0.015};
    if (benchmark == "building")
        return {0.05, 0.1, 0.15, 0.2, 0.25};
    return {};
}

/// Error-threshold sweep plus one full-GP baseline row per seed (the
/// whole training split, or a random subsample of `baseline-size` rows
/// when it is larger).
inline std::vector<ResultRecord> cmd_threshold_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.var_threshold)
        throw ConfigError("var-threshold", "threshold-sweep varies only the error threshold");
    std::vector<double> grid = cfg.err_grid.empty() ? default_err_grid(cfg.benchmark) : cfg.err_grid;
    if (grid.empty())
        throw ConfigError("err-grid", "no default error grid for '" + cfg.benchmark + "'");
    detail::check_initial_budget(cfg);

    std::vector<ResultRecord> out;
    for (std::uint64_t seed : cfg.seeds) {
        const PreparedBenchmark prep = prepare(make_benchmark(cfg, seed), cfg);
        const Hyperparameters h = resolve_hyperparameters(cfg, prep.initial, seed);

        Dataset base = prep.train;
        if (base.size() > cfg.baseline_size) {
            std::vector<Index> idx(static_cast<std::size_t>(base.size()));
            for (Index i = 0; i < base.size(); ++i)
                idx[static_cast<std::size_t>(i)] = i;
            std::mt19937_64 rng(derive_seed(seed, 300));
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<std::size_t>(cfg.baseline_size));
            std::sort(idx.begin(), idx.end());
            Matrix x(cfg.baseline_size, base.dim());
            Vector y(cfg.baseline_size);
            for (Index r = 0; r < cfg.baseline_size; ++r) {
                x.row(r) = base.inputs().row(idx[static_cast<std::size_t>(r)]);
                y[r] = base.target(idx[static_cast<std::size_t>(r)]);
            }
            base = Dataset(std::move(x), std::move(y));
        }
        const auto e0 = detail::evaluate(prep.initial, h, prep.validation);
        const auto eb = detail::evaluate(base, h, prep.validation);
        ResultRecord b = detail::base_record("threshold-sweep", cfg, seed);
        b.criterion = "baseline";
        b.budget = base.size();
        b.size = base.size();
        b.initial_smse = e0.smse;
        b.smse = eb.smse;
        b.mean_variance = eb.mean_variance;
        out.push_back(std::move(b));

        const std::vector<Point> stream = as_points(prep.stream);
        for (double e : grid)
            for (CriterionKind kind : cfg.criteria)
                for (bool accept : accept_modes(cfg)) {
                    OnlineConfig oc;
                    oc.budget = static_cast<Index>(cfg.budget);
                    oc.err_threshold = e;
                    oc.criterion = kind;
                    oc.use_acceptance = accept;
                    oc.mean_reference = cfg.mean_reference;
                    OnlineGp model(prep.initial, h, oc);
                    ResultRecord r = run_stream(model, stream, prep.validation).summary;
                    r.command = "threshold-sweep";
                    r.benchmark = cfg.benchmark;
                    r.seed = static_cast<std::int64_t>(seed);
                    out.push_back(std::move(r));
                }
    }
    return out;
}

/// Operation-count model of one partition evaluation.
inline std::string complexity_polynomial(CriterionKind kind)
{
    switch (kind) {
    case CriterionKind::PriorEntropy: return "N^3/6 + N^2 + N";
    case CriterionKind::PredictiveEntropy: return "N^3/6 + 3/2 N^2 + 2N";
    case CriterionKind::MeanRelevance: return "N^3/6 + 2N^2 + 3N";
    case CriterionKind::LogPredictiveDensity: return "N^3/6 + 5/2 N^2 + 3N";
    case CriterionKind::MarginalLogLikelihood: return "N^3/6 + 2N^2 + 2N";
    }
    throw InvalidArgument("unknown criterion kind");
}

inline double complexity_ops(CriterionKind kind, double n)
{
    const double cube = n * n * n / 6.0;
    switch (kind) {
    case CriterionKind::PriorEntropy: return cube + n * n + n;
    case CriterionKind::PredictiveEntropy: return cube + 1.5 * n * n + 2.0 * n;
    case CriterionKind::MeanRelevance: return cube + 2.0 * n * n + 3.0 * n;
    case CriterionKind::LogPredictiveDensity: return cube + 2.5 * n * n + 3.0 * n;
    case CriterionKind::MarginalLogLikelihood: return cube + 2.0 * n * n + 2.0 * n;
    }
    throw InvalidArgument("unknown criterion kind");
}

/// Median wall time of a single partition evaluation (kernel matrix,
/// factorization, score) on a random dataset of each size.
inline std::vector<ResultRecord> cmd_bench(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<ResultRecord> out;
    const std::uint64_t seed = cfg.seeds.front();
    for (std::int64_t n : cfg.bench_sizes) {
        const Dataset d = sample_uniform(BenchmarkFunction::Rastrigin, static_cast<Index>(n),
            derive_seed(seed, 400 + static_cast<std::uint64_t>(n)));
        const Hyperparameters h = initial_guess(d);
        const Dataset c = sample_uniform(BenchmarkFunction::Rastrigin, 1, derive_seed(seed, 500));
        const Point candidate{c.input(0), c.target(0)};
        for (CriterionKind kind : cfg.criteria) {
            std::vector<double> ms;
            ms.reserve(static_cast<std::size_t>(cfg.repetitions));
            double sink = 0.0;
            for (std::int64_t rep = 0; rep < cfg.repetitions; ++rep) {
                const auto t0 = std::chrono::steady_clock::now();
                PartitionScorer scorer(d, h, candidate, cfg.mean_reference);
                sink += scorer.score(kind, static_cast<Index>(rep % n));
                const auto t1 = std::chrono::steady_clock::now();
                ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
            if (!std::isfinite(sink))
                throw NumericalError("benchmark produced a non-finite score");
            const auto mid = ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2);
            std::nth_element(ms.begin(), mid, ms.end());
            double median = *mid;
            if (ms.size() % 2 == 0)
                median = 0.5 * (median + *std::max_element(ms.begin(), mid));
            ResultRecord r = detail::base_record("bench", cfg, seed);
            r.benchmark = "random";
            r.criterion = std::string(to_string(kind));
            r.budget = n;
            r.size = n;
            r.repetitions = cfg.repetitions;
            r.median_ms = median;
            r.complexity = complexity_polynomial(kind);
            r.op_count = complexity_ops(kind, static_cast<double>(n));
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace ogp::harness
