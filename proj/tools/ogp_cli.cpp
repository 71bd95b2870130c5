// Command-line front end of the experiment harness.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical
// failure, 1 anything else.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ogp/harness/commands.hpp>

namespace {

using ogp::harness::ExperimentConfig;

/// Raw flag values; applied on top of the config file, then validated.
struct Flags {
    std::string config;
    std::string benchmark;
    std::vector<std::string> criteria;
    std::int64_t budget = 0;
    double var_threshold = 0.0;
    double err_threshold = 0.0;
    bool accept = false;
    bool no_accept = false;
    std::string seeds;
    std::int64_t initial_size = 0;
    std::int64_t stream_size = 0;
    bool no_train = false;
    int train_iters = 0;
    std::string hyper_file;
    std::string out;
    bool verify = false;
    std::string maps_dir;
    std::int64_t grid = 0;
    std::int64_t min_size = 0;
    std::vector<double> err_grid;
    std::int64_t repetitions = 0;
    std::vector<std::int64_t> bench_sizes;
    std::string data;
    std::string target_column;
    std::int64_t train_rows = 0;
    std::string params_file;
    std::int64_t baseline_size = 0;
    std::string mean_reference;
};

/// "0,1,2", "0-9" or a mix such as "0-4,10".
std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos)
            end = text.size();
        const std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty())
            throw ogp::ConfigError("seeds", "empty entry in '" + text + "'");
        try {
            const std::size_t dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
            }
            else {
                const std::uint64_t lo = std::stoull(item.substr(0, dash));
                const std::uint64_t hi = std::stoull(item.substr(dash + 1));
                if (hi < lo)
                    throw ogp::ConfigError("seeds", "descending range '" + item + "'");
                for (std::uint64_t s = lo; s <= hi; ++s)
                    out.push_back(s);
            }
        }
        catch (const std::logic_error&) {
            throw ogp::ConfigError("seeds", "cannot parse '" + item + "'");
        }
    }
    return out;
}

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    sub->add_option("--benchmark", f.benchmark,
        "himmelblau, rastrigin, six-hump-camel, rosenbrock, boston, concrete, csv, bouc-wen, tanks, van-der-pol, building");
    sub->add_option("--criterion", f.criteria, "prior-entropy, predictive-entropy, mean-relevance, mll, lpd or all")
        ->delimiter(',');
    sub->add_option("--budget", f.budget, "maximum number of stored points");
    sub->add_option("--var-threshold", f.var_threshold, "insertion variance threshold");
    sub->add_option("--err-threshold", f.err_threshold, "insertion error threshold");
    sub->add_flag("--accept", f.accept, "run only with the acceptance criterion");
    sub->add_flag("--no-accept", f.no_accept, "run only without the acceptance criterion");
    sub->add_option("--seeds", f.seeds, "seed list, e.g. 0-9 or 1,5,7");
    sub->add_option("--initial-size", f.initial_size, "initial training points");
    sub->add_option("--stream-size", f.stream_size, "streamed points after the initial set");
    sub->add_flag("--no-train", f.no_train, "skip LML training and use the data-scaled initial guess");
    sub->add_option("--train-iters", f.train_iters, "maximum optimizer iterations");
    sub->add_option("--hyper-file", f.hyper_file, "hyperparameters written by 'train'");
    sub->add_option("--out", f.out, "output file (.csv or .json)");
    sub->add_flag("--verify", f.verify, "check removals against a brute-force oracle for N <= 12");
    sub->add_option("--maps-dir", f.maps_dir, "directory for spatial selection maps");
    sub->add_option("--grid", f.grid, "evaluation grid points per axis for function benchmarks");
    sub->add_option("--min-size", f.min_size, "smallest dataset size of a reduction sweep");
    sub->add_option("--err-grid", f.err_grid, "error thresholds of a sweep")->delimiter(',');
    sub->add_option("--repetitions", f.repetitions, "timing repetitions");
    sub->add_option("--bench-sizes", f.bench_sizes, "dataset sizes to time")->delimiter(',');
    sub->add_option("--data", f.data, "CSV file of a tabular benchmark");
    sub->add_option("--target-column", f.target_column, "target column of the CSV file");
    sub->add_option("--train-rows", f.train_rows, "training rows of the CSV file");
    sub->add_option("--params-file", f.params_file, "system parameter file");
    sub->add_option("--baseline-size", f.baseline_size, "maximum size of the full-GP baseline");
    sub->add_option("--mean-reference", f.mean_reference, "mean relevance reference: model or target");
}

ExperimentConfig build_config(const CLI::App* sub, const Flags& f)
{
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    ExperimentConfig cfg;
    if (given("--config"))
        cfg = ogp::harness::load_config_file(f.config);
    if (given("--benchmark"))
        cfg.benchmark = f.benchmark;
    if (given("--criterion"))
        cfg.criteria = ogp::harness::detail::parse_criteria_list(f.criteria, "criterion");
    if (given("--budget"))
        cfg.budget = f.budget;
    if (given("--var-threshold"))
        cfg.var_threshold = f.var_threshold;
    if (given("--err-threshold"))
        cfg.err_threshold = f.err_threshold;
    if (f.accept && f.no_accept)
        throw ogp::ConfigError("accept", "--accept and --no-accept are exclusive");
    if (f.accept)
        cfg.accept = true;
    if (f.no_accept)
        cfg.accept = false;
    if (given("--seeds"))
        cfg.seeds = parse_seeds(f.seeds);
    if (given("--initial-size"))
        cfg.initial_size = f.initial_size;
    if (given("--stream-size"))
        cfg.stream_size = f.stream_size;
    if (f.no_train)
        cfg.train = false;
    if (given("--train-iters"))
        cfg.train_iters = f.train_iters;
    if (given("--hyper-file"))
        cfg.hyper_file = f.hyper_file;
    if (given("--out"))
        cfg.out = f.out;
    if (f.verify)
        cfg.verify = true;
    if (given("--maps-dir"))
        cfg.maps_dir = f.maps_dir;
    if (given("--grid"))
        cfg.grid = f.grid;
    if (given("--min-size"))
        cfg.min_size = f.min_size;
    if (given("--err-grid"))
        cfg.err_grid = f.err_grid;
    if (given("--repetitions"))
        cfg.repetitions = f.repetitions;
    if (given("--bench-sizes"))
        cfg.bench_sizes = f.bench_sizes;
    if (given("--data"))
        cfg.data_path = f.data;
    if (given("--target-column"))
        cfg.target_column = f.target_column;
    if (given("--train-rows"))
        cfg.train_rows = f.train_rows;
    if (given("--params-file"))
        cfg.params_file = f.params_file;
    if (given("--baseline-size"))
        cfg.baseline_size = f.baseline_size;
    if (given("--mean-reference"))
        cfg.mean_reference = ogp::harness::detail::parse_mean_reference(f.mean_reference);
    cfg.validate();
    return cfg;
}

int run(const std::string& command, const ExperimentConfig& cfg)
{
    namespace h = ogp::harness;
    if (command == "generate") {
        for (const auto& path : h::cmd_generate(cfg))
            std::cout << "wrote " << path << "\n";
        return 0;
    }
    if (command == "train") {
        for (const auto& e : h::cmd_train(cfg))
            std::cout << "seed " << e.seed << ": lml " << ogp::format_double(e.lml) << " after " << e.iterations
                      << " iterations" << (e.converged ? "" : " (not converged)") << "\n";
        std::cout << "wrote " << cfg.out << "\n";
        return 0;
    }
    std::vector<ogp::ResultRecord> records;
    if (command == "reduce-sweep")
        records = h::cmd_reduce_sweep(cfg);
    else if (command == "accept-eval")
        records = h::cmd_accept_eval(cfg);
    else if (command == "online-eval")
        records = h::cmd_online_eval(cfg);
    else if (command == "threshold-sweep")
        records = h::cmd_threshold_sweep(cfg);
    else if (command == "bench")
        records = h::cmd_bench(cfg);
    h::write_outputs(command, cfg, records);
    std::cout << "wrote " << records.size() << " records to " << cfg.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Budget-constrained online Gaussian process experiments"};
    app.require_subcommand(1);

    const std::vector<std::pair<const char*, const char*>> commands{
        {"generate", "write a benchmark dataset with metadata"},
        {"train", "fit hyperparameters on the initial set and persist them"},
        {"reduce-sweep", "offline reduction down to min-size, SMSE per size"},
        {"accept-eval", "stream with and without acceptance, no insertion gate"},
        {"online-eval", "stream with one insertion threshold"},
        {"threshold-sweep", "stream over a grid of error thresholds plus a full-GP baseline"},
        {"bench", "median time of one partition evaluation"},
    };
    Flags flags;
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, flags);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const CLI::App* sub = nullptr;
    for (const CLI::App* s : subs)
        if (s->parsed())
            sub = s;

    try {
        return run(sub->get_name(), build_config(sub, flags));
    }
    catch (const ogp::InvalidArgument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    catch (const ogp::IngestionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    catch (const ogp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    catch (const ogp::OptimizationError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    catch (const ogp::SimulationError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
