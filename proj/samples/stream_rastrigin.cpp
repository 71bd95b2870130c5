// Streams 500 Rastrigin samples into a 100-point online GP and prints the
// validation SMSE with and without the acceptance criterion.

#include <iostream>
#include <vector>

#include <ogp.hpp>
#include <ogp/harness/training.hpp>

int main()
{
    using namespace ogp;

    const Dataset all = sample_uniform(BenchmarkFunction::Rastrigin, 600, 7);
    const NormalizationStats stats = [&] {
        NormalizationStats s = normalize_fit(all);
        s.feature_means.setZero();
        s.feature_stds.setOnes();
        return s;
    }();
    const Dataset train = normalize_apply(stats, all);
    const Dataset grid = normalize_apply(stats, evaluation_grid(BenchmarkFunction::Rastrigin, 40));

    const Dataset initial = train.slice(0, 100);
    std::vector<Point> stream;
    for (Index i = 100; i < train.size(); ++i)
        stream.push_back({train.input(i), train.target(i)});

    // bounded training keeps the noise variance away from zero on noise-free targets
    const Hyperparameters hyper = harness::fit_hyperparameters(initial, 100).hyper;

    for (bool accept : {false, true}) {
        OnlineConfig cfg;
        cfg.budget = 100;
        cfg.criterion = CriterionKind::MarginalLogLikelihood;
        cfg.use_acceptance = accept;
        OnlineGp model(initial, hyper, cfg);
        const StreamResult r = run_stream(model, stream, grid);
        std::cout << (accept ? "with acceptance:    " : "without acceptance: ") << "SMSE "
                  << *r.summary.initial_smse << " -> " << *r.summary.smse << ", revised " << *r.summary.revised
                  << ", accepted " << *r.summary.acceptance_pct << "%\n";
    }
}
