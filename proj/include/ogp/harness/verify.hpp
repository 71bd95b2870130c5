#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <ogp/criteria.hpp>
#include <ogp/gp.hpp>

namespace ogp::harness {

class VerificationError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

/// Reduction score computed by materializing D_/i and going through the
/// public GP API only; shares no code with PartitionScorer.
inline double naive_reduction_score(CriterionKind kind, const Dataset& d, const Hyperparameters& h, Index i,
    const std::optional<Point>& candidate, MeanReference ref = MeanReference::Model)
{
    Dataset part = d;
    if (candidate)
        part.replace(i, candidate->x, candidate->y);
    else
        part.remove(i);
    const Vector xi = d.input(i);
    const double yi = d.target(i);

    double mean = 0.0, var = h.signal_variance, log_det = 0.0, lml = 0.0;
    if (!part.empty()) {
        const PosteriorCache cache = fit_cache(part, h);
        std::tie(mean, var) = predict_point(cache, part, h, xi);
        log_det = cache.factor().log_det();
        lml = log_marginal_likelihood(cache, part, h);
    }
    switch (kind) {
    case CriterionKind::PriorEntropy: return -gaussian_entropy(part.size(), log_det);
    case CriterionKind::MarginalLogLikelihood: return lml;
    case CriterionKind::PredictiveEntropy: return gaussian_entropy(1, std::log(var));
    case CriterionKind::LogPredictiveDensity: {
        const double s = var + h.noise_variance;
        return 0.5 * std::log(2.0 * std::numbers::pi * s) + (yi - mean) * (yi - mean) / (2.0 * s);
    }
    case CriterionKind::MeanRelevance: {
        const double r = ref == MeanReference::Model ? predict_point(fit_cache(d, h), d, h, xi).first : yi;
        return (r - mean) * (r - mean);
    }
    }
    throw InvalidArgument("unknown criterion kind");
}

inline std::vector<double> naive_reduction_scores(CriterionKind kind, const Dataset& d, const Hyperparameters& h,
    const std::optional<Point>& candidate, MeanReference ref = MeanReference::Model)
{
    std::vector<double> out;
    for (Index i = 0; i < d.size(); ++i)
        out.push_back(naive_reduction_score(kind, d, h, i, candidate, ref));
    return out;
}

/// Checks a removal decision against the brute-force argmin. A different
/// index is tolerated only when the two naive scores tie to 1e-9 relative.
inline void verify_removal(CriterionKind kind, const Dataset& d, const Hyperparameters& h,
    const std::optional<Point>& candidate, MeanReference ref, Index chosen)
{
    const std::vector<double> naive = naive_reduction_scores(kind, d, h, candidate, ref);
    const Index best = argmin(naive);
    if (best == chosen)
        return;
    const double a = naive[static_cast<std::size_t>(best)], b = naive[static_cast<std::size_t>(chosen)];
    if (std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
        return;
    throw VerificationError(std::string("removal check failed for ") + std::string(to_string(kind)) + " at N="
        + std::to_string(d.size()) + ": chose " + std::to_string(chosen) + ", brute force gives " + std::to_string(best));
}

} // namespace ogp::harness
