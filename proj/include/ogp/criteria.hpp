#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <ogp/gp.hpp>

namespace ogp {

/// Reduction criteria. Algorithm: the partition with the lowest score
/// loses its datapoint.
enum class CriterionKind {
    PriorEntropy,
    PredictiveEntropy,
    MeanRelevance,
    MarginalLogLikelihood,
    LogPredictiveDensity,
};

inline constexpr std::array<CriterionKind, 5> all_criteria{
    CriterionKind::PriorEntropy,
    CriterionKind::PredictiveEntropy,
    CriterionKind::MeanRelevance,
    CriterionKind::MarginalLogLikelihood,
    CriterionKind::LogPredictiveDensity,
};

/// Acceptance criteria: a candidate is accepted when its score exceeds
/// the minimum score over the stored rows.
enum class AcceptanceKind {
    Variance,
    SquaredError,
    NegativeLogPredictiveDensity,
};

inline AcceptanceKind acceptance_pairing(CriterionKind kind)
{
    switch (kind) {
    case CriterionKind::PriorEntropy:
    case CriterionKind::PredictiveEntropy:
        return AcceptanceKind::Variance;
    case CriterionKind::MeanRelevance:
        return AcceptanceKind::SquaredError;
    case CriterionKind::MarginalLogLikelihood:
    case CriterionKind::LogPredictiveDensity:
        return AcceptanceKind::NegativeLogPredictiveDensity;
    }
    throw InvalidArgument("unknown criterion kind");
}

inline std::string_view to_string(CriterionKind kind)
{
    switch (kind) {
    case CriterionKind::PriorEntropy: return "prior-entropy";
    case CriterionKind::PredictiveEntropy: return "predictive-entropy";
    case CriterionKind::MeanRelevance: return "mean-relevance";
    case CriterionKind::MarginalLogLikelihood: return "mll";
    case CriterionKind::LogPredictiveDensity: return "lpd";
    }
    return "unknown";
}

inline std::string_view to_string(AcceptanceKind kind)
{
    switch (kind) {
    case AcceptanceKind::Variance: return "variance";
    case AcceptanceKind::SquaredError: return "squared-error";
    case AcceptanceKind::NegativeLogPredictiveDensity: return "negative-lpd";
    }
    return "unknown";
}

inline CriterionKind parse_criterion(std::string_view name)
{
    for (auto kind : all_criteria)
        if (name == to_string(kind))
            return kind;
    if (name == "marginal-log-likelihood")
        return CriterionKind::MarginalLogLikelihood;
    if (name == "log-predictive-density")
        return CriterionKind::LogPredictiveDensity;
    throw InvalidArgument("unknown criterion '" + std::string(name) + "'");
}

/// Reference value for Mean Relevance: the full model's prediction at x_i
/// (default) or the stored target y_i.
enum class MeanReference { Model, Target };

/// D_/i: the base dataset with row i replaced by the candidate, or with
/// row i deleted when no candidate is given.
class PartitionView {
public:
    static PartitionView replace(const Dataset& base, Index i, Point candidate)
    {
        check(base, i);
        if (candidate.x.size() != base.dim())
            throw InvalidArgument("candidate dimension does not match dataset");
        return PartitionView(base, i, std::move(candidate));
    }

    static PartitionView remove(const Dataset& base, Index i)
    {
        check(base, i);
        return PartitionView(base, i, std::nullopt);
    }

    const Dataset& base() const { return _base.get(); }
    Index replaced_index() const { return _index; }
    const std::optional<Point>& candidate() const { return _candidate; }
    bool deletion() const { return !_candidate.has_value(); }

    Vector removed_input() const { return base().input(_index); }
    double removed_target() const { return base().target(_index); }

    Dataset materialize() const
    {
        Dataset d(base().inputs(), base().targets());
        if (_candidate)
            d.replace(_index, _candidate->x, _candidate->y);
        else
            d.remove(_index);
        return d;
    }

private:
    PartitionView(const Dataset& base, Index i, std::optional<Point> candidate)
        : _base(base), _index(i), _candidate(std::move(candidate)) {}

    static void check(const Dataset& base, Index i)
    {
        if (i < 0 || i >= base.size())
            throw InvalidArgument("partition index " + std::to_string(i) + " out of range for dataset of size "
                + std::to_string(base.size()));
    }

    std::reference_wrapper<const Dataset> _base;
    Index _index;
    std::optional<Point> _candidate;
};

struct LooPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Scores every partition of one (dataset, candidate) pair. The kernel
/// matrix of the base dataset is computed once; each partition is then
/// refactorized from scratch.
class PartitionScorer {
public:
    PartitionScorer(const Dataset& dataset, const Hyperparameters& hyper, std::optional<Point> candidate = std::nullopt,
        MeanReference mean_reference = MeanReference::Model)
        : _dataset(dataset), _hyper(hyper), _candidate(std::move(candidate)), _mean_reference(mean_reference)
    {
        detail::check_dataset(dataset, hyper);
        if (_candidate && _candidate->x.size() != dataset.dim())
            throw InvalidArgument("candidate dimension does not match dataset");
        _k = kernel_matrix(dataset.inputs(), hyper);
        if (_candidate)
            _k_candidate = kernel_vector(dataset.inputs(), _candidate->x, hyper);
    }

    Index size() const { return _dataset.size(); }

    /// Mean and latent variance at x_i conditioned on D_/i.
    LooPrediction loo_predict(Index i) const
    {
        const Part part = build(i);
        return loo_from(part, i);
    }

    double score(CriterionKind kind, Index i) const
    {
        const Part part = build(i);
        const double noise = _hyper.noise_variance;
        switch (kind) {
        case CriterionKind::PriorEntropy:
            return -gaussian_entropy(part.targets.size(), part.log_det());
        case CriterionKind::MarginalLogLikelihood: {
            const double n = static_cast<double>(part.targets.size());
            const double quad = part.targets.size() ? part.targets.dot(part.solve(part.targets)) : 0.0;
            return -0.5 * quad - 0.5 * part.log_det() - 0.5 * n * log_two_pi;
        }
        case CriterionKind::PredictiveEntropy: {
            const LooPrediction loo = loo_from(part, i);
            if (!(loo.variance > 0.0))
                throw NumericalError("predictive entropy undefined: variance at removed point is "
                    + std::to_string(loo.variance));
            return gaussian_entropy(1, std::log(loo.variance));
        }
        case CriterionKind::LogPredictiveDensity: {
            const LooPrediction loo = loo_from(part, i);
            const double s = loo.variance + noise;
            if (!(s > 0.0))
                throw NumericalError("log predictive density undefined: non-positive predictive variance");
            const double r = _dataset.target(i) - loo.mean;
            return 0.5 * std::log(2.0 * std::numbers::pi * s) + r * r / (2.0 * s);
        }
        case CriterionKind::MeanRelevance: {
            const LooPrediction loo = loo_from(part, i);
            const double ref = _mean_reference == MeanReference::Model ? full_mean()[i] : _dataset.target(i);
            const double d = ref - loo.mean;
            return d * d;
        }
        }
        throw InvalidArgument("unknown criterion kind");
    }

    std::vector<double> scores(CriterionKind kind) const
    {
        std::vector<double> out(static_cast<std::size_t>(size()));
        for (Index i = 0; i < size(); ++i)
            out[static_cast<std::size_t>(i)] = score(kind, i);
        return out;
    }

private:
    struct Part {
        std::optional<Factorization> factor;
        Vector targets;
        Vector k_removed; // k(x_i, D_/i)

        double log_det() const { return factor ? factor->log_det() : 0.0; }
        Vector solve(const Vector& b) const { return factor->solve(b); }
    };

    Part build(Index i) const
    {
        if (i < 0 || i >= size())
            throw InvalidArgument("partition index " + std::to_string(i) + " out of range");
        const Index n = size();
        const double noise = _hyper.noise_variance;
        Part part;
        Matrix a;
        if (_candidate) {
            a = _k;
            a.row(i) = _k_candidate.transpose();
            a.col(i) = _k_candidate;
            a(i, i) = _hyper.signal_variance;
            a.diagonal().array() += noise;
            part.targets = _dataset.targets();
            part.targets[i] = _candidate->y;
            part.k_removed = _k.col(i);
            part.k_removed[i] = _k_candidate[i];
        }
        else {
            a.resize(n - 1, n - 1);
            a.topLeftCorner(i, i) = _k.topLeftCorner(i, i);
            a.topRightCorner(i, n - 1 - i) = _k.topRightCorner(i, n - 1 - i);
            a.bottomLeftCorner(n - 1 - i, i) = _k.bottomLeftCorner(n - 1 - i, i);
            a.bottomRightCorner(n - 1 - i, n - 1 - i) = _k.bottomRightCorner(n - 1 - i, n - 1 - i);
            a.diagonal().array() += noise;
            part.targets.resize(n - 1);
            part.targets.head(i) = _dataset.targets().head(i);
            part.targets.tail(n - 1 - i) = _dataset.targets().tail(n - 1 - i);
            part.k_removed.resize(n - 1);
            part.k_removed.head(i) = _k.col(i).head(i);
            part.k_removed.tail(n - 1 - i) = _k.col(i).tail(n - 1 - i);
        }
        if (a.rows() > 0)
            part.factor = factorize(a, _hyper.signal_variance);
        return part;
    }

    LooPrediction loo_from(const Part& part, Index) const
    {
        if (!part.factor)
            return {0.0, _hyper.signal_variance};
        const Vector v = part.factor->half_solve(part.k_removed);
        const Vector w = part.factor->half_solve(part.targets);
        LooPrediction out;
        out.mean = v.dot(w);
        out.variance = detail::clamp_variance(_hyper.signal_variance - v.squaredNorm(), _hyper.signal_variance);
        return out;
    }

    const Vector& full_mean() const
    {
        if (!_full_mean) {
            Matrix a = _k;
            a.diagonal().array() += _hyper.noise_variance;
            const Factorization f = factorize(a, _hyper.signal_variance);
            _full_mean = _k * f.solve(_dataset.targets());
        }
        return *_full_mean;
    }

    const Dataset& _dataset;
    Hyperparameters _hyper;
    std::optional<Point> _candidate;
    MeanReference _mean_reference;
    Matrix _k;
    Vector _k_candidate;
    mutable std::optional<Vector> _full_mean;
};

/// Predictive mean and latent variance at the removed input x_i,
/// conditioning on D_/i.
inline LooPrediction loo_predict(const PartitionView& partition, const Hyperparameters& hyper)
{
    PartitionScorer scorer(partition.base(), hyper, partition.candidate());
    return scorer.loo_predict(partition.replaced_index());
}

inline double reduction_score(CriterionKind kind, const PartitionView& partition, const Hyperparameters& hyper,
    MeanReference mean_reference = MeanReference::Model)
{
    PartitionScorer scorer(partition.base(), hyper, partition.candidate(), mean_reference);
    return scorer.score(kind, partition.replaced_index());
}

/// First index of the smallest value.
inline Index argmin(const std::vector<double>& values)
{
    if (values.empty())
        throw InvalidArgument("argmin of an empty score vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best])
            best = i;
    return static_cast<Index>(best);
}

struct RemovalChoice {
    Index index = -1;
    std::vector<double> scores;
};

/// Scores all N partitions and returns the argmin (smallest index on ties).
inline RemovalChoice choose_removal(CriterionKind kind, const Dataset& dataset, const Hyperparameters& hyper,
    const std::optional<Point>& candidate, MeanReference mean_reference = MeanReference::Model)
{
    PartitionScorer scorer(dataset, hyper, candidate, mean_reference);
    RemovalChoice out;
    out.scores = scorer.scores(kind);
    out.index = argmin(out.scores);
    return out;
}

namespace detail {

inline double acceptance_value(AcceptanceKind kind, double y, double mean, double variance, double noise)
{
    switch (kind) {
    case AcceptanceKind::Variance:
        return variance;
    case AcceptanceKind::SquaredError:
        return (y - mean) * (y - mean);
    case AcceptanceKind::NegativeLogPredictiveDensity: {
        const double s = variance + noise;
        return 0.5 * std::log(2.0 * std::numbers::pi * s) + (y - mean) * (y - mean) / (2.0 * s);
    }
    }
    throw InvalidArgument("unknown acceptance kind");
}

} // namespace detail

/// f_acc of one point under the full current model.
inline double acceptance_score(AcceptanceKind kind, const PosteriorCache& cache, const Dataset& dataset,
    const Hyperparameters& hyper, const Point& point)
{
    const auto [mean, variance] = predict_point(cache, dataset, hyper, point.x);
    return detail::acceptance_value(kind, point.y, mean, variance, hyper.noise_variance);
}

inline double acceptance_score(CriterionKind kind, const PosteriorCache& cache, const Dataset& dataset,
    const Hyperparameters& hyper, const Point& point)
{
    return acceptance_score(acceptance_pairing(kind), cache, dataset, hyper, point);
}

/// f_acc of every stored row, each scored with the row left in the model.
inline Vector acceptance_scores_of_rows(AcceptanceKind kind, const PosteriorCache& cache, const Dataset& dataset,
    const Hyperparameters& hyper)
{
    const Prediction pred = predict(cache, dataset, hyper, dataset.inputs());
    Vector out(dataset.size());
    for (Index i = 0; i < dataset.size(); ++i)
        out[i] = detail::acceptance_value(kind, dataset.target(i), pred.mean[i], pred.variance[i], hyper.noise_variance);
    return out;
}

} // namespace ogp
