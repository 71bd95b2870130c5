#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <ogp/criteria.hpp>
#include <ogp/gp.hpp>
#include <ogp/metrics.hpp>
#include <ogp/record.hpp>

namespace ogp {

struct OnlineConfig {
    Index budget = 100;
    /// sigma_bar^2; disabled when empty.
    std::optional<double> var_threshold;
    /// e_bar; disabled when empty.
    std::optional<double> err_threshold;
    CriterionKind criterion = CriterionKind::MarginalLogLikelihood;
    bool use_acceptance = false;
    MeanReference mean_reference = MeanReference::Model;

    void validate() const
    {
        if (budget < 1)
            throw InvalidArgument("budget must be at least 1");
        if (var_threshold && !(*var_threshold >= 0.0))
            throw InvalidArgument("variance threshold must be non-negative");
        if (err_threshold && !(*err_threshold >= 0.0))
            throw InvalidArgument("error threshold must be non-negative");
    }
};

enum class Decision {
    RejectedInsertion,
    Appended,
    RejectedAcceptance,
    Replaced,
    /// numerical failure; the point was dropped and the model left unchanged
    Aborted,
};

inline std::string_view to_string(Decision d)
{
    switch (d) {
    case Decision::RejectedInsertion: return "rejected_insertion";
    case Decision::Appended: return "appended";
    case Decision::RejectedAcceptance: return "rejected_acceptance";
    case Decision::Replaced: return "replaced";
    case Decision::Aborted: return "aborted";
    }
    return "unknown";
}

struct StepOutcome {
    Decision decision = Decision::RejectedInsertion;
    Index replaced_index = -1;
    std::optional<std::vector<double>> scores;
    std::optional<double> smse_running;
    std::string error;

    bool revised() const { return decision == Decision::Appended || decision == Decision::Replaced; }
};

/// Budget-constrained online GP. Hyperparameters stay frozen; only the
/// stored dataset changes. Every mutation refits the posterior cache and,
/// with acceptance enabled, the per-row acceptance scores and J_min.
class OnlineGp {
public:
    OnlineGp(Dataset initial, Hyperparameters hyper, OnlineConfig config)
        : _dataset(std::move(initial)), _hyper(std::move(hyper)), _config(config)
    {
        _config.validate();
        _hyper.validate();
        if (_dataset.size() > _config.budget)
            throw InvalidArgument("initial dataset of " + std::to_string(_dataset.size()) + " rows exceeds budget "
                + std::to_string(_config.budget));
        auto [cache, scores] = make_cache(_dataset);
        _cache = std::move(cache);
        _acc_scores = std::move(scores);
    }

    const Dataset& dataset() const { return _dataset; }
    const Hyperparameters& hyper() const { return _hyper; }
    const OnlineConfig& config() const { return _config; }
    const PosteriorCache& cache() const { return _cache; }
    Index size() const { return _dataset.size(); }
    bool at_budget() const { return _dataset.size() >= _config.budget; }

    /// Acceptance scores of the stored rows; empty unless acceptance is on.
    const Vector& cached_acceptance_scores() const { return _acc_scores; }

    double acceptance_minimum() const
    {
        if (_acc_scores.size() == 0)
            throw ContractViolation("acceptance minimum requested but acceptance scores are not cached");
        return _acc_scores.minCoeff();
    }

    std::pair<double, double> predict_point(const Vector& x) const
    {
        return ogp::predict_point(_cache, _dataset, _hyper, x);
    }

    Prediction predict(const Matrix& x) const { return ogp::predict(_cache, _dataset, _hyper, x); }

    /// Insertion gate: sigma_*^2 > sigma_bar^2 or |y - mu_*| >= e_bar.
    bool insert_decision(const Point& p) const
    {
        if (!_config.var_threshold && !_config.err_threshold)
            return true;
        const auto [mean, variance] = predict_point(p.x);
        if (_config.var_threshold && variance > *_config.var_threshold)
            return true;
        if (_config.err_threshold && std::abs(p.y - mean) >= *_config.err_threshold)
            return true;
        return false;
    }

    /// Acceptance gate: f_acc(D_*) > J_min. Pass-through when disabled.
    bool accept_decision(const Point& p) const
    {
        if (!_config.use_acceptance)
            return true;
        if (!at_budget())
            throw ContractViolation("accept_decision requires the dataset to be at budget");
        return acceptance_score(_config.criterion, _cache, _dataset, _hyper, p) > acceptance_minimum();
    }

    /// Index of the stored row the candidate would replace.
    RemovalChoice removal_choice(const Point& p) const
    {
        if (!at_budget())
            throw ContractViolation("select_removal requires the dataset to be at budget");
        return choose_removal(_config.criterion, _dataset, _hyper, p, _config.mean_reference);
    }

    Index select_removal(const Point& p) const { return removal_choice(p).index; }

    /// One pass of the online loop for a single measured point. On
    /// numerical failure the model is left untouched and the outcome is
    /// Aborted.
    StepOutcome step(const Point& p)
    {
        StepOutcome out;
        try {
            if (!insert_decision(p)) {
                out.decision = Decision::RejectedInsertion;
                return out;
            }
            Dataset next = _dataset;
            if (!at_budget()) {
                next.append(p.x, p.y);
                out.decision = Decision::Appended;
            }
            else {
                if (!accept_decision(p)) {
                    out.decision = Decision::RejectedAcceptance;
                    return out;
                }
                RemovalChoice choice = removal_choice(p);
                next.replace(choice.index, p.x, p.y);
                out.decision = Decision::Replaced;
                out.replaced_index = choice.index;
                out.scores = std::move(choice.scores);
            }
            auto [cache, scores] = make_cache(next);
            _dataset = std::move(next);
            _cache = std::move(cache);
            _acc_scores = std::move(scores);
        }
        catch (const NumericalError& e) {
            out = StepOutcome{};
            out.decision = Decision::Aborted;
            out.error = e.what();
        }
        return out;
    }

private:
    std::pair<PosteriorCache, Vector> make_cache(const Dataset& d) const
    {
        PosteriorCache cache = fit_cache(d, _hyper);
        Vector scores;
        if (_config.use_acceptance)
            scores = acceptance_scores_of_rows(acceptance_pairing(_config.criterion), cache, d, _hyper);
        return {std::move(cache), std::move(scores)};
    }

    Dataset _dataset;
    Hyperparameters _hyper;
    OnlineConfig _config;
    PosteriorCache _cache;
    Vector _acc_scores;
};

struct StreamOptions {
    /// Records SMSE on the evaluation set after every revising step.
    bool running_smse = false;
};

struct StreamResult {
    std::vector<StepOutcome> outcomes;
    ResultRecord summary;
};

namespace detail {
struct EvalMetrics {
    double smse = 0.0;
    double mean_variance = 0.0;
};

inline EvalMetrics evaluate(const OnlineGp& model, const Dataset& eval)
{
    const Prediction p = model.predict(eval.inputs());
    return {smse(p.mean, eval.targets()), p.variance.mean()};
}
} // namespace detail

/// Applies `step` to every point in order. The summary records the
/// configuration, the revised-point count (appended + replaced) and, when
/// an evaluation set is given, initial/final SMSE and mean predictive
/// variance over it.
template <typename Range>
StreamResult run_stream(OnlineGp& model, const Range& stream, const std::optional<Dataset>& eval_set = std::nullopt,
    StreamOptions options = {})
{
    StreamResult res;
    ResultRecord& rec = res.summary;
    const OnlineConfig& cfg = model.config();
    rec.command = "stream";
    rec.criterion = std::string(to_string(cfg.criterion));
    rec.accept = cfg.use_acceptance;
    rec.budget = cfg.budget;
    rec.var_threshold = cfg.var_threshold;
    rec.err_threshold = cfg.err_threshold;
    if (eval_set)
        rec.initial_smse = detail::evaluate(model, *eval_set).smse;

    std::int64_t streamed = 0, revised = 0, accepted = 0, replaced = 0, at_budget = 0;
    for (const Point& p : stream) {
        const bool full = model.at_budget();
        StepOutcome out = model.step(p);
        ++streamed;
        if (full && out.decision != Decision::RejectedInsertion && out.decision != Decision::Aborted)
            ++at_budget;
        if (out.decision == Decision::Replaced) {
            ++accepted;
            ++replaced;
        }
        if (out.revised()) {
            ++revised;
            if (eval_set && options.running_smse)
                out.smse_running = detail::evaluate(model, *eval_set).smse;
        }
        res.outcomes.push_back(std::move(out));
    }

    rec.size = model.size();
    rec.streamed = streamed;
    rec.revised = revised;
    rec.accepted = accepted;
    rec.replaced = replaced;
    if (at_budget > 0)
        rec.acceptance_pct = 100.0 * static_cast<double>(accepted) / static_cast<double>(at_budget);
    if (eval_set) {
        const auto m = detail::evaluate(model, *eval_set);
        rec.smse = m.smse;
        rec.mean_variance = m.mean_variance;
    }
    return res;
}

} // namespace ogp
