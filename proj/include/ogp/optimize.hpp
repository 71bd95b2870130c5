#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <ogp/gp.hpp>

namespace ogp {

/// Raised when the search meets a non-finite likelihood it cannot back
/// away from; carries the last iterate whose likelihood was finite.
class OptimizationError : public Error {
public:
    OptimizationError(const std::string& what, Hyperparameters last_valid)
        : Error(what), _last_valid(std::move(last_valid)) {}

    const Hyperparameters& last_valid() const noexcept { return _last_valid; }

private:
    Hyperparameters _last_valid;
};

struct OptimizeOptions {
    int max_iters = 100;
    double tol = 1e-5;
    int history = 8;
    /// Optional box on the log-parameters (log sigma_s, log l, log sigma_eps^2).
    std::optional<Vector> lower;
    std::optional<Vector> upper;
};

struct OptimizeResult {
    Hyperparameters hyper;
    double lml = 0.0;
    /// LML of every accepted iterate, starting with the initial point.
    std::vector<double> lml_trace;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline Vector project(Vector theta, const OptimizeOptions& opt)
{
    if (opt.lower)
        theta = theta.cwiseMax(*opt.lower);
    if (opt.upper)
        theta = theta.cwiseMin(*opt.upper);
    return theta;
}

/// Zeroes components that would push an iterate sitting on a bound outward.
inline Vector mask_active(Vector dir, const Vector& theta, const OptimizeOptions& opt)
{
    for (Index i = 0; i < dir.size(); ++i) {
        if (opt.lower && theta[i] <= (*opt.lower)[i] && dir[i] < 0.0)
            dir[i] = 0.0;
        if (opt.upper && theta[i] >= (*opt.upper)[i] && dir[i] > 0.0)
            dir[i] = 0.0;
    }
    return dir;
}

inline std::optional<LmlWithGradient> try_evaluate(const Dataset& dataset, const Vector& theta)
{
    try {
        auto r = lml_value_and_gradient(dataset, Hyperparameters::from_log(theta));
        if (!std::isfinite(r.value) || !r.gradient.allFinite())
            return std::nullopt;
        return r;
    }
    catch (const NumericalError&) {
        return std::nullopt;
    }
}

} // namespace detail

/// Maximizes the log marginal likelihood over log-transformed
/// hyperparameters with a limited-memory BFGS direction and a backtracking
/// (Armijo) line search. Accepted iterates never decrease the likelihood.
inline OptimizeResult train_hyperparameters(const Dataset& dataset, const Hyperparameters& init, const OptimizeOptions& opt = {})
{
    init.validate();
    detail::check_dataset(dataset, init);

    Vector theta = detail::project(init.to_log(), opt);
    auto current = detail::try_evaluate(dataset, theta);
    if (!current)
        throw OptimizationError("log marginal likelihood is not finite at the initial hyperparameters", init);

    OptimizeResult res;
    res.lml_trace.push_back(current->value);

    std::deque<std::pair<Vector, Vector>> memory; // (s, y) pairs for the minimization of -LML
    for (res.iterations = 0; res.iterations < opt.max_iters; ++res.iterations) {
        const Vector g = current->gradient;
        const Vector pg = detail::mask_active(g, theta, opt);
        if (pg.norm() < opt.tol) {
            res.converged = true;
            break;
        }

        // two-loop recursion on q = -g (gradient of the minimized objective)
        Vector q = -pg;
        std::vector<double> rho(memory.size()), alpha(memory.size());
        for (std::size_t k = memory.size(); k-- > 0;) {
            rho[k] = 1.0 / memory[k].second.dot(memory[k].first);
            alpha[k] = rho[k] * memory[k].first.dot(q);
            q -= alpha[k] * memory[k].second;
        }
        if (!memory.empty()) {
            const auto& [s, y] = memory.back();
            q *= s.dot(y) / y.dot(y);
        }
        else {
            q /= std::max(1.0, pg.norm());
        }
        for (std::size_t k = 0; k < memory.size(); ++k) {
            const double beta = rho[k] * memory[k].second.dot(q);
            q += (alpha[k] - beta) * memory[k].first;
        }
        Vector dir = detail::mask_active(-q, theta, opt);
        if (!(dir.dot(g) > 0.0)) {
            memory.clear();
            dir = pg / std::max(1.0, pg.norm());
        }

        double step = 1.0;
        bool saw_finite = false;
        std::optional<detail::LmlWithGradient> next;
        Vector theta_next;
        for (int bt = 0; bt < 50; ++bt, step *= 0.5) {
            theta_next = detail::project(theta + step * dir, opt);
            auto trial = detail::try_evaluate(dataset, theta_next);
            if (!trial)
                continue;
            saw_finite = true;
            if (trial->value >= current->value + 1e-4 * g.dot(theta_next - theta)) {
                next = std::move(trial);
                break;
            }
        }
        if (!next) {
            if (!saw_finite)
                throw OptimizationError("log marginal likelihood became non-finite along the search direction",
                    Hyperparameters::from_log(theta));
            break; // no sufficient increase possible: stationary for practical purposes
        }

        const Vector s = theta_next - theta;
        const Vector y = g - next->gradient;
        if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
            memory.emplace_back(s, y);
            if (static_cast<int>(memory.size()) > opt.history)
                memory.pop_front();
        }
        theta = theta_next;
        current = std::move(next);
        res.lml_trace.push_back(current->value);
    }

    res.hyper = theta == init.to_log() ? init : Hyperparameters::from_log(theta);
    res.lml = current->value;
    return res;
}

inline Hyperparameters optimize_hyperparameters(const Dataset& dataset, const Hyperparameters& init, int max_iters, double tol)
{
    OptimizeOptions opt;
    opt.max_iters = max_iters;
    opt.tol = tol;
    return train_hyperparameters(dataset, init, opt).hyper;
}

} // namespace ogp
