#pragma once

#include <string>

#include <ogp/types.hpp>

namespace ogp {

/// Standardized mean squared error: MSE divided by the population (1/N)
/// variance of the targets. 1 is the score of the mean predictor.
inline double smse(const Vector& predictions, const Vector& targets)
{
    if (predictions.size() != targets.size())
        throw InvalidArgument("smse: " + std::to_string(predictions.size()) + " predictions for "
            + std::to_string(targets.size()) + " targets");
    if (targets.size() < 2)
        throw InvalidArgument("smse needs at least two targets");
    const double var = (targets.array() - targets.mean()).square().mean();
    if (!(var > 0.0))
        throw InvalidArgument("smse: targets have zero variance");
    const double mse = (targets - predictions).array().square().mean();
    return mse / var;
}

} // namespace ogp
