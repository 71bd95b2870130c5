#pragma once

#include <string>
#include <vector>

#include <ogp/types.hpp>

namespace ogp {

/// Z-score statistics of the features and the target mean, fitted on a
/// training split only. `fitted_on` names the data the statistics came from.
struct NormalizationStats {
    Vector feature_means;
    Vector feature_stds;
    double target_mean = 0.0;
    std::string fitted_on;
};

inline NormalizationStats normalize_fit(const Dataset& train, const std::string& fitted_on = {},
    const std::vector<std::string>& feature_names = {})
{
    if (train.size() < 2)
        throw InvalidArgument("normalization needs at least two training rows");
    NormalizationStats s;
    s.feature_means = train.inputs().colwise().mean().transpose();
    s.feature_stds.resize(train.dim());
    for (Index c = 0; c < train.dim(); ++c) {
        const double sd = std::sqrt((train.inputs().col(c).array() - s.feature_means[c]).square().mean());
        if (!(sd > 0.0)) {
            const std::string name = static_cast<Index>(feature_names.size()) > c
                ? feature_names[static_cast<std::size_t>(c)]
                : "column " + std::to_string(c + 1);
            throw InvalidArgument("cannot normalize constant feature " + name);
        }
        s.feature_stds[c] = sd;
    }
    s.target_mean = train.targets().mean();
    s.fitted_on = fitted_on;
    return s;
}

/// (x - mean) / std per feature, target minus the training target mean.
inline Dataset normalize_apply(const NormalizationStats& s, const Dataset& d)
{
    if (d.dim() != s.feature_means.size())
        throw InvalidArgument("normalization statistics do not match dataset dimension");
    Matrix x = (d.inputs().rowwise() - s.feature_means.transpose()).array().rowwise()
        / s.feature_stds.transpose().array();
    Vector y = d.targets().array() - s.target_mean;
    return Dataset(std::move(x), std::move(y));
}

inline Dataset denormalize(const NormalizationStats& s, const Dataset& d)
{
    if (d.dim() != s.feature_means.size())
        throw InvalidArgument("normalization statistics do not match dataset dimension");
    Matrix x = (d.inputs().array().rowwise() * s.feature_stds.transpose().array()).matrix().rowwise()
        + s.feature_means.transpose();
    Vector y = d.targets().array() + s.target_mean;
    return Dataset(std::move(x), std::move(y));
}

} // namespace ogp
