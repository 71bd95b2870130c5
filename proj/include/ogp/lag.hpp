#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <ogp/simulate.hpp>
#include <ogp/types.hpp>

namespace ogp {

/// NARX lag orders: n_y output lags and one lag count per input channel.
struct LagSpec {
    Index n_y = 1;
    std::vector<Index> n_u;

    Index max_lag() const
    {
        Index m = n_y;
        for (Index l : n_u)
            m = std::max(m, l);
        return m;
    }

    Index features() const
    {
        Index f = n_y;
        for (Index l : n_u)
            f += l;
        return f;
    }

    void validate() const
    {
        if (n_y < 1)
            throw InvalidArgument("n_y must be at least 1");
        for (Index l : n_u)
            if (l < 0)
                throw InvalidArgument("input lag counts must be non-negative");
    }
};

/// Output lags follow the system order; input lags come from the
/// linearized discrete-time transfer functions. Building's n_y = 3 gives
/// 3 + 3 + 3 = 9 features.
inline LagSpec lag_preset(System s)
{
    switch (s) {
    case System::BoucWen: return {3, {3}};
    case System::Tanks: return {2, {2}};
    case System::VanDerPol: return {2, {}};
    case System::Building: return {3, {3, 3}};
    }
    throw InvalidArgument("unknown system");
}

/// Row k: [y_{k-1} .. y_{k-n_y}, u1_{k-1} .. u1_{k-n_u1}, ...] with target
/// y_k - y_{k-1}, for k = max_lag .. len-1.
inline Dataset lag_embed(const std::vector<double>& y, const std::vector<std::vector<double>>& u_list, const LagSpec& lags)
{
    lags.validate();
    if (u_list.size() != lags.n_u.size())
        throw InvalidArgument("lag spec has " + std::to_string(lags.n_u.size()) + " input lag counts but "
            + std::to_string(u_list.size()) + " input sequences were given");
    for (const auto& u : u_list)
        if (u.size() != y.size())
            throw InvalidArgument("input and output sequences are not aligned");
    const Index len = static_cast<Index>(y.size());
    const Index lag = lags.max_lag();
    if (len <= lag)
        throw InvalidArgument("sequence of length " + std::to_string(len) + " is too short for maximum lag "
            + std::to_string(lag));

    const Index rows = len - lag;
    Matrix x(rows, lags.features());
    Vector target(rows);
    for (Index r = 0; r < rows; ++r) {
        const std::size_t k = static_cast<std::size_t>(r + lag);
        Index c = 0;
        for (Index j = 1; j <= lags.n_y; ++j)
            x(r, c++) = y[k - static_cast<std::size_t>(j)];
        for (std::size_t ch = 0; ch < u_list.size(); ++ch)
            for (Index j = 1; j <= lags.n_u[ch]; ++j)
                x(r, c++) = u_list[ch][k - static_cast<std::size_t>(j)];
        target[r] = y[k] - y[k - 1];
    }
    return Dataset(std::move(x), std::move(target));
}

/// Stacks datasets with equal input dimension, preserving order.
inline Dataset concatenate(const std::vector<Dataset>& parts)
{
    if (parts.empty())
        return Dataset();
    Index rows = 0;
    for (const auto& d : parts) {
        if (d.dim() != parts.front().dim())
            throw InvalidArgument("cannot concatenate datasets of different dimension");
        rows += d.size();
    }
    Matrix x(rows, parts.front().dim());
    Vector y(rows);
    Index r = 0;
    for (const auto& d : parts) {
        x.middleRows(r, d.size()) = d.inputs();
        y.segment(r, d.size()) = d.targets();
        r += d.size();
    }
    return Dataset(std::move(x), std::move(y));
}

} // namespace ogp
