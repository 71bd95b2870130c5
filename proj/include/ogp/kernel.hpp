#pragma once

#include <cmath>
#include <string>

#include <ogp/types.hpp>

namespace ogp {

namespace detail {
inline void check_kernel_dims(Index cols, const Hyperparameters& hyper, const char* which)
{
    if (cols != hyper.dim())
        throw InvalidArgument(std::string("kernel input ") + which + " has " + std::to_string(cols)
            + " columns but there are " + std::to_string(hyper.dim()) + " lengthscales");
}
} // namespace detail

/// Squared-exponential ARD kernel between two points.
inline double se_kernel(const Vector& a, const Vector& b, const Hyperparameters& hyper)
{
    if (a.size() != hyper.dim() || b.size() != hyper.dim())
        throw InvalidArgument("kernel point dimension does not match lengthscales");
    const double r2 = ((a - b).array() / hyper.lengthscales.array()).square().sum();
    return hyper.signal_variance * std::exp(-0.5 * r2);
}

/// K(A, B) with entry (i, j) = sigma_s * exp(-0.5 (a_i - b_j)^T Lambda^{-1} (a_i - b_j)).
inline Matrix kernel_matrix(const Matrix& a, const Matrix& b, const Hyperparameters& hyper)
{
    detail::check_kernel_dims(a.cols(), hyper, "A");
    detail::check_kernel_dims(b.cols(), hyper, "B");
    const Eigen::ArrayXd inv_l = hyper.lengthscales.array().inverse();
    const Matrix as = a * inv_l.matrix().asDiagonal();
    const Matrix bs = b * inv_l.matrix().asDiagonal();
    Matrix k(a.rows(), b.rows());
    for (Index j = 0; j < b.rows(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            k(i, j) = hyper.signal_variance * std::exp(-0.5 * (as.row(i) - bs.row(j)).squaredNorm());
    return k;
}

/// Symmetric K(X, X); only the lower triangle is evaluated.
inline Matrix kernel_matrix(const Matrix& x, const Hyperparameters& hyper)
{
    detail::check_kernel_dims(x.cols(), hyper, "X");
    const Eigen::ArrayXd inv_l = hyper.lengthscales.array().inverse();
    const Matrix xs = x * inv_l.matrix().asDiagonal();
    const Index n = x.rows();
    Matrix k(n, n);
    for (Index j = 0; j < n; ++j) {
        k(j, j) = hyper.signal_variance;
        for (Index i = j + 1; i < n; ++i) {
            const double v = hyper.signal_variance * std::exp(-0.5 * (xs.row(i) - xs.row(j)).squaredNorm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

/// k(X, x) as a column vector.
inline Vector kernel_vector(const Matrix& x, const Vector& point, const Hyperparameters& hyper)
{
    detail::check_kernel_dims(x.cols(), hyper, "X");
    if (point.size() != hyper.dim())
        throw InvalidArgument("kernel point dimension does not match lengthscales");
    const Eigen::ArrayXd inv_l = hyper.lengthscales.array().inverse();
    Vector k(x.rows());
    for (Index i = 0; i < x.rows(); ++i)
        k[i] = hyper.signal_variance
            * std::exp(-0.5 * ((x.row(i).transpose() - point).array() * inv_l).square().sum());
    return k;
}

} // namespace ogp
