#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include <ogp/kernel.hpp>
#include <ogp/linalg.hpp>
#include <ogp/types.hpp>

namespace ogp {

inline constexpr double log_two_pi = 1.8378770664093454835606594728112; // log(2 pi)

/// Everything precomputable for prediction: the Cholesky factor of
/// K_ff + sigma_eps^2 I and alpha = (K_ff + sigma_eps^2 I)^{-1} y.
class PosteriorCache {
public:
    const Factorization& factor() const { return _factor; }
    Matrix chol() const { return _factor.llt.matrixL(); }
    const Vector& alpha() const { return _alpha; }
    std::uint64_t dataset_version() const { return _dataset_version; }
    const Hyperparameters& hyper() const { return _hyper; }
    Index size() const { return _alpha.size(); }
    double jitter() const { return _factor.jitter; }

    /// Throws ContractViolation unless this cache was fitted on exactly
    /// this dataset state and these hyperparameters.
    void check_current(const Dataset& dataset, const Hyperparameters& hyper) const
    {
        if (_dataset_version != dataset.version())
            throw ContractViolation("stale posterior cache: fitted on dataset version "
                + std::to_string(_dataset_version) + ", dataset is at version "
                + std::to_string(dataset.version()));
        if (!(_hyper == hyper))
            throw ContractViolation("posterior cache was fitted with different hyperparameters");
    }

private:
    friend PosteriorCache fit_cache(const Dataset&, const Hyperparameters&);

    Factorization _factor;
    Vector _alpha;
    std::uint64_t _dataset_version = 0;
    Hyperparameters _hyper;
};

struct Prediction {
    Vector mean;
    Vector variance;
    std::optional<Matrix> covariance;
};

namespace detail {

inline void check_dataset(const Dataset& dataset, const Hyperparameters& hyper)
{
    hyper.validate();
    if (dataset.empty())
        throw InvalidArgument("dataset must not be empty");
    if (dataset.dim() != hyper.dim())
        throw InvalidArgument("dataset has " + std::to_string(dataset.dim()) + " input columns but there are "
            + std::to_string(hyper.dim()) + " lengthscales");
}

/// K_ff + sigma_eps^2 I
inline Matrix noisy_kernel(const Matrix& x, const Hyperparameters& hyper)
{
    Matrix a = kernel_matrix(x, hyper);
    a.diagonal().array() += hyper.noise_variance;
    return a;
}

/// Latent variances in [-tol, 0) are rounding noise and become 0; anything
/// below that signals a corrupted factor.
inline double clamp_variance(double v, double signal_variance)
{
    if (v >= 0.0)
        return v;
    if (v >= -1e-10 * signal_variance)
        return 0.0;
    throw NumericalError("negative predictive variance " + std::to_string(v));
}

} // namespace detail

/// Fits the posterior cache. The factor is checked by reconstruction
/// (relative Frobenius error below 1e-10 against the matrix actually
/// factored, i.e. including any jitter).
inline PosteriorCache fit_cache(const Dataset& dataset, const Hyperparameters& hyper)
{
    detail::check_dataset(dataset, hyper);
    const Matrix a = detail::noisy_kernel(dataset.inputs(), hyper);

    PosteriorCache cache;
    cache._factor = factorize(a, hyper.signal_variance);

    const Matrix l = cache._factor.llt.matrixL();
    Matrix factored = a;
    factored.diagonal().array() += cache._factor.jitter;
    const double rel = (l * l.transpose() - factored).norm() / factored.norm();
    if (!(rel < 1e-10))
        throw NumericalError("Cholesky reconstruction error " + std::to_string(rel) + " exceeds 1e-10");

    cache._alpha = cache._factor.solve(dataset.targets());
    if (!cache._alpha.allFinite())
        throw NumericalError("non-finite weight vector after factorization");
    cache._dataset_version = dataset.version();
    cache._hyper = hyper;
    return cache;
}

/// Predictive mean and latent (noise-free) variance at the rows of `xstar`.
inline Prediction predict(const PosteriorCache& cache, const Dataset& dataset, const Hyperparameters& hyper,
    const Matrix& xstar, bool full_cov = false)
{
    cache.check_current(dataset, hyper);
    if (xstar.cols() != dataset.dim())
        throw InvalidArgument("test inputs have " + std::to_string(xstar.cols()) + " columns, dataset has "
            + std::to_string(dataset.dim()));

    const Matrix k_fs = kernel_matrix(dataset.inputs(), xstar, hyper);
    const Matrix v = cache.factor().half_solve(k_fs);

    Prediction out;
    out.mean = k_fs.transpose() * cache.alpha();
    if (full_cov) {
        Matrix cov = kernel_matrix(xstar, hyper) - v.transpose() * v;
        for (Index i = 0; i < cov.rows(); ++i)
            cov(i, i) = detail::clamp_variance(cov(i, i), hyper.signal_variance);
        out.variance = cov.diagonal();
        out.covariance = std::move(cov);
    }
    else {
        out.variance.resize(xstar.rows());
        for (Index i = 0; i < xstar.rows(); ++i)
            out.variance[i] = detail::clamp_variance(hyper.signal_variance - v.col(i).squaredNorm(),
                hyper.signal_variance);
    }
    return out;
}

/// Mean and latent variance at a single input.
inline std::pair<double, double> predict_point(
    const PosteriorCache& cache, const Dataset& dataset, const Hyperparameters& hyper, const Vector& x)
{
    cache.check_current(dataset, hyper);
    const Vector k = kernel_vector(dataset.inputs(), x, hyper);
    const Vector v = cache.factor().half_solve(k);
    return {k.dot(cache.alpha()), detail::clamp_variance(hyper.signal_variance - v.squaredNorm(), hyper.signal_variance)};
}

/// log p(y) from an existing cache.
inline double log_marginal_likelihood(const PosteriorCache& cache, const Dataset& dataset, const Hyperparameters& hyper)
{
    cache.check_current(dataset, hyper);
    const double n = static_cast<double>(dataset.size());
    return -0.5 * dataset.targets().dot(cache.alpha()) - 0.5 * cache.factor().log_det() - 0.5 * n * log_two_pi;
}

/// log p(y) = -1/2 y^T (K + s I)^{-1} y - 1/2 log|K + s I| - n/2 log 2 pi.
inline double log_marginal_likelihood(const Dataset& dataset, const Hyperparameters& hyper)
{
    detail::check_dataset(dataset, hyper);
    const Factorization f = factorize(detail::noisy_kernel(dataset.inputs(), hyper), hyper.signal_variance);
    const Vector alpha = f.solve(dataset.targets());
    const double n = static_cast<double>(dataset.size());
    return -0.5 * dataset.targets().dot(alpha) - 0.5 * f.log_det() - 0.5 * n * log_two_pi;
}

namespace detail {

struct LmlWithGradient {
    double value = 0.0;
    Vector gradient;
};

inline LmlWithGradient lml_value_and_gradient(const Dataset& dataset, const Hyperparameters& hyper)
{
    check_dataset(dataset, hyper);
    const Index n = dataset.size();
    const Index p = dataset.dim();
    const Matrix k = kernel_matrix(dataset.inputs(), hyper);
    Matrix a = k;
    a.diagonal().array() += hyper.noise_variance;
    const Factorization f = factorize(a, hyper.signal_variance);
    const Vector alpha = f.solve(dataset.targets());

    LmlWithGradient out;
    out.value = -0.5 * dataset.targets().dot(alpha) - 0.5 * f.log_det() - 0.5 * static_cast<double>(n) * log_two_pi;

    // W = alpha alpha^T - A^{-1}; dL/dtheta = 1/2 tr(W dA/dtheta)
    const Matrix w = alpha * alpha.transpose() - f.solve(Matrix(Matrix::Identity(n, n)));
    const Matrix wk = w.cwiseProduct(k);

    out.gradient.resize(p + 2);
    out.gradient[0] = 0.5 * wk.sum();
    const Matrix& x = dataset.inputs();
    for (Index d = 0; d < p; ++d) {
        const double inv_l2 = 1.0 / (hyper.lengthscales[d] * hyper.lengthscales[d]);
        double acc = 0.0;
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
                const double diff = x(i, d) - x(j, d);
                acc += wk(i, j) * diff * diff;
            }
        out.gradient[d + 1] = 0.5 * acc * inv_l2;
    }
    out.gradient[p + 1] = 0.5 * hyper.noise_variance * w.trace();
    return out;
}

} // namespace detail

/// Analytic gradient of the log marginal likelihood with respect to
/// (log sigma_s, log l_1..l_p, log sigma_eps^2).
inline Vector lml_gradient(const Dataset& dataset, const Hyperparameters& hyper)
{
    return detail::lml_value_and_gradient(dataset, hyper).gradient;
}

/// Differential entropy of a `dim`-variate Gaussian with log|Sigma| = log_det_cov.
inline double gaussian_entropy(Index dim, double log_det_cov)
{
    return 0.5 * static_cast<double>(dim) * (1.0 + log_two_pi) + 0.5 * log_det_cov;
}

} // namespace ogp
