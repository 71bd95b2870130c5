#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include <ogp/error.hpp>

namespace ogp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// SE-ARD kernel and Gaussian likelihood parameters.
struct Hyperparameters {
    double signal_variance = 1.0;
    Vector lengthscales = Vector::Ones(1);
    double noise_variance = 1e-2;

    Index dim() const { return lengthscales.size(); }

    void validate() const
    {
        if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
            throw InvalidArgument("signal variance must be positive and finite");
        if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
            throw InvalidArgument("noise variance must be positive and finite");
        if (lengthscales.size() == 0)
            throw InvalidArgument("lengthscales must not be empty");
        for (Index d = 0; d < lengthscales.size(); ++d) {
            if (!(lengthscales[d] > 0.0) || !std::isfinite(lengthscales[d]))
                throw InvalidArgument("lengthscale " + std::to_string(d) + " must be positive and finite");
        }
    }

    /// Log-space parameter vector (log signal, log lengthscales, log noise).
    Vector to_log() const
    {
        Vector theta(dim() + 2);
        theta[0] = std::log(signal_variance);
        theta.segment(1, dim()) = lengthscales.array().log().matrix();
        theta[dim() + 1] = std::log(noise_variance);
        return theta;
    }

    static Hyperparameters from_log(const Vector& theta)
    {
        if (theta.size() < 3)
            throw InvalidArgument("log-parameter vector needs at least 3 entries");
        Hyperparameters h;
        const Index p = theta.size() - 2;
        h.signal_variance = std::exp(theta[0]);
        h.lengthscales = theta.segment(1, p).array().exp().matrix();
        h.noise_variance = std::exp(theta[p + 1]);
        return h;
    }

    friend bool operator==(const Hyperparameters& a, const Hyperparameters& b)
    {
        return a.signal_variance == b.signal_variance && a.noise_variance == b.noise_variance
            && a.lengthscales.size() == b.lengthscales.size() && a.lengthscales == b.lengthscales;
    }
};

namespace detail {
inline std::uint64_t next_version()
{
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}
} // namespace detail

/// Ordered training set D = (X, y). Every mutation stamps a fresh
/// version so caches fitted on an earlier state can be detected.
class Dataset {
public:
    Dataset() : _inputs(0, 0), _targets(0), _version(detail::next_version()) {}

    explicit Dataset(Index dim) : _inputs(0, dim), _targets(0), _version(detail::next_version()) {}

    Dataset(Matrix inputs, Vector targets)
        : _inputs(std::move(inputs)), _targets(std::move(targets)), _version(detail::next_version())
    {
        if (_inputs.rows() != _targets.size())
            throw InvalidArgument("dataset has " + std::to_string(_inputs.rows()) + " input rows but "
                + std::to_string(_targets.size()) + " targets");
        if (!_inputs.allFinite() || !_targets.allFinite())
            throw InvalidArgument("dataset contains non-finite entries");
    }

    Index size() const { return _targets.size(); }
    Index dim() const { return _inputs.cols(); }
    bool empty() const { return size() == 0; }

    const Matrix& inputs() const { return _inputs; }
    const Vector& targets() const { return _targets; }
    std::uint64_t version() const { return _version; }

    Vector input(Index i) const { return _inputs.row(i).transpose(); }
    double target(Index i) const { return _targets[i]; }

    void append(const Vector& x, double y)
    {
        check_point(x, y);
        const Index n = size();
        _inputs.conservativeResize(n + 1, dim());
        _targets.conservativeResize(n + 1);
        _inputs.row(n) = x.transpose();
        _targets[n] = y;
        _version = detail::next_version();
    }

    void replace(Index i, const Vector& x, double y)
    {
        if (i < 0 || i >= size())
            throw InvalidArgument("replace index " + std::to_string(i) + " out of range");
        check_point(x, y);
        _inputs.row(i) = x.transpose();
        _targets[i] = y;
        _version = detail::next_version();
    }

    void remove(Index i)
    {
        if (i < 0 || i >= size())
            throw InvalidArgument("remove index " + std::to_string(i) + " out of range");
        const Index n = size();
        Matrix inputs(n - 1, dim());
        Vector targets(n - 1);
        inputs.topRows(i) = _inputs.topRows(i);
        inputs.bottomRows(n - 1 - i) = _inputs.bottomRows(n - 1 - i);
        targets.head(i) = _targets.head(i);
        targets.tail(n - 1 - i) = _targets.tail(n - 1 - i);
        _inputs = std::move(inputs);
        _targets = std::move(targets);
        _version = detail::next_version();
    }

    /// Rows [begin, begin + count).
    Dataset slice(Index begin, Index count) const
    {
        if (begin < 0 || count < 0 || begin + count > size())
            throw InvalidArgument("dataset slice out of range");
        return Dataset(_inputs.middleRows(begin, count), _targets.segment(begin, count));
    }

    /// Same rows and order; the version stamp is not compared.
    friend bool same_contents(const Dataset& a, const Dataset& b)
    {
        return a._inputs.rows() == b._inputs.rows() && a._inputs.cols() == b._inputs.cols()
            && a._inputs == b._inputs && a._targets == b._targets;
    }

private:
    void check_point(const Vector& x, double y) const
    {
        if (x.size() != dim())
            throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", dataset has "
                + std::to_string(dim()));
        if (!x.allFinite() || !std::isfinite(y))
            throw InvalidArgument("point contains non-finite entries");
    }

    Matrix _inputs;
    Vector _targets;
    std::uint64_t _version;
};

/// A single streamed observation (x_*, y_*).
struct Point {
    Vector x;
    double y = 0.0;
};

} // namespace ogp
