#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <ogp/types.hpp>

namespace ogp {

/// Cholesky factor of a symmetric positive-definite matrix plus the
/// diagonal jitter that was needed to obtain it.
struct Factorization {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;

    Index size() const { return llt.matrixLLT().rows(); }

    double log_det() const
    {
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }

    Vector solve(const Vector& b) const { return llt.solve(b); }
    Matrix solve(const Matrix& b) const { return llt.solve(b); }

    /// L^{-1} b
    Matrix half_solve(const Matrix& b) const { return llt.matrixL().solve(b); }
    Vector half_solve(const Vector& b) const { return llt.matrixL().solve(b); }
};

namespace detail {

/// Plain unblocked Cholesky run only to locate the first failing pivot.
inline long failing_pivot(const Matrix& a)
{
    const Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d))
            return static_cast<long>(j);
        l(j, j) = std::sqrt(d);
        for (Index i = j + 1; i < n; ++i)
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
    return -1;
}

inline bool factor_ok(const Eigen::LLT<Matrix>& llt)
{
    if (llt.info() != Eigen::Success)
        return false;
    const auto diag = llt.matrixLLT().diagonal().array();
    return diag.allFinite() && (diag > 0.0).all();
}

} // namespace detail

/// Factorizes `a` (lower triangle is read). The first attempt is
/// jitter-free; on failure jitter of 1e-10 * scale is added and grown
/// tenfold per retry up to 1e-6 * scale.
inline Factorization factorize(const Matrix& a, double scale)
{
    Factorization f;
    f.llt.compute(a);
    if (detail::factor_ok(f.llt))
        return f;

    Matrix work = a;
    double applied = 0.0;
    for (double jitter = 1e-10 * scale; jitter <= 1e-6 * scale * (1.0 + 1e-9); jitter *= 10.0) {
        work.diagonal().array() += jitter - applied;
        applied = jitter;
        f.llt.compute(work);
        if (detail::factor_ok(f.llt)) {
            f.jitter = jitter;
            return f;
        }
    }
    const long pivot = detail::failing_pivot(work);
    throw NumericalError("Cholesky factorization failed at pivot " + std::to_string(pivot)
            + " (matrix not positive definite after jitter " + std::to_string(applied) + ")",
        pivot);
}

} // namespace ogp
