#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include <ogp/types.hpp>

namespace ogp {

enum class BenchmarkFunction { Himmelblau, Rastrigin, SixHumpCamel, Rosenbrock };

inline std::string_view to_string(BenchmarkFunction f)
{
    switch (f) {
    case BenchmarkFunction::Himmelblau: return "himmelblau";
    case BenchmarkFunction::Rastrigin: return "rastrigin";
    case BenchmarkFunction::SixHumpCamel: return "six-hump-camel";
    case BenchmarkFunction::Rosenbrock: return "rosenbrock";
    }
    return "unknown";
}

inline BenchmarkFunction parse_benchmark_function(std::string_view name)
{
    for (auto f : {BenchmarkFunction::Himmelblau, BenchmarkFunction::Rastrigin, BenchmarkFunction::SixHumpCamel,
             BenchmarkFunction::Rosenbrock})
        if (name == to_string(f))
            return f;
    throw InvalidArgument("unknown benchmark function '" + std::string(name) + "'");
}

inline double eval_benchmark_function(BenchmarkFunction f, double x1, double x2)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (f) {
    case BenchmarkFunction::Himmelblau: {
        const double a = x1 * x1 + x2 - 11.0;
        const double b = x1 + x2 * x2 - 7.0;
        return a * a + b * b;
    }
    case BenchmarkFunction::Rastrigin:
        return 20.0 + (x1 * x1 - 10.0 * std::cos(two_pi * x1)) + (x2 * x2 - 10.0 * std::cos(two_pi * x2));
    case BenchmarkFunction::SixHumpCamel: {
        const double x1s = x1 * x1;
        const double x2s = x2 * x2;
        return (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (-4.0 + 4.0 * x2s) * x2s;
    }
    case BenchmarkFunction::Rosenbrock: {
        const double a = 1.0 - x1;
        const double b = x2 - x1 * x1;
        return a * a + 100.0 * b * b;
    }
    }
    throw InvalidArgument("unknown benchmark function");
}

inline double eval_benchmark_function(std::string_view name, double x1, double x2)
{
    return eval_benchmark_function(parse_benchmark_function(name), x1, x2);
}

/// Symmetric sampling box [-b, b]^2.
inline double domain_half_width(BenchmarkFunction f)
{
    switch (f) {
    case BenchmarkFunction::Himmelblau: return 4.0;
    case BenchmarkFunction::Rastrigin: return 1.0;
    case BenchmarkFunction::SixHumpCamel: return 2.0;
    case BenchmarkFunction::Rosenbrock: return 1.0;
    }
    throw InvalidArgument("unknown benchmark function");
}

/// n inputs uniform over the function's box with noise-free targets.
inline Dataset sample_uniform(BenchmarkFunction f, Index n, std::uint64_t seed)
{
    if (n < 1)
        throw InvalidArgument("sample_uniform needs n >= 1");
    const double b = domain_half_width(f);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-b, b);
    Matrix x(n, 2);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        x(i, 0) = u(rng);
        x(i, 1) = u(rng);
        y[i] = eval_benchmark_function(f, x(i, 0), x(i, 1));
    }
    return Dataset(std::move(x), std::move(y));
}

/// Regular `per_axis` x `per_axis` grid over the box, row-major in x1.
inline Dataset evaluation_grid(BenchmarkFunction f, Index per_axis)
{
    if (per_axis < 2)
        throw InvalidArgument("grid needs at least 2 points per axis");
    const double b = domain_half_width(f);
    Matrix x(per_axis * per_axis, 2);
    Vector y(per_axis * per_axis);
    for (Index i = 0; i < per_axis; ++i)
        for (Index j = 0; j < per_axis; ++j) {
            const Index r = i * per_axis + j;
            x(r, 0) = -b + 2.0 * b * static_cast<double>(i) / static_cast<double>(per_axis - 1);
            x(r, 1) = -b + 2.0 * b * static_cast<double>(j) / static_cast<double>(per_axis - 1);
            y[r] = eval_benchmark_function(f, x(r, 0), x(r, 1));
        }
    return Dataset(std::move(x), std::move(y));
}

} // namespace ogp
