#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <ogp/types.hpp>

namespace ogp {

enum class System { BoucWen, Tanks, VanDerPol, Building };

inline std::string_view to_string(System s)
{
    switch (s) {
    case System::BoucWen: return "bouc-wen";
    case System::Tanks: return "tanks";
    case System::VanDerPol: return "van-der-pol";
    case System::Building: return "building";
    }
    return "unknown";
}

inline System parse_system(std::string_view name)
{
    for (auto s : {System::BoucWen, System::Tanks, System::VanDerPol, System::Building})
        if (name == to_string(s))
            return s;
    throw InvalidArgument("unknown system '" + std::string(name) + "'");
}

using ParamSet = std::map<std::string, double>;

/// Model parameters and initial state. Bouc-Wen and Tanks values follow
/// the nonlinear system identification benchmarks; Building values give
/// hour-scale zone dynamics.
inline ParamSet default_params(System s)
{
    switch (s) {
    case System::BoucWen:
        return {{"m_L", 2.0}, {"c_L", 10.0}, {"k_L", 5e4}, {"alpha", 5e4}, {"beta", 1e3}, {"gamma", 0.8},
            {"delta", -1.1}, {"nu", 1.0}, {"y0", 0.0}, {"v0", 0.0}, {"z0", 0.0}};
    case System::Tanks:
        return {{"k1", 0.054}, {"k2", 0.056}, {"k3", 0.046}, {"k4", 0.02}, {"height", 10.0}, {"x1_0", 0.0},
            {"x2_0", 0.0}};
    case System::VanDerPol:
        return {{"mu", 1.0}, {"x0", 0.0}, {"v0", 0.0}};
    case System::Building:
        return {{"C_z", 5e5}, {"C_w", 5e6}, {"C_r", 2e5}, {"R_z", 0.01}, {"R_r", 0.005}, {"R_w", 0.02},
            {"c_w", 4180.0}, {"T_s", 60.0}, {"kp", 0.01}, {"ki", 0.01 / 3600.0}, {"mdot_max", 0.02},
            {"comfort_low", 21.0}, {"comfort_high", 24.0}, {"relaxed_low", 17.0}, {"relaxed_high", 28.0},
            {"setpoint_margin", 0.5}, {"day_start_h", 7.0}, {"day_end_h", 19.0}, {"Tz0", 20.0}, {"Tw0", 15.0},
            {"Tr0", 20.0}};
    }
    throw InvalidArgument("unknown system");
}

/// Process-noise standard deviations (per sqrt(second)) and output noise.
inline ParamSet default_noise(System s)
{
    switch (s) {
    case System::BoucWen: return {{"process", 0.0}, {"output", 0.0}};
    case System::Tanks: return {{"w1", 0.01}, {"w2", 0.01}, {"output", 0.0}};
    case System::VanDerPol: return {{"w", std::sqrt(0.1)}};
    case System::Building: {
        const double s_w = std::sqrt(5e-5);
        return {{"w1", s_w}, {"w2", s_w}, {"w3", s_w}};
    }
    }
    throw InvalidArgument("unknown system");
}

struct SimConfig {
    double dt = 0.1;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    /// Overrides of default_params(); unknown keys are rejected.
    ParamSet params;
    /// Overrides of default_noise(); unknown keys are rejected.
    ParamSet noise_scales;
    /// RK4 steps per sample interval.
    int substeps = 1;

    /// Samples at t = 0, dt, ..., up to and including the horizon.
    Index samples() const { return static_cast<Index>(std::floor(horizon / dt + 1e-9)) + 1; }

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw InvalidArgument("dt must be positive");
        if (!(horizon >= dt))
            throw InvalidArgument("horizon must be at least dt");
        if (substeps < 1)
            throw InvalidArgument("substeps must be at least 1");
        for (const auto& [k, v] : noise_scales)
            if (!(v >= 0.0))
                throw InvalidArgument("noise scale '" + k + "' must be non-negative");
    }
};

inline SimConfig default_sim_config(System s)
{
    SimConfig c;
    switch (s) {
    case System::BoucWen: c.dt = 1.0 / 750.0; c.horizon = 999.0 / 750.0; c.substeps = 4; break;
    case System::Tanks: c.dt = 4.0; c.horizon = 4.0 * 1023; c.substeps = 4; break;
    case System::VanDerPol: c.dt = 0.1; c.horizon = 5.1; c.substeps = 1; break;
    case System::Building: c.dt = 900.0; c.horizon = 900.0 * (365 * 96 - 1); c.substeps = 15; break;
    }
    return c;
}

struct SimResult {
    std::vector<double> t;
    /// One sequence per input channel (Building: ambient temperature, mass flow).
    std::vector<std::vector<double>> u;
    std::vector<double> y;
    /// samples x state dimension
    Matrix states;
};

namespace detail {

inline ParamSet merged(const ParamSet& defaults, const ParamSet& overrides, const char* what)
{
    ParamSet out = defaults;
    for (const auto& [k, v] : overrides) {
        if (!out.contains(k))
            throw InvalidArgument(std::string("unknown ") + what + " '" + k + "'");
        out[k] = v;
    }
    return out;
}

template <typename Deriv>
Vector rk4(const Vector& x, double h, Deriv&& f)
{
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_inputs(const std::vector<std::vector<double>>& inputs, std::size_t channels, Index samples,
    std::string_view system)
{
    if (inputs.size() != channels)
        throw InvalidArgument(std::string(system) + " expects " + std::to_string(channels) + " input sequence(s), got "
            + std::to_string(inputs.size()));
    for (const auto& u : inputs)
        if (static_cast<Index>(u.size()) < samples)
            throw InvalidArgument(std::string(system) + " input sequence shorter than " + std::to_string(samples)
                + " samples");
}

/// Fixed-step RK4 with zero-order-hold inputs and Euler-Maruyama process
/// noise (std * sqrt(h) * N(0,1) per integration step).
template <typename Deriv, typename Clamp>
Matrix integrate(Vector x, Index samples, const SimConfig& cfg, const Vector& noise_std, std::mt19937_64& rng,
    Deriv&& deriv, Clamp&& clamp, auto&& before_sample)
{
    const double h = cfg.dt / cfg.substeps;
    const double sqrt_h = std::sqrt(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    const bool noisy = (noise_std.array() > 0.0).any();

    Matrix states(samples, x.size());
    states.row(0) = x.transpose();
    for (Index k = 0; k + 1 < samples; ++k) {
        before_sample(k, x);
        for (int s = 0; s < cfg.substeps; ++s) {
            x = rk4(x, h, [&](const Vector& z) { return deriv(k, z); });
            if (noisy)
                for (Index j = 0; j < x.size(); ++j)
                    if (noise_std[j] > 0.0)
                        x[j] += noise_std[j] * sqrt_h * normal(rng);
            clamp(x);
        }
        if (!x.allFinite())
            throw SimulationError(std::string("non-finite state at step ") + std::to_string(k + 1), static_cast<long>(k + 1));
        states.row(k + 1) = x.transpose();
    }
    return states;
}

inline std::vector<double> time_axis(Index samples, double dt)
{
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (Index k = 0; k < samples; ++k)
        t[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
    return t;
}

} // namespace detail

/// Simulates one system over cfg.samples() samples.
///
/// Inputs are sample-indexed, held constant over each interval:
/// BoucWen {force}, Tanks {pump voltage}, VanDerPol {} and Building
/// {ambient temperature} (closed loop with the PI controller on T_z) or
/// {ambient temperature, mass flow} (open loop).
inline SimResult simulate(System system, const SimConfig& cfg, const std::vector<std::vector<double>>& inputs = {})
{
    cfg.validate();
    const ParamSet p = detail::merged(default_params(system), cfg.params, "parameter");
    const ParamSet noise = detail::merged(default_noise(system), cfg.noise_scales, "noise scale");
    const Index n = cfg.samples();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    SimResult out;
    out.t = detail::time_axis(n, cfg.dt);
    auto no_clamp = [](Vector&) {};
    auto no_hook = [](Index, const Vector&) {};

    switch (system) {
    case System::VanDerPol: {
        detail::check_inputs(inputs, 0, n, "van-der-pol");
        const double mu = p.at("mu");
        Vector x0(2);
        x0 << p.at("x0"), p.at("v0");
        Vector ns(2);
        ns << 0.0, noise.at("w");
        out.states = detail::integrate(x0, n, cfg, ns, rng,
            [mu](Index, const Vector& z) {
                Vector d(2);
                d << z[1], mu * (1.0 - z[0] * z[0]) * z[1] - z[0];
                return d;
            },
            no_clamp, no_hook);
        out.y.assign(out.states.col(0).data(), out.states.col(0).data() + n);
        break;
    }
    case System::BoucWen: {
        detail::check_inputs(inputs, 1, n, "bouc-wen");
        const auto& u = inputs[0];
        const double m = p.at("m_L"), c = p.at("c_L"), kl = p.at("k_L");
        const double alpha = p.at("alpha"), beta = p.at("beta"), gamma = p.at("gamma"), delta = p.at("delta");
        const double nu = p.at("nu");
        Vector x0(3);
        x0 << p.at("y0"), p.at("v0"), p.at("z0");
        Vector ns(3);
        ns << 0.0, noise.at("process"), 0.0;
        out.states = detail::integrate(x0, n, cfg, ns, rng,
            [&](Index k, const Vector& s) {
                const double v = s[1], z = s[2];
                const double az = std::abs(z);
                const double z_pow_nu1 = az > 0.0 ? std::pow(az, nu - 1.0) : (nu == 1.0 ? 1.0 : 0.0);
                Vector d(3);
                d[0] = v;
                d[1] = (u[static_cast<std::size_t>(k)] - kl * s[0] - c * v - z) / m;
                d[2] = alpha * v - beta * (gamma * std::abs(v) * z_pow_nu1 * z + delta * v * std::pow(az, nu));
                return d;
            },
            no_clamp, no_hook);
        out.u = {std::vector<double>(u.begin(), u.begin() + n)};
        out.y.resize(static_cast<std::size_t>(n));
        for (Index k = 0; k < n; ++k)
            out.y[static_cast<std::size_t>(k)] = out.states(k, 0) + noise.at("output") * normal(rng);
        break;
    }
    case System::Tanks: {
        detail::check_inputs(inputs, 1, n, "tanks");
        const auto& u = inputs[0];
        const double k1 = p.at("k1"), k2 = p.at("k2"), k3 = p.at("k3"), k4 = p.at("k4"), height = p.at("height");
        Vector x0(2);
        x0 << p.at("x1_0"), p.at("x2_0");
        Vector ns(2);
        ns << noise.at("w1"), noise.at("w2");
        out.states = detail::integrate(x0, n, cfg, ns, rng,
            [&](Index k, const Vector& s) {
                const double r1 = std::sqrt(std::max(s[0], 0.0));
                const double r2 = std::sqrt(std::max(s[1], 0.0));
                Vector d(2);
                d << -k1 * r1 + k4 * u[static_cast<std::size_t>(k)], k2 * r1 - k3 * r2;
                return d;
            },
            [height](Vector& s) { s = s.cwiseMax(0.0).cwiseMin(height); }, no_hook);
        out.u = {std::vector<double>(u.begin(), u.begin() + n)};
        out.y.resize(static_cast<std::size_t>(n));
        for (Index k = 0; k < n; ++k)
            out.y[static_cast<std::size_t>(k)] = out.states(k, 1) + noise.at("output") * normal(rng);
        break;
    }
    case System::Building: {
        if (inputs.size() != 1 && inputs.size() != 2)
            throw InvalidArgument("building expects {ambient} or {ambient, mass flow} inputs");
        detail::check_inputs(inputs, inputs.size(), n, "building");
        const bool closed_loop = inputs.size() == 1;
        const auto& ta = inputs[0];
        const double cz = p.at("C_z"), cw = p.at("C_w"), cr = p.at("C_r");
        const double rz = p.at("R_z"), rr = p.at("R_r"), rw = p.at("R_w");
        const double c_water = p.at("c_w"), t_supply = p.at("T_s");
        const double kp = p.at("kp"), ki = p.at("ki"), mdot_max = p.at("mdot_max");

        std::vector<double> mdot(static_cast<std::size_t>(n), 0.0);
        if (!closed_loop)
            std::copy(inputs[1].begin(), inputs[1].begin() + n, mdot.begin());
        double integral = 0.0;
        auto controller = [&](Index k, const Vector& s) {
            if (!closed_loop)
                return;
            const double t = static_cast<double>(k) * cfg.dt;
            const double hour = std::fmod(t / 3600.0, 24.0);
            const int weekday = static_cast<int>(std::fmod(t / 86400.0, 7.0)); // 0 = Monday
            const bool occupied = weekday < 5 && hour >= p.at("day_start_h") && hour < p.at("day_end_h");
            const double low = occupied ? p.at("comfort_low") : p.at("relaxed_low");
            const double setpoint = low + p.at("setpoint_margin");
            const double e = setpoint - s[0];
            const double unsat = kp * e + ki * (integral + e * cfg.dt);
            const double sat = std::clamp(unsat, 0.0, mdot_max);
            if (sat == unsat) // conditional integration as anti-windup
                integral += e * cfg.dt;
            mdot[static_cast<std::size_t>(k)] = std::clamp(kp * e + ki * integral, 0.0, mdot_max);
        };

        Vector x0(3);
        x0 << p.at("Tz0"), p.at("Tw0"), p.at("Tr0");
        Vector ns(3);
        ns << noise.at("w1"), noise.at("w2"), noise.at("w3");
        out.states = detail::integrate(x0, n, cfg, ns, rng,
            [&](Index k, const Vector& s) {
                const double tz = s[0], tw = s[1], tr = s[2];
                const double m = mdot[static_cast<std::size_t>(k)];
                Vector d(3);
                d[0] = ((tw - tz) / rz + (tr - tz) / rr) / cz;
                d[1] = ((tz - tw) / rz + (ta[static_cast<std::size_t>(k)] - tw) / rw) / cw;
                d[2] = ((tz - tr) / rr + c_water * m * (t_supply - tr)) / cr;
                return d;
            },
            no_clamp, controller);
        if (closed_loop && n > 0)
            controller(n - 1, out.states.row(n - 1).transpose());
        out.u = {std::vector<double>(ta.begin(), ta.begin() + n), mdot};
        out.y.assign(out.states.col(0).data(), out.states.col(0).data() + n);
        break;
    }
    }
    return out;
}

/// Random-phase multisine with the given RMS, frequencies spread evenly
/// over [f_lo, f_hi] Hz, plus an offset.
inline std::vector<double> multisine(Index samples, double dt, std::uint64_t seed, double rms, double f_lo, double f_hi,
    int components = 32, double offset = 0.0)
{
    if (components < 1 || !(f_hi >= f_lo) || !(f_lo >= 0.0))
        throw InvalidArgument("invalid multisine band");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> freqs(static_cast<std::size_t>(components)), phases(freqs.size());
    for (int c = 0; c < components; ++c) {
        freqs[static_cast<std::size_t>(c)]
            = components == 1 ? f_lo : f_lo + (f_hi - f_lo) * static_cast<double>(c) / (components - 1);
        phases[static_cast<std::size_t>(c)] = phase(rng);
    }
    // each unit sine has RMS 1/sqrt(2) and they are uncorrelated
    const double amp = rms * std::sqrt(2.0 / components);
    std::vector<double> u(static_cast<std::size_t>(samples));
    for (Index k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        double v = 0.0;
        for (std::size_t c = 0; c < freqs.size(); ++c)
            v += std::sin(2.0 * std::numbers::pi * freqs[c] * t + phases[c]);
        u[static_cast<std::size_t>(k)] = offset + amp * v;
    }
    return u;
}

/// Piecewise-constant levels drawn uniformly from [lo, hi], each held
/// for `hold` samples.
inline std::vector<double> random_steps(Index samples, std::uint64_t seed, double lo, double hi, Index hold)
{
    if (hold < 1 || !(hi >= lo))
        throw InvalidArgument("invalid random step signal");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> level(lo, hi);
    std::vector<double> u(static_cast<std::size_t>(samples));
    double current = level(rng);
    for (Index k = 0; k < samples; ++k) {
        if (k > 0 && k % hold == 0)
            current = level(rng);
        u[static_cast<std::size_t>(k)] = current;
    }
    return u;
}

/// Synthetic outdoor temperature: seasonal cosine (coldest mid January),
/// daily sinusoid peaking mid afternoon and AR(1) weather noise.
inline std::vector<double> ambient_temperature(Index samples, double dt, std::uint64_t seed, double annual_mean = 10.0,
    double seasonal_amp = 8.0, double daily_amp = 4.0, double noise_std = 0.3, double noise_corr = 0.995)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> ta(static_cast<std::size_t>(samples));
    double ar = 0.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (Index k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double day = t / 86400.0;
        const double hour = std::fmod(t / 3600.0, 24.0);
        ar = noise_corr * ar + noise_std * normal(rng);
        ta[static_cast<std::size_t>(k)] = annual_mean - seasonal_amp * std::cos(two_pi * (day - 15.0) / 365.0)
            + daily_amp * std::sin(two_pi * (hour - 9.0) / 24.0) + ar;
    }
    return ta;
}

} // namespace ogp
