#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <ogp/simulate.hpp>

namespace ogp {

/// FNV-1a 64-bit; used to pin data files and parameter sets in metadata.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    if (s.empty())
        return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct ParameterFile {
    System system = System::VanDerPol;
    ParamSet params;
    ParamSet noise;
    SimConfig sim;
};

/// Canonical key/value text:
///   # ogp-params v1
///   system = van-der-pol
///   sim.dt = 0.1
///   param.mu = 1
///   noise.w = 0.316...
inline std::string format_params(const ParameterFile& f)
{
    std::ostringstream os;
    os << "# ogp-params v1\n";
    os << "system = " << to_string(f.system) << "\n";
    os << "sim.dt = " << format_double(f.sim.dt) << "\n";
    os << "sim.horizon = " << format_double(f.sim.horizon) << "\n";
    os << "sim.seed = " << f.sim.seed << "\n";
    os << "sim.substeps = " << f.sim.substeps << "\n";
    for (const auto& [k, v] : f.params)
        os << "param." << k << " = " << format_double(v) << "\n";
    for (const auto& [k, v] : f.noise)
        os << "noise." << k << " = " << format_double(v) << "\n";
    return os.str();
}

inline std::string params_checksum(const ParameterFile& f) { return hex64(fnv1a64(format_params(f))); }

inline ParameterFile parse_params(std::string_view text)
{
    ParameterFile f;
    bool header = false;
    std::istringstream is{std::string(text)};
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line.rfind("# ogp-params v1", 0) == 0)
                header = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IngestionError("parameter file line " + std::to_string(lineno) + ": expected key = value", lineno);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "system") {
            f.system = parse_system(val);
            continue;
        }
        double v = 0.0;
        if (!parse_double(val, v))
            throw IngestionError("parameter file line " + std::to_string(lineno) + ": '" + val + "' is not a number", lineno);
        if (key == "sim.dt")
            f.sim.dt = v;
        else if (key == "sim.horizon")
            f.sim.horizon = v;
        else if (key == "sim.seed")
            f.sim.seed = static_cast<std::uint64_t>(v);
        else if (key == "sim.substeps")
            f.sim.substeps = static_cast<int>(v);
        else if (key.rfind("param.", 0) == 0)
            f.params[key.substr(6)] = v;
        else if (key.rfind("noise.", 0) == 0)
            f.noise[key.substr(6)] = v;
        else
            throw IngestionError("parameter file line " + std::to_string(lineno) + ": unknown key '" + key + "'", lineno);
    }
    if (!header)
        throw IngestionError("parameter file lacks the '# ogp-params v1' header");
    return f;
}

inline void write_params(const std::string& path, const ParameterFile& f)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open '" + path + "' for writing");
    os << format_params(f);
    if (!os)
        throw Error("failed writing '" + path + "'");
}

inline ParameterFile read_params(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_params(ss.str());
}

/// Default parameter set of a system with its default simulation settings.
inline ParameterFile default_parameter_file(System s)
{
    ParameterFile f;
    f.system = s;
    f.params = default_params(s);
    f.noise = default_noise(s);
    f.sim = default_sim_config(s);
    return f;
}

} // namespace ogp
