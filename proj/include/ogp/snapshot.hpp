#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include <ogp/csv.hpp>
#include <ogp/online.hpp>

namespace ogp {

inline constexpr int snapshot_format_version = 1;

inline nlohmann::ordered_json hyper_to_json(const Hyperparameters& h)
{
    nlohmann::ordered_json j;
    j["signal_variance"] = h.signal_variance;
    j["lengthscales"] = std::vector<double>(h.lengthscales.data(), h.lengthscales.data() + h.lengthscales.size());
    j["noise_variance"] = h.noise_variance;
    return j;
}

inline Hyperparameters hyper_from_json(const nlohmann::ordered_json& j)
{
    Hyperparameters h;
    h.signal_variance = j.at("signal_variance").get<double>();
    const auto l = j.at("lengthscales").get<std::vector<double>>();
    h.lengthscales = Eigen::Map<const Vector>(l.data(), static_cast<Index>(l.size()));
    h.noise_variance = j.at("noise_variance").get<double>();
    h.validate();
    return h;
}

/// Self-describing, versioned record of an online model: dataset,
/// hyperparameters, thresholds, criterion, budget. The cache is rebuilt
/// on load.
inline nlohmann::ordered_json snapshot_to_json(const OnlineGp& model)
{
    const OnlineConfig& c = model.config();
    nlohmann::ordered_json j;
    j["format"] = "ogp-online-snapshot";
    j["version"] = snapshot_format_version;
    j["budget"] = c.budget;
    j["var_threshold"] = c.var_threshold ? nlohmann::ordered_json(*c.var_threshold) : nlohmann::ordered_json(nullptr);
    j["err_threshold"] = c.err_threshold ? nlohmann::ordered_json(*c.err_threshold) : nlohmann::ordered_json(nullptr);
    j["criterion"] = std::string(to_string(c.criterion));
    j["use_acceptance"] = c.use_acceptance;
    j["mean_reference"] = c.mean_reference == MeanReference::Model ? "model" : "target";
    j["hyperparameters"] = hyper_to_json(model.hyper());
    const Dataset& d = model.dataset();
    j["dim"] = d.dim();
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (Index r = 0; r < d.size(); ++r) {
        const Vector x = d.input(r);
        inputs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    }
    j["inputs"] = std::move(inputs);
    j["targets"] = std::vector<double>(d.targets().data(), d.targets().data() + d.size());
    return j;
}

inline OnlineGp snapshot_from_json(const nlohmann::ordered_json& j)
{
    if (j.value("format", "") != "ogp-online-snapshot")
        throw IngestionError("not an online GP snapshot");
    const int version = j.at("version").get<int>();
    if (version != snapshot_format_version)
        throw IngestionError("unsupported snapshot version " + std::to_string(version));
    OnlineConfig c;
    c.budget = j.at("budget").get<Index>();
    if (!j.at("var_threshold").is_null())
        c.var_threshold = j.at("var_threshold").get<double>();
    if (!j.at("err_threshold").is_null())
        c.err_threshold = j.at("err_threshold").get<double>();
    c.criterion = parse_criterion(j.at("criterion").get<std::string>());
    c.use_acceptance = j.at("use_acceptance").get<bool>();
    c.mean_reference = j.at("mean_reference").get<std::string>() == "target" ? MeanReference::Target : MeanReference::Model;
    const Hyperparameters h = hyper_from_json(j.at("hyperparameters"));
    const Index dim = j.at("dim").get<Index>();
    const auto& rows = j.at("inputs");
    const auto targets = j.at("targets").get<std::vector<double>>();
    if (rows.size() != targets.size())
        throw IngestionError("snapshot input and target counts differ");
    Matrix x(static_cast<Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto v = rows[r].get<std::vector<double>>();
        if (static_cast<Index>(v.size()) != dim)
            throw IngestionError("snapshot row " + std::to_string(r) + " has wrong dimension");
        for (Index c2 = 0; c2 < dim; ++c2)
            x(static_cast<Index>(r), c2) = v[static_cast<std::size_t>(c2)];
    }
    Vector y = Eigen::Map<const Vector>(targets.data(), static_cast<Index>(targets.size()));
    return OnlineGp(Dataset(std::move(x), std::move(y)), h, c);
}

inline void save_snapshot(const OnlineGp& model, const std::string& path)
{
    write_text_file(path, snapshot_to_json(model).dump(1) + "\n");
}

inline OnlineGp load_snapshot(const std::string& path)
{
    return snapshot_from_json(nlohmann::ordered_json::parse(detail::read_file(path)));
}

} // namespace ogp
