#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace ogp {

/// One row of an experiment table: the configuration that produced it
/// plus whichever metrics the producing command measures.
struct ResultRecord {
    std::string command;
    std::string benchmark;
    std::string criterion;
    bool accept = false;
    std::int64_t seed = 0;
    std::int64_t budget = 0;
    std::optional<double> var_threshold;
    std::optional<double> err_threshold;
    std::optional<std::int64_t> size;
    std::optional<double> initial_smse;
    std::optional<double> smse;
    std::optional<double> mean_variance;
    std::optional<std::int64_t> streamed;
    std::optional<std::int64_t> revised;
    std::optional<std::int64_t> accepted;
    std::optional<std::int64_t> replaced;
    std::optional<double> acceptance_pct;
    std::optional<double> median_ms;
    std::optional<std::int64_t> repetitions;
    std::string complexity;
    std::optional<double> op_count;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

using RecordField = std::variant<std::string ResultRecord::*, bool ResultRecord::*, std::int64_t ResultRecord::*,
    std::optional<double> ResultRecord::*, std::optional<std::int64_t> ResultRecord::*>;

/// Column order of every CSV/JSON result file.
inline const std::array<std::pair<const char*, RecordField>, 21>& record_fields()
{
    static const std::array<std::pair<const char*, RecordField>, 21> fields{{
        {"command", &ResultRecord::command},
        {"benchmark", &ResultRecord::benchmark},
        {"criterion", &ResultRecord::criterion},
        {"accept", &ResultRecord::accept},
        {"seed", &ResultRecord::seed},
        {"budget", &ResultRecord::budget},
        {"var_threshold", &ResultRecord::var_threshold},
        {"err_threshold", &ResultRecord::err_threshold},
        {"size", &ResultRecord::size},
        {"initial_smse", &ResultRecord::initial_smse},
        {"smse", &ResultRecord::smse},
        {"mean_variance", &ResultRecord::mean_variance},
        {"streamed", &ResultRecord::streamed},
        {"revised", &ResultRecord::revised},
        {"accepted", &ResultRecord::accepted},
        {"replaced", &ResultRecord::replaced},
        {"acceptance_pct", &ResultRecord::acceptance_pct},
        {"median_ms", &ResultRecord::median_ms},
        {"repetitions", &ResultRecord::repetitions},
        {"complexity", &ResultRecord::complexity},
        {"op_count", &ResultRecord::op_count},
    }};
    return fields;
}

} // namespace ogp
