#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include <ogp/csv.hpp>
#include <ogp/params.hpp>
#include <ogp/record.hpp>

namespace ogp {

enum class ResultFormat { Csv, Json };

inline ResultFormat parse_result_format(std::string_view s)
{
    if (s == "csv" || s == "CSV")
        return ResultFormat::Csv;
    if (s == "json" || s == "JSON")
        return ResultFormat::Json;
    throw InvalidArgument("unknown result format '" + std::string(s) + "'");
}

/// Format from the file extension (.json -> JSON, anything else CSV).
inline ResultFormat result_format_for(const std::string& path)
{
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? ResultFormat::Json : ResultFormat::Csv;
}

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string format_cell(const ResultRecord& r, const RecordField& field)
{
    return std::visit(overloaded{
                          [&](std::string ResultRecord::*m) { return csv_escape(r.*m); },
                          [&](bool ResultRecord::*m) { return std::string(r.*m ? "true" : "false"); },
                          [&](std::int64_t ResultRecord::*m) { return std::to_string(r.*m); },
                          [&](std::optional<double> ResultRecord::*m) {
                              return (r.*m) ? format_double(*(r.*m)) : std::string();
                          },
                          [&](std::optional<std::int64_t> ResultRecord::*m) {
                              return (r.*m) ? std::to_string(*(r.*m)) : std::string();
                          },
                      },
        field);
}

inline bool parse_int(std::string_view s, std::int64_t& out)
{
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline void parse_cell(ResultRecord& r, const RecordField& field, const std::string& cell, const char* name, long row)
{
    auto fail = [&] {
        throw IngestionError("result row " + std::to_string(row) + ": bad value '" + cell + "' for " + name, row);
    };
    std::visit(overloaded{
                   [&](std::string ResultRecord::*m) { r.*m = cell; },
                   [&](bool ResultRecord::*m) {
                       if (cell == "true")
                           r.*m = true;
                       else if (cell == "false")
                           r.*m = false;
                       else
                           fail();
                   },
                   [&](std::int64_t ResultRecord::*m) {
                       if (!parse_int(cell, r.*m))
                           fail();
                   },
                   [&](std::optional<double> ResultRecord::*m) {
                       if (cell.empty()) {
                           r.*m = std::nullopt;
                           return;
                       }
                       double v = 0.0;
                       if (!parse_double(cell, v))
                           fail();
                       r.*m = v;
                   },
                   [&](std::optional<std::int64_t> ResultRecord::*m) {
                       if (cell.empty()) {
                           r.*m = std::nullopt;
                           return;
                       }
                       std::int64_t v = 0;
                       if (!parse_int(cell, v))
                           fail();
                       r.*m = v;
                   },
               },
        field);
}

} // namespace detail

inline nlohmann::ordered_json record_to_json(const ResultRecord& r)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [name, field] : record_fields()) {
        std::visit(detail::overloaded{
                       [&](std::string ResultRecord::*m) { j[name] = r.*m; },
                       [&](bool ResultRecord::*m) { j[name] = r.*m; },
                       [&](std::int64_t ResultRecord::*m) { j[name] = r.*m; },
                       [&](std::optional<double> ResultRecord::*m) {
                           j[name] = (r.*m) ? nlohmann::ordered_json(*(r.*m)) : nlohmann::ordered_json(nullptr);
                       },
                       [&](std::optional<std::int64_t> ResultRecord::*m) {
                           j[name] = (r.*m) ? nlohmann::ordered_json(*(r.*m)) : nlohmann::ordered_json(nullptr);
                       },
                   },
            field);
    }
    return j;
}

inline ResultRecord record_from_json(const nlohmann::ordered_json& j)
{
    ResultRecord r;
    for (const auto& [name, field] : record_fields()) {
        if (!j.contains(name))
            throw IngestionError(std::string("result record lacks field '") + name + "'");
        const auto& v = j.at(name);
        std::visit(detail::overloaded{
                       [&](std::string ResultRecord::*m) { r.*m = v.get<std::string>(); },
                       [&](bool ResultRecord::*m) { r.*m = v.get<bool>(); },
                       [&](std::int64_t ResultRecord::*m) { r.*m = v.get<std::int64_t>(); },
                       [&](std::optional<double> ResultRecord::*m) {
                           r.*m = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
                       },
                       [&](std::optional<std::int64_t> ResultRecord::*m) {
                           r.*m = v.is_null() ? std::nullopt : std::optional<std::int64_t>(v.get<std::int64_t>());
                       },
                   },
            field);
    }
    return r;
}

inline std::string format_results(const std::vector<ResultRecord>& records, ResultFormat format)
{
    if (format == ResultFormat::Json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : records)
            arr.push_back(record_to_json(r));
        return arr.dump(1) + "\n";
    }
    std::string out;
    const auto& fields = record_fields();
    for (std::size_t i = 0; i < fields.size(); ++i)
        out += std::string(i ? "," : "") + fields[i].first;
    out += "\n";
    for (const auto& r : records) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out += (i ? "," : "") + detail::format_cell(r, fields[i].second);
        out += "\n";
    }
    return out;
}

inline std::vector<ResultRecord> parse_results(std::string_view text, ResultFormat format)
{
    std::vector<ResultRecord> out;
    if (format == ResultFormat::Json) {
        const auto j = nlohmann::ordered_json::parse(text);
        if (!j.is_array())
            throw IngestionError("result JSON must be a top-level array");
        for (const auto& item : j)
            out.push_back(record_from_json(item));
        return out;
    }
    const auto& fields = record_fields();
    std::size_t start = 0;
    long row = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        const auto cells = detail::split_csv_line(line);
        if (row == 1) {
            if (cells.size() != fields.size())
                throw IngestionError("result header has " + std::to_string(cells.size()) + " columns, expected "
                    + std::to_string(fields.size()), 1);
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (cells[i] != fields[i].first)
                    throw IngestionError("result header column " + std::to_string(i + 1) + " is '" + cells[i]
                        + "', expected '" + fields[i].first + "'", 1, static_cast<long>(i + 1));
            continue;
        }
        if (cells.size() != fields.size())
            throw IngestionError("result row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells", row);
        ResultRecord r;
        for (std::size_t i = 0; i < fields.size(); ++i)
            detail::parse_cell(r, fields[i].second, cells[i], fields[i].first, row);
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_results(const std::vector<ResultRecord>& records, const std::string& path, ResultFormat format)
{
    write_text_file(path, format_results(records, format));
}

inline std::vector<ResultRecord> read_results(const std::string& path, ResultFormat format)
{
    return parse_results(detail::read_file(path), format);
}

} // namespace ogp
