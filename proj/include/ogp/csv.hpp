#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <ogp/params.hpp>
#include <ogp/types.hpp>

namespace ogp {

struct Provenance {
    std::string path;
    std::string checksum;
};

/// A numeric table read from disk with its target split off.
struct TabularDataset {
    std::vector<std::string> feature_names;
    Matrix rows;
    std::string target_name;
    Vector targets;
    Provenance provenance;
    /// Rows dropped because a cell was missing (empty, NA, NaN, ?).
    Index rejected_rows = 0;

    Dataset to_dataset() const { return Dataset(rows, targets); }
};

namespace detail {

/// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                cur += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string csv_escape(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline bool is_missing(std::string_view cell)
{
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
        cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t'))
        cell.remove_suffix(1);
    return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" || cell == "?";
}

inline std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IngestionError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace detail

/// Parses CSV text with a header row. Row numbers in errors are 1-based
/// file lines (the header is line 1); columns are 1-based.
inline TabularDataset parse_csv_dataset(std::string_view text, const std::string& target_column, const std::string& source = "<memory>")
{
    TabularDataset out;
    out.provenance = {source, hex64(fnv1a64(text))};

    std::vector<std::string> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos)
                end = text.size();
            std::string line(text.substr(start, end - start));
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines.push_back(std::move(line));
            start = end + 1;
        }
    }
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty())
        throw IngestionError(source + ": empty file", 0, -1);

    auto header = detail::split_csv_line(lines[0]);
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0)
        header[0].erase(0, 3);
    long target_idx = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == target_column)
            target_idx = static_cast<long>(c);
    if (target_idx < 0)
        throw IngestionError(source + ": missing target column '" + target_column + "'", 1, -1);
    for (std::size_t c = 0; c < header.size(); ++c)
        if (static_cast<long>(c) != target_idx)
            out.feature_names.push_back(header[c]);
    out.target_name = target_column;

    const std::size_t cols = header.size();
    std::vector<std::vector<double>> data;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (lines[l].empty())
            continue;
        const auto cells = detail::split_csv_line(lines[l]);
        const long row = static_cast<long>(l + 1);
        if (cells.size() != cols)
            throw IngestionError(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size())
                    + " cells, header has " + std::to_string(cols),
                row, -1);
        std::vector<double> vals(cols);
        bool missing = false;
        for (std::size_t c = 0; c < cols; ++c) {
            if (detail::is_missing(cells[c])) {
                missing = true;
                continue;
            }
            if (!parse_double(cells[c], vals[c]) || !std::isfinite(vals[c]))
                throw IngestionError(source + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1) + " ('"
                        + header[c] + "'): cannot parse '" + cells[c] + "' as a number",
                    row, static_cast<long>(c + 1));
        }
        if (missing) {
            ++out.rejected_rows;
            continue;
        }
        data.push_back(std::move(vals));
    }

    const Index n = static_cast<Index>(data.size());
    out.rows.resize(n, static_cast<Index>(cols - 1));
    out.targets.resize(n);
    for (Index r = 0; r < n; ++r) {
        Index f = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (static_cast<long>(c) == target_idx)
                out.targets[r] = data[static_cast<std::size_t>(r)][c];
            else
                out.rows(r, f++) = data[static_cast<std::size_t>(r)][c];
        }
    }
    return out;
}

inline TabularDataset load_csv_dataset(const std::string& path, const std::string& target_column)
{
    return parse_csv_dataset(detail::read_file(path), target_column, path);
}

/// Header `feature_names..., target_name`; values in shortest round-trip form.
inline std::string format_dataset_csv(const Dataset& d, const std::vector<std::string>& feature_names, const std::string& target_name)
{
    if (static_cast<Index>(feature_names.size()) != d.dim())
        throw InvalidArgument("feature name count does not match dataset dimension");
    std::string out;
    for (const auto& n : feature_names)
        out += detail::csv_escape(n) + ",";
    out += detail::csv_escape(target_name) + "\n";
    for (Index r = 0; r < d.size(); ++r) {
        for (Index c = 0; c < d.dim(); ++c)
            out += format_double(d.inputs()(r, c)) + ",";
        out += format_double(d.target(r)) + "\n";
    }
    return out;
}

inline std::vector<std::string> default_feature_names(Index dim)
{
    std::vector<std::string> names;
    for (Index c = 0; c < dim; ++c)
        names.push_back("x" + std::to_string(c + 1));
    return names;
}

inline void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open '" + path + "' for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os)
        throw Error("failed writing '" + path + "'");
}

inline void write_dataset_csv(const std::string& path, const Dataset& d, const std::vector<std::string>& feature_names,
    const std::string& target_name = "y")
{
    write_text_file(path, format_dataset_csv(d, feature_names, target_name));
}

/// First `count` rows and the remainder, order preserved.
inline std::pair<Dataset, Dataset> split_first(const Dataset& d, Index count)
{
    if (count < 0 || count > d.size())
        throw InvalidArgument("split size " + std::to_string(count) + " out of range for " + std::to_string(d.size()) + " rows");
    return {d.slice(0, count), d.slice(count, d.size() - count)};
}

} // namespace ogp
