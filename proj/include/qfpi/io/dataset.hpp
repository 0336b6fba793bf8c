#pragma once

// Tabular output: named equal-length columns plus key/value metadata,
// written as CSV ('#' metadata lines above one header row) or JSON with the
// same content. Numbers are printed once in scientific notation with nine
// significant digits and both encodings reuse that text.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qfpi/errors.hpp"

namespace qfpi::io
{

struct Column
{
    std::string name;
    std::vector<double> values;
};

struct Dataset
{
    std::string id;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<Column> columns;

    void add_metadata(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
    void add_column(std::string name, std::vector<double> values)
    {
        columns.push_back({std::move(name), std::move(values)});
    }

    const std::string* find_metadata(const std::string& key) const
    {
        for (const auto& [k, v] : metadata)
            if (k == key)
                return &v;
        return nullptr;
    }

    const Column* find_column(const std::string& name) const
    {
        for (const auto& c : columns)
            if (c.name == name)
                return &c;
        return nullptr;
    }

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }

    void validate() const
    {
        for (const auto& c : columns)
            if (c.values.size() != rows())
                throw Error("dataset " + id + ": column " + c.name + " has " +
                            std::to_string(c.values.size()) + " rows, expected " + std::to_string(rows()));
    }
};

inline std::string format_value(double v) { return fmt::format("{:.8e}", v); }

inline double parse_value(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str())
        throw IoError("not a number: '" + s + "'");
    return v;
}

inline std::string to_csv(const Dataset& ds)
{
    ds.validate();
    std::string out;
    out += "# id: " + ds.id + "\n";
    for (const auto& [k, v] : ds.metadata)
        out += "# " + k + ": " + v + "\n";
    for (std::size_t c = 0; c < ds.columns.size(); ++c)
        out += (c ? "," : "") + ds.columns[c].name;
    out += "\n";
    for (std::size_t r = 0; r < ds.rows(); ++r)
    {
        for (std::size_t c = 0; c < ds.columns.size(); ++c)
            out += (c ? "," : "") + format_value(ds.columns[c].values[r]);
        out += "\n";
    }
    return out;
}

inline std::string to_json(const Dataset& ds)
{
    ds.validate();
    nlohmann::ordered_json j;
    j["id"] = ds.id;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : ds.metadata)
        j["metadata"][k] = v;
    j["columns"] = nlohmann::ordered_json::object();
    for (const auto& c : ds.columns)
    {
        auto arr = nlohmann::ordered_json::array();
        for (double v : c.values)
            arr.push_back(parse_value(format_value(v)));
        j["columns"][c.name] = std::move(arr);
    }
    return j.dump(1) + "\n";
}

inline Dataset from_csv(const std::string& text)
{
    Dataset ds;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (!header && line.rfind("# ", 0) == 0)
        {
            const auto sep = line.find(": ", 2);
            if (sep == std::string::npos)
                throw IoError("malformed metadata line: " + line);
            auto key = line.substr(2, sep - 2);
            auto value = line.substr(sep + 2);
            if (key == "id")
                ds.id = value;
            else
                ds.add_metadata(std::move(key), std::move(value));
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(cells, cell, ','))
        {
            if (!header)
                ds.add_column(cell, {});
            else if (c < ds.columns.size())
                ds.columns[c].values.push_back(parse_value(cell));
            else
                throw IoError("row has more cells than the header");
            ++c;
        }
        header = true;
    }
    ds.validate();
    return ds;
}

inline Dataset from_json(const std::string& text)
{
    nlohmann::ordered_json j;
    try
    {
        j = nlohmann::ordered_json::parse(text);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw IoError(std::string("malformed JSON: ") + e.what());
    }
    Dataset ds;
    ds.id = j.value("id", "");
    for (const auto& [k, v] : j.at("metadata").items())
        ds.add_metadata(k, v.get<std::string>());
    for (const auto& [k, v] : j.at("columns").items())
        ds.add_column(k, v.get<std::vector<double>>());
    ds.validate();
    return ds;
}

inline std::string encode(const Dataset& ds, const std::string& format)
{
    if (format == "csv")
        return to_csv(ds);
    if (format == "json")
        return to_json(ds);
    throw Error("unknown format " + format);
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
        throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write to " + path.string() + " failed");
}

/// Writes `<dir>/<id>.<format>` and returns the path.
inline std::filesystem::path write_dataset(const Dataset& ds, const std::filesystem::path& dir,
                                           const std::string& format)
{
    const auto path = dir / (ds.id + "." + format);
    write_text(path, encode(ds, format));
    return path;
}

inline Dataset read_dataset(const std::filesystem::path& path)
{
    const auto text = read_text(path);
    if (path.extension() == ".json")
        return from_json(text);
    return from_csv(text);
}

} // namespace qfpi::io
