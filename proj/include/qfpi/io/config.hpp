#pragma once

// Run configuration: a YAML document with nested sections. Every key is
// optional; absent keys take the reference parameter set. Unknown keys are
// rejected so that typos never pass silently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "qfpi/errors.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/source.hpp"
#include "qfpi/stochastic.hpp"

namespace qfpi::io
{

inline constexpr const char* tool_version = "qfpi 1.0.0";
// Source escape rate used to convert the dimensionless units, in rad/s.
inline constexpr double kappa_l_rad_per_s = 4e11;

enum class Format
{
    csv,
    json
};

inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

struct GridSpec
{
    double omega_min = -10.0;
    double omega_max = 15.0;
    std::size_t points = 2001;
    double fluct_max = 10.0;  // fluctuation spectra use [-fluct_max, fluct_max]
    std::size_t fluct_points = 2001;
    double tau_max = 12.0;
    std::size_t tau_points = 601;
};

inline const std::vector<std::string>& known_products()
{
    static const std::vector<std::string> p{"spectra", "fluct", "autocorr", "coeffs", "oracle"};
    return p;
}

struct RunConfig
{
    FpiParams fpi;
    SourceParams source;
    GridSpec grid;
    std::vector<std::string> outputs{"spectra", "fluct", "autocorr", "coeffs"};
    Format format = Format::csv;
    std::string out_dir = "out";
    SimConfig oracle;
    std::vector<double> sweep_p_in{0.1, 1.5, 5.0, 50.0};
};

namespace detail
{

using Handler = std::function<void(RunConfig&, const YAML::Node&, const std::string&)>;

template <class T>
T scalar(const YAML::Node& n, const std::string& key, const char* expected)
{
    if (!n.IsScalar())
        throw ConfigError(key, std::string("expected ") + expected);
    try
    {
        return n.as<T>();
    }
    catch (const YAML::Exception&)
    {
        throw ConfigError(key, std::string("expected ") + expected + ", got '" + n.Scalar() + "'");
    }
}

inline double number(const YAML::Node& n, const std::string& key)
{
    const double v = scalar<double>(n, key, "a number");
    if (!std::isfinite(v))
        throw ConfigError(key, "must be finite");
    return v;
}

inline std::size_t count(const YAML::Node& n, const std::string& key)
{
    const auto text = n.IsScalar() ? n.Scalar() : std::string();
    if (!text.empty() && text.front() == '-')
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(scalar<std::uint64_t>(n, key, "a non-negative integer"));
}

inline const std::map<std::string, std::map<std::string, Handler>>& schema()
{
    static const std::map<std::string, std::map<std::string, Handler>> s{
        {"fpi",
         {{"kappa1", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.fpi.kappa1 = number(n, k); }},
          {"kappa2", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.fpi.kappa2 = number(n, k); }},
          {"kappa0", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.fpi.kappa0 = number(n, k); }},
          {"delta", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.fpi.delta = number(n, k); }}}},
        {"source",
         {{"p_in", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.source.p_in = number(n, k); }},
          {"gamma_max",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.source.gamma_max = number(n, k); }},
          {"kappa_l",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.source.kappa_l = number(n, k); }}}},
        {"grid",
         {{"omega_min", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.omega_min = number(n, k); }},
          {"omega_max", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.omega_max = number(n, k); }},
          {"points", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.points = count(n, k); }},
          {"fluct_max", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.fluct_max = number(n, k); }},
          {"fluct_points",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.fluct_points = count(n, k); }},
          {"tau_max", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.tau_max = number(n, k); }},
          {"tau_points",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.grid.tau_points = count(n, k); }}}},
        {"oracle",
         {{"dt", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.oracle.dt = number(n, k); }},
          {"n_steps", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.oracle.n_steps = count(n, k); }},
          {"n_realizations",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.oracle.n_realizations = count(n, k); }},
          {"seed",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) {
               c.oracle.seed = scalar<std::uint64_t>(n, k, "an unsigned 64-bit integer");
           }},
          {"burn_in", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.oracle.burn_in = count(n, k); }},
          {"segment_length",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.oracle.segment_length = count(n, k); }},
          {"batches_per_realization",
           [](RunConfig& c, const YAML::Node& n, const std::string& k) {
               c.oracle.batches_per_realization = count(n, k);
           }}}},
        {"sweep",
         {{"p_in", [](RunConfig& c, const YAML::Node& n, const std::string& k) {
               if (!n.IsSequence() || n.size() == 0)
                   throw ConfigError(k, "expected a non-empty list of numbers");
               c.sweep_p_in.clear();
               for (std::size_t i = 0; i < n.size(); ++i)
               {
                   const std::string item = k + "[" + std::to_string(i) + "]";
                   const double p = number(n[i], item);
                   if (!(p >= 0))
                       throw ConfigError(item, "must be >= 0");
                   c.sweep_p_in.push_back(p);
               }
           }}}},
    };
    return s;
}

inline std::string joined_keys(const std::map<std::string, Handler>& m)
{
    std::string out;
    for (const auto& [k, v] : m)
        out += (out.empty() ? "" : ", ") + k;
    return out;
}

} // namespace detail

/// Checks every invariant; each failure names the key and the remedy.
inline void validate(const RunConfig& c)
{
    auto need = [](bool ok, const char* key, const std::string& what) {
        if (!ok)
            throw ConfigError(key, what);
    };
    need(c.fpi.kappa1 > 0, "fpi.kappa1", "must be > 0 (input coupling required); set a positive rate");
    need(c.fpi.kappa2 >= 0, "fpi.kappa2", "must be >= 0");
    need(c.fpi.kappa0 >= 0, "fpi.kappa0", "must be >= 0");
    need(c.source.p_in >= 0, "source.p_in", "must be >= 0");
    need(c.source.gamma_max > 0, "source.gamma_max", "must be > 0");
    need(c.source.kappa_l > 0, "source.kappa_l", "must be > 0");
    need(c.grid.omega_max > c.grid.omega_min, "grid.omega_max", "must exceed grid.omega_min");
    need(c.grid.points >= 2, "grid.points", "need at least 2 points");
    need(c.grid.fluct_max > 0, "grid.fluct_max", "must be > 0");
    need(c.grid.fluct_points >= 2, "grid.fluct_points", "need at least 2 points");
    need(c.grid.tau_max > 0, "grid.tau_max", "must be > 0");
    need(c.grid.tau_points >= 2, "grid.tau_points", "need at least 2 points");
    need(!c.outputs.empty(), "outputs", "list at least one product");
    for (double p : c.sweep_p_in)
        need(p >= 0, "sweep.p_in", "every entry must be >= 0");
    need(!c.out_dir.empty(), "out_dir", "must not be empty");
}

/// Builds a validated RunConfig from a parsed YAML document.
inline RunConfig parse_config(const YAML::Node& root)
{
    RunConfig c;
    if (!root || root.IsNull())
    {
        validate(c);
        return c;
    }
    if (!root.IsMap())
        throw ConfigError("", "configuration must be a mapping of sections");
    const auto& sch = detail::schema();
    for (const auto& entry : root)
    {
        const auto key = entry.first.as<std::string>();
        const YAML::Node& value = entry.second;
        if (value.IsNull())
            throw ConfigError(key, "value is missing");
        if (key == "outputs")
        {
            if (!value.IsSequence() || value.size() == 0)
                throw ConfigError(key, "expected a non-empty list of products");
            c.outputs.clear();
            for (std::size_t i = 0; i < value.size(); ++i)
            {
                const auto name = detail::scalar<std::string>(value[i], key, "a product name");
                const auto& known = known_products();
                if (std::find(known.begin(), known.end(), name) == known.end())
                    throw ConfigError(key + "[" + std::to_string(i) + "]",
                                      "unknown product '" + name +
                                          "'; use spectra, fluct, autocorr, coeffs or oracle");
                c.outputs.push_back(name);
            }
            continue;
        }
        if (key == "format")
        {
            const auto f = detail::scalar<std::string>(value, key, "csv or json");
            if (f == "csv")
                c.format = Format::csv;
            else if (f == "json")
                c.format = Format::json;
            else
                throw ConfigError(key, "expected csv or json, got '" + f + "'");
            continue;
        }
        if (key == "out_dir")
        {
            c.out_dir = detail::scalar<std::string>(value, key, "a path");
            continue;
        }
        const auto section = sch.find(key);
        if (section == sch.end())
            throw ConfigError(key, "unknown key; expected one of fpi, source, grid, outputs, format, "
                                   "out_dir, oracle, sweep");
        if (!value.IsMap())
            throw ConfigError(key, "expected a mapping");
        for (const auto& sub : value)
        {
            const auto name = sub.first.as<std::string>();
            const std::string path = key + "." + name;
            const auto h = section->second.find(name);
            if (h == section->second.end())
                throw ConfigError(path, "unknown key; expected one of " + detail::joined_keys(section->second));
            if (sub.second.IsNull())
                throw ConfigError(path, "value is missing");
            h->second(c, sub.second, path);
        }
    }
    validate(c);
    return c;
}

inline RunConfig parse_config(std::string_view text)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(std::string(text));
    }
    catch (const YAML::Exception& e)
    {
        throw ConfigError("", std::string("malformed document: ") + e.what());
    }
    return parse_config(root);
}

inline std::string format_exact(double v) { return fmt::format("{:.17g}", v); }

/// Flat (dotted key, YAML value) pairs covering every field of the config.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c)
{
    std::vector<std::pair<std::string, std::string>> e;
    auto num = [&](const char* k, double v) { e.emplace_back(k, format_exact(v)); };
    auto cnt = [&](const char* k, std::uint64_t v) { e.emplace_back(k, std::to_string(v)); };
    num("fpi.kappa1", c.fpi.kappa1);
    num("fpi.kappa2", c.fpi.kappa2);
    num("fpi.kappa0", c.fpi.kappa0);
    num("fpi.delta", c.fpi.delta);
    num("source.p_in", c.source.p_in);
    num("source.gamma_max", c.source.gamma_max);
    num("source.kappa_l", c.source.kappa_l);
    num("grid.omega_min", c.grid.omega_min);
    num("grid.omega_max", c.grid.omega_max);
    cnt("grid.points", c.grid.points);
    num("grid.fluct_max", c.grid.fluct_max);
    cnt("grid.fluct_points", c.grid.fluct_points);
    num("grid.tau_max", c.grid.tau_max);
    cnt("grid.tau_points", c.grid.tau_points);
    std::string outs;
    for (const auto& o : c.outputs)
        outs += (outs.empty() ? "" : ", ") + o;
    e.emplace_back("outputs", "[" + outs + "]");
    e.emplace_back("format", to_string(c.format));
    YAML::Emitter dir;
    dir << YAML::DoubleQuoted << c.out_dir;
    e.emplace_back("out_dir", dir.c_str());
    num("oracle.dt", c.oracle.dt);
    cnt("oracle.n_steps", c.oracle.n_steps);
    cnt("oracle.n_realizations", c.oracle.n_realizations);
    cnt("oracle.seed", c.oracle.seed);
    cnt("oracle.burn_in", c.oracle.burn_in);
    cnt("oracle.segment_length", c.oracle.segment_length);
    cnt("oracle.batches_per_realization", c.oracle.batches_per_realization);
    std::string ps;
    for (double p : c.sweep_p_in)
        ps += (ps.empty() ? "" : ", ") + format_exact(p);
    e.emplace_back("sweep.p_in", "[" + ps + "]");
    return e;
}

/// YAML text that parses back to the same configuration.
inline std::string to_yaml(const RunConfig& c)
{
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    std::string out;
    for (const auto& [key, value] : config_entries(c))
    {
        const auto dot = key.find('.');
        if (dot == std::string::npos)
            out += key + ": " + value + "\n";
        else
            sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
    }
    for (const auto& [name, entries] : sections)
    {
        out += name + ":\n";
        for (const auto& [k, v] : entries)
            out += "  " + k + ": " + v + "\n";
    }
    return out;
}

/// Rebuilds a configuration from metadata entries whose keys carry `prefix`.
inline RunConfig config_from_metadata(const std::vector<std::pair<std::string, std::string>>& metadata,
                                      const std::string& prefix = "config.")
{
    YAML::Node root(YAML::NodeType::Map);
    for (const auto& [key, value] : metadata)
    {
        if (key.rfind(prefix, 0) != 0)
            continue;
        const auto path = key.substr(prefix.size());
        const auto dot = path.find('.');
        YAML::Node v = YAML::Load(value);
        if (dot == std::string::npos)
            root[path] = v;
        else
            root[path.substr(0, dot)][path.substr(dot + 1)] = v;
    }
    return parse_config(root);
}

} // namespace qfpi::io
