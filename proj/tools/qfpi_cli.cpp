// Command-line front end: computes products and figure datasets and writes
// them as CSV or JSON.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qfpi/errors.hpp"
#include "qfpi/io/config.hpp"
#include "qfpi/io/dataset.hpp"
#include "qfpi/io/figures.hpp"
#include "qfpi/io/products.hpp"

namespace
{

enum ExitCode
{
    ok = 0,
    config_error = 2,
    convergence_error = 3,
    io_error = 4,
};

struct Options
{
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points;
};

qfpi::io::RunConfig load_config(const Options& o)
{
    qfpi::io::RunConfig cfg;
    if (!o.config_path.empty())
    {
        cfg = qfpi::io::parse_config(qfpi::io::read_text(o.config_path));
    }
    if (!o.out_dir.empty())
        cfg.out_dir = o.out_dir;
    if (!o.format.empty())
        cfg.format = o.format == "json" ? qfpi::io::Format::json : qfpi::io::Format::csv;
    if (o.seed)
        cfg.oracle.seed = *o.seed;
    if (o.grid_points)
    {
        cfg.grid.points = *o.grid_points;
        cfg.grid.fluct_points = *o.grid_points;
    }
    qfpi::io::validate(cfg);
    return cfg;
}

void emit(const qfpi::io::Dataset& ds, const qfpi::io::RunConfig& cfg)
{
    const auto path = qfpi::io::write_dataset(ds, cfg.out_dir, qfpi::io::to_string(cfg.format));
    fmt::print("{}\n", path.string());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fluctuation spectra and autocorrelations of a Fabry-Perot cavity driven by a "
                 "finite-linewidth field"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "YAML configuration file");
    app.add_option("--out", opt.out_dir, "output directory (overrides out_dir)");
    app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", opt.seed, "random seed for the stochastic oracle");
    app.add_option("--grid-points", opt.grid_points, "points of the frequency grids")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));

    std::string product;
    for (const char* name : {"spectra", "fluct", "autocorr", "coeffs", "oracle"})
    {
        auto* sub = app.add_subcommand(name, std::string("write the ") + name + " dataset");
        sub->callback([&product, name] { product = name; });
    }
    auto* sweep = app.add_subcommand("sweep", "write every configured output at every swept input power");
    auto* energy = app.add_subcommand("energy-split", "fraction of transmitted power below delta/2");
    auto* figure = app.add_subcommand("figure", "write the data series of a figure");
    std::string figure_id;
    figure->add_option("id", figure_id, "figure id (fig3a ... fig9) or 'all'")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try
    {
        const auto cfg = load_config(opt);
        if (!product.empty())
            emit(qfpi::io::product_dataset(product, cfg), cfg);
        else if (sweep->parsed())
            for (const auto& ds : qfpi::io::sweep_datasets(cfg))
                emit(ds, cfg);
        else if (energy->parsed())
            emit(qfpi::io::energy_split_report(cfg), cfg);
        else if (figure->parsed())
        {
            if (figure_id == "all")
                for (const auto& id : qfpi::io::figure_ids())
                    emit(qfpi::io::run_figure(id, cfg), cfg);
            else
                emit(qfpi::io::run_figure(figure_id, cfg), cfg);
        }
        return ok;
    }
    catch (const qfpi::ConfigError& e)
    {
        fmt::print(stderr, "config error: {}\n", e.what());
        return config_error;
    }
    catch (const qfpi::ParameterError& e)
    {
        fmt::print(stderr, "config error: {}\n", e.what());
        return config_error;
    }
    catch (const qfpi::ConvergenceError& e)
    {
        fmt::print(stderr, "convergence error: {} (best estimate {:.6e}, error bound {:.3e})\n", e.what(),
                   e.best_estimate, e.error_bound);
        return convergence_error;
    }
    catch (const qfpi::CoverageError& e)
    {
        fmt::print(stderr, "convergence error: {}\n", e.what());
        return convergence_error;
    }
    catch (const qfpi::IoError& e)
    {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return io_error;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
