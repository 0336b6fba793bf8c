#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qfpi/io/config.hpp"
#include "qfpi/io/dataset.hpp"
#include "qfpi/io/figures.hpp"
#include "qfpi/io/products.hpp"

namespace fs = std::filesystem;
using qfpi::io::RunConfig;

namespace
{

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("qfpi_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string key_of(const std::string& yaml)
{
    try
    {
        qfpi::io::parse_config(yaml);
    }
    catch (const qfpi::ConfigError& e)
    {
        return e.key_path;
    }
    return "<none>";
}

RunConfig light_config()
{
    RunConfig c;
    c.grid.points = 101;
    c.grid.fluct_points = 101;
    c.grid.tau_points = 61;
    return c;
}

} // namespace

TEST(Config, EmptyDocumentGivesDefaults)
{
    const auto c = qfpi::io::parse_config(std::string_view(""));
    EXPECT_EQ(c.fpi.kappa1, 0.5);
    EXPECT_EQ(c.fpi.kappa2, 0.5);
    EXPECT_EQ(c.fpi.kappa0, 0.1);
    EXPECT_EQ(c.fpi.delta, 5.0);
    EXPECT_EQ(c.source.p_in, 1.5);
    EXPECT_EQ(c.source.gamma_max, 3.0);
    EXPECT_EQ(c.grid.points, 2001u);
    EXPECT_EQ(c.format, qfpi::io::Format::csv);
}

TEST(Config, ErrorsNameTheKeyPath)
{
    EXPECT_EQ(key_of("fpi:\n  kappa1: -1\n"), "fpi.kappa1");
    EXPECT_EQ(key_of("fpi:\n  kapa1: 1\n"), "fpi.kapa1");
    EXPECT_EQ(key_of("fpi:\n  kappa2:\n"), "fpi.kappa2");
    EXPECT_EQ(key_of("source:\n  p_in: lots\n"), "source.p_in");
    EXPECT_EQ(key_of("grid:\n  points: -3\n"), "grid.points");
    EXPECT_EQ(key_of("outputs: [spectra, noise]\n"), "outputs[1]");
    EXPECT_EQ(key_of("format: xml\n"), "format");
    EXPECT_EQ(key_of("cavity: {}\n"), "cavity");
    EXPECT_EQ(key_of("sweep:\n  p_in: [1, -2]\n"), "sweep.p_in[1]");
    EXPECT_EQ(key_of("fpi: [1, 2\n"), "");
}

TEST(Config, YamlRoundTrip)
{
    RunConfig c;
    c.fpi.delta = 1.0 / 3.0;
    c.source.p_in = 0.1;
    c.oracle.seed = 18446744073709551615ULL;
    c.out_dir = "some dir: x";
    c.format = qfpi::io::Format::json;
    const auto back = qfpi::io::parse_config(qfpi::io::to_yaml(c));
    EXPECT_EQ(qfpi::io::config_entries(back), qfpi::io::config_entries(c));
}

TEST(Dataset, MetadataEchoesLinewidth)
{
    auto c = light_config();
    c.source.p_in = 50.0;
    const auto ds = qfpi::io::spectra_dataset(c);
    const auto* g = ds.find_metadata("info.gamma_l");
    ASSERT_NE(g, nullptr);
    EXPECT_NEAR(std::stod(*g), 0.058824, 5e-7);
    EXPECT_EQ(*ds.find_metadata("info.regime"), "lasing");
    EXPECT_EQ(*ds.find_metadata("tool"), qfpi::io::tool_version);
}

TEST(Dataset, CsvAndJsonCarryIdenticalValues)
{
    const auto ds = qfpi::io::fluct_dataset(light_config());
    const auto a = qfpi::io::from_csv(qfpi::io::to_csv(ds));
    const auto b = qfpi::io::from_json(qfpi::io::to_json(ds));
    ASSERT_EQ(a.columns.size(), b.columns.size());
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.metadata, b.metadata);
    for (std::size_t i = 0; i < a.columns.size(); ++i)
    {
        EXPECT_EQ(a.columns[i].name, b.columns[i].name);
        EXPECT_EQ(a.columns[i].values, b.columns[i].values);
    }
    // values survive at the written precision
    const auto& orig = ds.columns[1].values;
    for (std::size_t i = 0; i < orig.size(); ++i)
        EXPECT_NEAR(a.columns[1].values[i], orig[i], 1e-8 * std::abs(orig[i]));
}

TEST(Dataset, RerunFromMetadataIsBitIdentical)
{
    auto c = light_config();
    c.fpi.delta = 4.3;
    c.source.p_in = 0.7;
    const auto dir = scratch_dir("rerun");
    for (const char* product : {"spectra", "fluct", "autocorr", "coeffs"})
    {
        const auto path = qfpi::io::write_dataset(qfpi::io::product_dataset(product, c), dir, "csv");
        const auto first = qfpi::io::read_text(path);
        const auto cfg = qfpi::io::config_from_metadata(qfpi::io::read_dataset(path).metadata);
        EXPECT_EQ(qfpi::io::to_csv(qfpi::io::product_dataset(product, cfg)), first) << product;
    }
    fs::remove_all(dir);
}

TEST(Dataset, WriteFailureRaisesIoError)
{
    const auto ds = qfpi::io::coeffs_dataset(light_config());
    EXPECT_THROW(qfpi::io::write_dataset(ds, "/dev/null/sub", "csv"), qfpi::IoError);
    EXPECT_THROW(qfpi::io::read_dataset("/nonexistent/qfpi.csv"), qfpi::IoError);
}

TEST(Products, ColumnsAndShapes)
{
    const auto c = light_config();
    const auto s = qfpi::io::spectra_dataset(c);
    for (const char* col : {"omega", "p_in", "n", "p_t", "p_r", "p_0", "commutator"})
        EXPECT_NE(s.find_column(col), nullptr) << col;
    EXPECT_EQ(s.rows(), 101u);
    const auto a = qfpi::io::autocorr_dataset(c);
    EXPECT_EQ(a.rows(), 61u);
    EXPECT_NE(a.find_metadata("info.dpt_delta_weight"), nullptr);
    EXPECT_EQ(qfpi::io::coeffs_dataset(c).rows(), 1u);
    EXPECT_THROW(qfpi::io::product_dataset("noise", c), qfpi::ConfigError);
}

TEST(Products, SweepIdsCoverEveryPower)
{
    auto c = light_config();
    c.outputs = {"coeffs"};
    const auto all = qfpi::io::sweep_datasets(c);
    ASSERT_EQ(all.size(), 4u);
    EXPECT_EQ(all[0].id, "sweep_p0.1_coeffs");
    EXPECT_EQ(all[3].id, "sweep_p50_coeffs");
}

TEST(Products, TransmittedEnergySplit)
{
    const qfpi::FpiParams f;
    const double expected[3] = {0.48, 0.70, 0.95};
    for (int i = 0; i < 3; ++i)
    {
        const double p = qfpi::io::energy_split_powers()[static_cast<std::size_t>(i)];
        const double frac = qfpi::io::transmitted_left_fraction(f, {p, 1.0, 3.0});
        EXPECT_NEAR(frac, oracle::frozen::split[i], 1e-9);
        EXPECT_NEAR(frac, expected[i], 0.02);
    }
}

TEST(Figures, EveryIdBuildsConsistentColumns)
{
    auto c = light_config();
    for (const auto& id : qfpi::io::figure_ids())
    {
        const auto ds = qfpi::io::run_figure(id, c);
        EXPECT_EQ(ds.id, id);
        EXPECT_NO_THROW(ds.validate());
        EXPECT_GE(ds.columns.size(), 2u) << id;
        EXPECT_GT(ds.rows(), 0u) << id;
    }
    const auto f6 = qfpi::io::run_figure("fig6c", c);
    for (const char* col : {"omega", "dn_total", "dn_classical", "dn_quantum"})
        EXPECT_NE(f6.find_column(col), nullptr) << col;
    EXPECT_THROW(qfpi::io::run_figure("fig10", c), qfpi::ConfigError);
    c.sweep_p_in = {1.0};
    EXPECT_THROW(qfpi::io::run_figure("fig4c", c), qfpi::ConfigError);
}

#ifdef QFPI_CLI_PATH
namespace
{

int run_cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + QFPI_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const auto p = dir / "config.yaml";
    qfpi::io::write_text(p, text);
    return p;
}

} // namespace

TEST(Cli, ExitCodes)
{
    const auto dir = scratch_dir("cli");
    const std::string out = " --out \"" + (dir / "out").string() + "\"";
    const auto light = "grid:\n  points: 51\n  fluct_points: 51\n  tau_points: 31\n";

    const auto good = write_config(dir, light);
    EXPECT_EQ(run_cli("coeffs --config \"" + good.string() + "\"" + out), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "coeffs.csv"));
    EXPECT_EQ(run_cli("spectra --format json --config \"" + good.string() + "\"" + out), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "spectra.json"));

    const auto bad = write_config(dir, "fpi:\n  kappa1: -1\n");
    EXPECT_EQ(run_cli("spectra --config \"" + bad.string() + "\"" + out), 2);
    EXPECT_EQ(run_cli("figure fig42" + out), 2);
    EXPECT_EQ(run_cli("nosuch"), 2);

    const auto narrow = write_config(dir, std::string(light) + "source:\n  gamma_max: 1e-9\n");
    EXPECT_EQ(run_cli("autocorr --config \"" + narrow.string() + "\"" + out), 3);

    EXPECT_EQ(run_cli("coeffs --out /dev/null/sub"), 4);
    EXPECT_EQ(run_cli("coeffs --config /nonexistent/qfpi.yaml" + out), 4);
    fs::remove_all(dir);
}
#endif
