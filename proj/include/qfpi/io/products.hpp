#pragma once

// Datasets for each computed product. Every dataset carries the complete
// configuration under "config.*" (enough to rerun it) and derived scalars
// under "info.*".

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qfpi/autocorrelation.hpp"
#include "qfpi/fluctuation.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/io/config.hpp"
#include "qfpi/io/dataset.hpp"
#include "qfpi/quadrature.hpp"
#include "qfpi/source.hpp"
#include "qfpi/stochastic.hpp"

namespace qfpi::io
{

inline std::string p_label(double p) { return fmt::format("p{:g}", p); }

inline Dataset base_dataset(const std::string& id, const RunConfig& cfg)
{
    Dataset ds;
    ds.id = id;
    ds.add_metadata("tool", tool_version);
    for (const auto& [k, v] : config_entries(cfg))
        ds.add_metadata("config." + k, v);
    ds.add_metadata("info.kappa_l_rad_per_s", format_exact(kappa_l_rad_per_s));
    ds.add_metadata("info.units", "frequencies and rates in kappa_l, times in 1/kappa_l");
    ds.add_metadata("info.kappa_t", format_exact(cfg.fpi.kappa_t()));
    ds.add_metadata("info.gamma_l", format_exact(gamma_l(cfg.source)));
    ds.add_metadata("info.regime", to_string(classify_regime(cfg.source)));
    return ds;
}

inline RunConfig with_p_in(RunConfig cfg, double p_in)
{
    cfg.source.p_in = p_in;
    return cfg;
}

inline std::vector<double> spectrum_grid(const RunConfig& cfg)
{
    return uniform_grid(cfg.grid.omega_min, cfg.grid.omega_max, cfg.grid.points);
}

inline std::vector<double> fluct_grid(const RunConfig& cfg)
{
    return symmetric_grid(cfg.grid.fluct_max, cfg.grid.fluct_points);
}

inline std::vector<double> tau_grid(const RunConfig& cfg)
{
    return uniform_grid(0.0, cfg.grid.tau_max, cfg.grid.tau_points);
}

/// Field and power spectra on the spectrum grid.
inline Dataset spectra_dataset(const RunConfig& cfg)
{
    const auto& f = cfg.fpi;
    const auto& s = cfg.source;
    const auto w = spectrum_grid(cfg);
    Dataset ds = base_dataset("spectra", cfg);
    ds.add_metadata("info.n_mean", format_exact(mean_photon_number(f, s)));
    ds.add_metadata("info.R", format_exact(reflection_coefficient(f, s)));
    ds.add_metadata("info.T", format_exact(transmission_coefficient(f, s)));
    ds.add_metadata("info.absorbed", format_exact(absorption_coefficient(f, s)));
    ds.add_column("omega", w);
    ds.add_column("p_in", tabulate([&](double x) { return input_spectrum(x, s); }, w).values);
    ds.add_column("n", tabulate([&](double x) { return cavity_field_spectrum(x, f, s); }, w).values);
    ds.add_column("p_t", tabulate([&](double x) { return transmitted_spectrum(x, f, s); }, w).values);
    ds.add_column("p_r", tabulate([&](double x) { return reflected_spectrum(x, f, s); }, w).values);
    ds.add_column("p_0", tabulate([&](double x) { return absorbed_spectrum(x, f, s); }, w).values);
    ds.add_column("commutator", tabulate([&](double x) { return commutator_spectrum(x, f); }, w).values);
    return ds;
}

/// Fluctuation spectra; white floors go to metadata.
inline Dataset fluct_dataset(const RunConfig& cfg)
{
    const auto& f = cfg.fpi;
    const auto& s = cfg.source;
    const auto w = fluct_grid(cfg);
    const auto dn = cavity_fluct_decomposition(w, f, s);
    const auto dt = transmitted_fluct_decomposition(w, f, s);
    const auto dr = reflected_fluct_decomposition(w, f, s);
    const double n = mean_photon_number(f, s);
    Dataset ds = base_dataset("fluct", cfg);
    ds.add_metadata("info.n_mean", format_exact(n));
    ds.add_metadata("info.variance", format_exact(n * (n + 1.0)));
    ds.add_metadata("info.dpt_white_floor", format_exact(dt.white_floor));
    ds.add_metadata("info.dpr_white_floor", format_exact(dr.white_floor));
    ds.add_metadata("info.quadrature_fallbacks",
                    std::to_string(dn.quadrature_fallbacks + dt.quadrature_fallbacks + dr.quadrature_fallbacks));
    ds.add_column("omega", w);
    ds.add_column("dn_total", dn.total);
    ds.add_column("dn_classical", dn.classical);
    ds.add_column("dn_quantum", dn.quantum);
    ds.add_column("dpt_colored", dt.classical);
    ds.add_column("dpr_colored", dr.classical);
    return ds;
}

/// Autocorrelations; delta weights and zero-lag normalizations go to metadata.
inline Dataset autocorr_dataset(const RunConfig& cfg)
{
    const auto& f = cfg.fpi;
    const auto& s = cfg.source;
    const auto taus = tau_grid(cfg);
    const auto an = cavity_autocorr(f, s, taus);
    const auto at = transmitted_autocorr(f, s, taus);
    const auto ar = reflected_autocorr(f, s, taus);
    Dataset ds = base_dataset("autocorr", cfg);
    ds.add_metadata("info.dn_norm", format_exact(an.values.front()));
    ds.add_metadata("info.dpt_norm", format_exact(at.values.front()));
    ds.add_metadata("info.dpr_norm", format_exact(ar.values.front()));
    ds.add_metadata("info.dpt_delta_weight", format_exact(at.delta_weight));
    ds.add_metadata("info.dpr_delta_weight", format_exact(ar.delta_weight));
    if (s.p_in > 0)
        ds.add_metadata("info.dpr_exp_rms_deviation", format_exact(reflected_fit_report(f, s, ar).rms_deviation));
    ds.add_column("tau", taus);
    ds.add_column("dn", an.values);
    ds.add_column("dn_classical", *an.classical);
    ds.add_column("dn_quantum", *an.quantum);
    ds.add_column("dpt_colored", at.values);
    ds.add_column("dpr_colored", ar.values);
    return ds;
}

inline Dataset coeffs_dataset(const RunConfig& cfg)
{
    const auto& f = cfg.fpi;
    const auto& s = cfg.source;
    const double n = mean_photon_number(f, s);
    Dataset ds = base_dataset("coeffs", cfg);
    ds.add_column("gamma_l", {gamma_l(s)});
    ds.add_column("n_mean", {n});
    ds.add_column("variance", {n * (n + 1.0)});
    ds.add_column("R", {reflection_coefficient(f, s)});
    ds.add_column("T", {transmission_coefficient(f, s)});
    ds.add_column("absorbed", {absorption_coefficient(f, s)});
    return ds;
}

/// Simulated classical intensity spectra beside the analytic classical terms.
inline Dataset oracle_dataset(const RunConfig& cfg)
{
    const auto& f = cfg.fpi;
    const auto& s = cfg.source;
    const auto r = run_oracle(f, s, cfg.oracle);
    auto cav_ref = [&](double w) { return cavity_fluctuation_spectrum(w, f, s).classical; };
    auto in_ref = [&](double w) { return s.p_in * s.p_in * lorentz(w, 2.0 * gamma_l(s)); };

    Dataset ds = base_dataset("oracle", cfg);
    ds.add_metadata("info.n_mean_analytic", format_exact(mean_photon_number(f, s)));
    ds.add_metadata("info.n_mean_simulated", format_exact(r.cavity_mean.mean));
    ds.add_metadata("info.n_mean_standard_error", format_exact(r.cavity_mean.standard_error));
    ds.add_metadata("info.input_mean_simulated", format_exact(r.input_mean.mean));
    ds.add_metadata("info.input_mean_standard_error", format_exact(r.input_mean.standard_error));
    ds.add_metadata("info.segments", std::to_string(r.segments));
    ds.add_metadata("info.cavity_rms_deviation",
                    format_exact(relative_rms_deviation(r.cavity_spectrum, cav_ref, cfg.grid.fluct_max)));
    ds.add_metadata("info.input_rms_deviation",
                    format_exact(relative_rms_deviation(r.input_spectrum, in_ref, cfg.grid.fluct_max)));
    std::string warnings;
    for (const auto& w : r.warnings)
        warnings += (warnings.empty() ? "" : "; ") + w;
    if (!warnings.empty())
        ds.add_metadata("info.warnings", warnings);

    std::vector<double> w, sim, ana, isim, iana;
    for (std::size_t k = 0; k < r.cavity_spectrum.omegas.size(); ++k)
    {
        const double x = r.cavity_spectrum.omegas[k];
        if (x > cfg.grid.fluct_max)
            break;
        w.push_back(x);
        sim.push_back(r.cavity_spectrum.values[k]);
        ana.push_back(cav_ref(x));
        isim.push_back(r.input_spectrum.values[k]);
        iana.push_back(in_ref(x));
    }
    ds.add_column("omega", w);
    ds.add_column("dn_classical_simulated", sim);
    ds.add_column("dn_classical_analytic", ana);
    ds.add_column("dpin_simulated", isim);
    ds.add_column("dpin_analytic", iana);
    return ds;
}

/// Fraction of the transmitted power carried by frequencies below delta/2.
inline double transmitted_left_fraction(const FpiParams& fpi, const SourceParams& src)
{
    if (!(fpi.delta > 0))
        throw ParameterError("energy split needs delta > 0");
    if (src.p_in == 0.0)
        return 0.0;
    const auto f = [&](double w) { return transmitted_spectrum(w, fpi, src); };
    const double inf = std::numeric_limits<double>::infinity();
    const double left = adaptive_integral(f, -inf, 0.5 * fpi.delta, {}, std::vector<double>{0.0}).value;
    const double right = adaptive_integral(f, 0.5 * fpi.delta, inf, {}, std::vector<double>{fpi.delta}).value;
    return left / (left + right);
}

inline const std::vector<double>& energy_split_powers()
{
    static const std::vector<double> p{1.5, 5.0, 50.0};
    return p;
}

inline Dataset energy_split_report(const RunConfig& cfg)
{
    Dataset ds = base_dataset("energy_split", cfg);
    std::vector<double> ps, fr;
    for (double p : energy_split_powers())
    {
        ps.push_back(p);
        fr.push_back(transmitted_left_fraction(cfg.fpi, with_p_in(cfg, p).source));
    }
    ds.add_column("p_in", ps);
    ds.add_column("left_fraction", fr);
    return ds;
}

inline Dataset product_dataset(const std::string& product, const RunConfig& cfg)
{
    if (product == "spectra")
        return spectra_dataset(cfg);
    if (product == "fluct")
        return fluct_dataset(cfg);
    if (product == "autocorr")
        return autocorr_dataset(cfg);
    if (product == "coeffs")
        return coeffs_dataset(cfg);
    if (product == "oracle")
        return oracle_dataset(cfg);
    throw ConfigError("outputs", "unknown product '" + product + "'");
}

/// Every requested product at every swept input power.
inline std::vector<Dataset> sweep_datasets(const RunConfig& cfg)
{
    std::vector<Dataset> out;
    for (double p : cfg.sweep_p_in)
    {
        const RunConfig c = with_p_in(cfg, p);
        for (const auto& product : cfg.outputs)
        {
            Dataset ds = product_dataset(product, c);
            ds.id = "sweep_" + p_label(p) + "_" + product;
            out.push_back(std::move(ds));
        }
    }
    return out;
}

} // namespace qfpi::io
