#pragma once

// Data series for redrawing the published figures. Panels a-d of a figure
// use the first four swept input powers in order.

#include <string>
#include <vector>

#include "qfpi/autocorrelation.hpp"
#include "qfpi/fluctuation.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/io/config.hpp"
#include "qfpi/io/dataset.hpp"
#include "qfpi/io/products.hpp"
#include "qfpi/source.hpp"

namespace qfpi::io
{

inline const std::vector<std::string>& figure_ids()
{
    static const std::vector<std::string> ids{"fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d",
                                              "fig5a", "fig5b", "fig6a", "fig6b", "fig6c", "fig6d",
                                              "fig7a", "fig7b", "fig8a", "fig8b", "fig8c", "fig8d",
                                              "fig9"};
    return ids;
}

namespace detail
{

inline double panel_power(const RunConfig& cfg, const std::string& id)
{
    const auto idx = static_cast<std::size_t>(id.back() - 'a');
    if (idx >= cfg.sweep_p_in.size())
        throw ConfigError("sweep.p_in", "figure " + id + " needs at least " + std::to_string(idx + 1) +
                                            " swept input powers");
    return cfg.sweep_p_in[idx];
}

inline void add_set_metadata(Dataset& ds, const RunConfig& cfg, double p)
{
    const auto s = with_p_in(cfg, p).source;
    ds.add_metadata("info." + p_label(p) + ".gamma_l", format_exact(gamma_l(s)));
}

inline Dataset fig3a(const RunConfig& cfg)
{
    Dataset ds = base_dataset("fig3a", cfg);
    const auto ps = uniform_grid(0.0, 50.0, 501);
    std::vector<double> n, g;
    for (double p : ps)
    {
        const auto s = with_p_in(cfg, p).source;
        n.push_back(mean_photon_number(cfg.fpi, s));
        g.push_back(gamma_l(s));
    }
    ds.add_column("p_in", ps);
    ds.add_column("n_mean", n);
    ds.add_column("gamma_l", g);
    return ds;
}

inline Dataset fig3b(const RunConfig& cfg)
{
    // finite width at p_in = kappa_l, i.e. gamma_l = gamma_max / 2
    RunConfig c = with_p_in(cfg, cfg.source.kappa_l);
    Dataset ds = base_dataset("fig3b", c);
    const auto deltas = symmetric_grid(15.0, 601);
    std::vector<double> r, t, rm, tm;
    for (double d : deltas)
    {
        FpiParams f = c.fpi;
        f.delta = d;
        r.push_back(reflection_coefficient(f, c.source));
        t.push_back(transmission_coefficient(f, c.source));
        const double kt = f.kappa_t();
        rm.push_back(1.0 - loss_weight(f) * lorentz(d, kt));
        tm.push_back(2.0 * f.kappa1 * f.kappa2 / kt * lorentz(d, kt));
    }
    ds.add_column("delta", deltas);
    ds.add_column("R_finite", r);
    ds.add_column("T_finite", t);
    ds.add_column("R_monochromatic", rm);
    ds.add_column("T_monochromatic", tm);
    return ds;
}

inline Dataset fig4(const RunConfig& cfg, const std::string& id)
{
    const RunConfig c = with_p_in(cfg, panel_power(cfg, id));
    Dataset ds = base_dataset(id, c);
    const auto w = spectrum_grid(c);
    ds.add_column("omega", w);
    ds.add_column("p_r", tabulate([&](double x) { return reflected_spectrum(x, c.fpi, c.source); }, w).values);
    ds.add_column("p_t", tabulate([&](double x) { return transmitted_spectrum(x, c.fpi, c.source); }, w).values);
    ds.add_column("p_in", tabulate([&](double x) { return input_spectrum(x, c.source); }, w).values);
    return ds;
}

inline Dataset fig5a(const RunConfig& cfg)
{
    Dataset ds = base_dataset("fig5a", cfg);
    ds.add_metadata("info.normalization", "n(omega) in units of 1/kappa_l");
    const auto w = spectrum_grid(cfg);
    ds.add_column("omega", w);
    for (double p : cfg.sweep_p_in)
    {
        const auto s = with_p_in(cfg, p).source;
        add_set_metadata(ds, cfg, p);
        ds.add_column("n_" + p_label(p),
                      tabulate([&](double x) { return cavity_field_spectrum(x, cfg.fpi, s); }, w).values);
    }
    return ds;
}

inline Dataset fig5b(const RunConfig& cfg)
{
    Dataset ds = base_dataset("fig5b", cfg);
    const auto w = fluct_grid(cfg);
    ds.add_column("omega", w);
    for (double p : cfg.sweep_p_in)
    {
        const auto s = with_p_in(cfg, p).source;
        add_set_metadata(ds, cfg, p);
        ds.add_column("dn_" + p_label(p), cavity_fluct_decomposition(w, cfg.fpi, s).total);
    }
    return ds;
}

inline Dataset fig6(const RunConfig& cfg, const std::string& id)
{
    const RunConfig c = with_p_in(cfg, panel_power(cfg, id));
    Dataset ds = base_dataset(id, c);
    const auto w = fluct_grid(c);
    const auto d = cavity_fluct_decomposition(w, c.fpi, c.source);
    ds.add_column("omega", w);
    ds.add_column("dn_total", d.total);
    ds.add_column("dn_classical", d.classical);
    ds.add_column("dn_quantum", d.quantum);
    return ds;
}

inline Dataset fig7(const RunConfig& cfg, bool transmitted)
{
    Dataset ds = base_dataset(transmitted ? "fig7a" : "fig7b", cfg);
    const auto w = fluct_grid(cfg);
    ds.add_column("omega", w);
    const std::string name = transmitted ? "dpt" : "dpr";
    for (double p : cfg.sweep_p_in)
    {
        const auto s = with_p_in(cfg, p).source;
        const auto d = transmitted ? transmitted_fluct_decomposition(w, cfg.fpi, s)
                                   : reflected_fluct_decomposition(w, cfg.fpi, s);
        add_set_metadata(ds, cfg, p);
        ds.add_metadata("info." + p_label(p) + "." + name + "_white_floor", format_exact(d.white_floor));
        ds.add_column(name + "_colored_" + p_label(p), d.classical);
    }
    return ds;
}

inline Dataset fig8(const RunConfig& cfg, const std::string& id)
{
    const RunConfig c = with_p_in(cfg, panel_power(cfg, id));
    Dataset ds = base_dataset(id, c);
    const auto taus = tau_grid(c);
    const auto raw = cavity_autocorr(c.fpi, c.source, taus);
    const double norm = raw.values.front();
    ds.add_metadata("info.normalization", format_exact(norm));
    const auto a = normalized(raw, norm);
    ds.add_column("tau", taus);
    ds.add_column("dn_normalized", a.values);
    ds.add_column("dn_classical_normalized", *a.classical);
    ds.add_column("dn_quantum_normalized", *a.quantum);
    return ds;
}

inline Dataset fig9(const RunConfig& cfg)
{
    Dataset ds = base_dataset("fig9", cfg);
    const auto taus = tau_grid(cfg);
    ds.add_column("tau", taus);
    for (double p : cfg.sweep_p_in)
    {
        const auto s = with_p_in(cfg, p).source;
        const auto raw = transmitted_autocorr(cfg.fpi, s, taus);
        const double norm = raw.values.front();
        add_set_metadata(ds, cfg, p);
        ds.add_metadata("info." + p_label(p) + ".normalization", format_exact(norm));
        ds.add_metadata("info." + p_label(p) + ".delta_weight", format_exact(raw.delta_weight));
        if (norm > 0)
            ds.add_column("dpt_normalized_" + p_label(p), normalized(raw, norm).values);
        else
            ds.add_column("dpt_normalized_" + p_label(p), std::vector<double>(taus.size(), 0.0));
    }
    return ds;
}

} // namespace detail

inline Dataset run_figure(const std::string& id, const RunConfig& cfg)
{
    if (id == "fig3a")
        return detail::fig3a(cfg);
    if (id == "fig3b")
        return detail::fig3b(cfg);
    if (id.size() == 5 && id.rfind("fig4", 0) == 0 && id[4] >= 'a' && id[4] <= 'd')
        return detail::fig4(cfg, id);
    if (id == "fig5a")
        return detail::fig5a(cfg);
    if (id == "fig5b")
        return detail::fig5b(cfg);
    if (id.size() == 5 && id.rfind("fig6", 0) == 0 && id[4] >= 'a' && id[4] <= 'd')
        return detail::fig6(cfg, id);
    if (id == "fig7a")
        return detail::fig7(cfg, true);
    if (id == "fig7b")
        return detail::fig7(cfg, false);
    if (id.size() == 5 && id.rfind("fig8", 0) == 0 && id[4] >= 'a' && id[4] <= 'd')
        return detail::fig8(cfg, id);
    if (id == "fig9")
        return detail::fig9(cfg);
    std::string known;
    for (const auto& k : figure_ids())
        known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("figure", "unknown figure id '" + id + "'; expected one of " + known);
}

} // namespace qfpi::io
