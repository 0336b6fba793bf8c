// Fluctuation spectrum of the cavity photon number for a source given only
// as a table, compared with the closed form for the same Lorentzian line.

#include <cstdio>

#include "qfpi/qfpi.hpp"

int main()
{
    const qfpi::FpiParams fpi{};
    const qfpi::SourceParams src{5.0, 1.0, 3.0};

    // wide, fine table; shifts that are multiples of the spacing hit nodes exactly
    const auto grid = qfpi::symmetric_grid(600.0, 96001);
    const auto n_tab = qfpi::tabulate([&](double w) { return qfpi::cavity_field_spectrum(w, fpi, src); }, grid);
    const auto c_tab = qfpi::tabulate([&](double w) { return qfpi::commutator_spectrum(w, fpi); }, grid);

    std::printf("%8s %14s %14s %10s\n", "omega", "tabulated", "closed form", "rel diff");
    for (double w : {0.0, 1.25, 2.5, 5.0, 7.5})
    {
        const double tab = qfpi::general_cavity_fluct_spectrum(n_tab, c_tab, w).colored();
        const double exact = qfpi::cavity_fluctuation_spectrum(w, fpi, src).total();
        std::printf("%8.3f %14.8e %14.8e %10.2e\n", w, tab, exact, (tab - exact) / exact);
    }
    return 0;
}
