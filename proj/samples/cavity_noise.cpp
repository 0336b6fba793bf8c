// Photon statistics of the cavity mode across the source regimes: mean
// photon number, variance split, and the sign structure of the
// photon-number autocorrelation.

#include <algorithm>
#include <cstdio>

#include "qfpi/qfpi.hpp"

int main()
{
    const qfpi::FpiParams fpi{};  // kappa1 = kappa2 = 0.5, kappa0 = 0.1, delta = 5
    const auto taus = qfpi::default_tau_grid();

    std::printf("%8s %10s %8s %12s %12s %12s %10s\n", "p_in", "gamma_l", "regime", "n", "var_classical",
                "var_quantum", "min g(tau)");
    for (double p : {0.1, 1.5, 5.0, 50.0})
    {
        const qfpi::SourceParams src{p, 1.0, 3.0};
        const double n = qfpi::mean_photon_number(fpi, src);
        const auto ac = qfpi::normalized(qfpi::cavity_autocorr(fpi, src, taus));
        const double lowest = *std::min_element(ac.values.begin(), ac.values.end());
        std::printf("%8.2f %10.5f %8s %12.6f %12.6f %12.6f %10.4f\n", p, qfpi::gamma_l(src),
                    qfpi::to_string(qfpi::classify_regime(src)), n, n * n, n, lowest);
    }
    return 0;
}
