#pragma once

// Single-mode Fabry-Perot cavity driven through mirror 1 by the source field.
//
// Optical frequencies omega are measured from the input carrier omega_l, so
// the input line sits at 0 and the cavity mode at delta.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qfpi/detail/parallel.hpp"
#include "qfpi/errors.hpp"
#include "qfpi/lorentz.hpp"
#include "qfpi/source.hpp"

namespace qfpi
{

struct FpiParams
{
    double kappa1 = 0.5;  // input mirror
    double kappa2 = 0.5;  // output mirror
    double kappa0 = 0.1;  // absorption
    double delta = 5.0;   // mode minus carrier frequency

    double kappa_t() const { return kappa1 + kappa2 + kappa0; }

    void validate() const
    {
        if (!(kappa1 > 0) || !std::isfinite(kappa1))
            throw ParameterError("fpi kappa1 must be > 0 (input coupling required)");
        if (!(kappa2 >= 0) || !std::isfinite(kappa2))
            throw ParameterError("fpi kappa2 must be >= 0");
        if (!(kappa0 >= 0) || !std::isfinite(kappa0))
            throw ParameterError("fpi kappa0 must be >= 0");
        if (!std::isfinite(delta))
            throw ParameterError("fpi delta must be finite");
    }
};

// Tabulated spectral density on a strictly increasing frequency grid.
struct SpectrumGrid
{
    std::vector<double> omegas;
    std::vector<double> values;

    void validate() const
    {
        if (omegas.size() != values.size())
            throw ParameterError("SpectrumGrid: omegas and values differ in length");
        if (omegas.size() < 2)
            throw ParameterError("SpectrumGrid: need at least two points");
        for (std::size_t i = 0; i < omegas.size(); ++i)
        {
            if (!std::isfinite(omegas[i]) || !std::isfinite(values[i]))
                throw ParameterError("SpectrumGrid: non-finite entry");
            if (i > 0 && !(omegas[i] > omegas[i - 1]))
                throw ParameterError("SpectrumGrid: omegas must be strictly increasing");
        }
    }
};

/// n points from lo to hi inclusive.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n)
{
    if (n < 2 || !(hi > lo))
        throw ParameterError("uniform_grid: need n >= 2 and hi > lo");
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + h * static_cast<double>(i);
    g.back() = hi;
    return g;
}

/// Symmetric grid on [-half_width, half_width]; mirrored so that g[i] == -g[n-1-i].
inline std::vector<double> symmetric_grid(double half_width, std::size_t n)
{
    auto g = uniform_grid(-half_width, half_width, n);
    for (std::size_t i = 0; i < n / 2; ++i)
        g[n - 1 - i] = -g[i];
    if (n % 2 == 1)
        g[n / 2] = 0.0;
    return g;
}

template <class F>
SpectrumGrid tabulate(F&& f, std::vector<double> omegas)
{
    SpectrumGrid s{std::move(omegas), {}};
    s.values.resize(s.omegas.size());
    detail::parallel_for(s.omegas.size(), [&](std::size_t i) { s.values[i] = f(s.omegas[i]); });
    return s;
}

/// Cavity commutator spectrum c(omega) = L(delta - omega, kappa_t).
inline double commutator_spectrum(double omega, const FpiParams& fpi)
{
    fpi.validate();
    return lorentz(fpi.delta - omega, fpi.kappa_t());
}

/// Intracavity field spectrum n(omega) = (kappa1/kappa_t) p_in(omega) L(delta - omega, kappa_t).
inline double cavity_field_spectrum(double omega, const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    const double kt = fpi.kappa_t();
    return fpi.kappa1 / kt * input_spectrum(omega, src) * lorentz(fpi.delta - omega, kt);
}

/// Mean intracavity photon number (kappa1/kappa_t) p_in L(delta, kappa_t + gamma_l).
inline double mean_photon_number(const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    const double kt = fpi.kappa_t();
    return fpi.kappa1 / kt * src.p_in * lorentz(fpi.delta, kt + gamma_l(src));
}

inline double transmitted_spectrum(double omega, const FpiParams& fpi, const SourceParams& src)
{
    return 2.0 * fpi.kappa2 * cavity_field_spectrum(omega, fpi, src);
}

inline double absorbed_spectrum(double omega, const FpiParams& fpi, const SourceParams& src)
{
    return 2.0 * fpi.kappa0 * cavity_field_spectrum(omega, fpi, src);
}

/// Fraction of the mode response that leaves through mirror 2 or is absorbed,
/// 2 kappa1 (kappa2 + kappa0) / kappa_t.
inline double loss_weight(const FpiParams& fpi)
{
    return 2.0 * fpi.kappa1 * (fpi.kappa2 + fpi.kappa0) / fpi.kappa_t();
}

/// p_r(omega) = p_in [1 - loss_weight L(omega - delta, kappa_t)] L(omega, gamma_l).
inline double reflected_spectrum(double omega, const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    return (1.0 - loss_weight(fpi) * lorentz(omega - fpi.delta, fpi.kappa_t())) *
           input_spectrum(omega, src);
}

inline double reflection_coefficient(const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    return 1.0 - loss_weight(fpi) * lorentz(fpi.delta, fpi.kappa_t() + gamma_l(src));
}

inline double transmission_coefficient(const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    const double kt = fpi.kappa_t();
    return 2.0 * fpi.kappa1 * fpi.kappa2 / kt * lorentz(fpi.delta, kt + gamma_l(src));
}

inline double absorption_coefficient(const FpiParams& fpi, const SourceParams& src)
{
    fpi.validate();
    const double kt = fpi.kappa_t();
    return 2.0 * fpi.kappa1 * fpi.kappa0 / kt * lorentz(fpi.delta, kt + gamma_l(src));
}

} // namespace qfpi
