#pragma once

// Input field source: a LED/laser cavity whose output drives the
// interferometer. The spectrum is a Lorentz line whose width narrows as the
// emitted power grows.

#include <cmath>
#include <string>
#include <vector>

#include "qfpi/errors.hpp"
#include "qfpi/lorentz.hpp"

namespace qfpi
{

struct SourceParams
{
    double p_in = 1.5;       // photons per unit time
    double kappa_l = 1.0;    // source escape rate, the frequency unit
    double gamma_max = 3.0;  // linewidth at vanishing power

    void validate() const
    {
        if (!(p_in >= 0) || !std::isfinite(p_in))
            throw ParameterError("source p_in must be >= 0");
        if (!(kappa_l > 0) || !std::isfinite(kappa_l))
            throw ParameterError("source kappa_l must be > 0");
        if (!(gamma_max > 0) || !std::isfinite(gamma_max))
            throw ParameterError("source gamma_max must be > 0");
    }
};

/// Input linewidth gamma_max / (1 + p_in / kappa_l).
inline double gamma_l(const SourceParams& src)
{
    src.validate();
    return src.gamma_max / (1.0 + src.p_in / src.kappa_l);
}

/// Input spectral power density p_in * L(omega, gamma_l).
inline double input_spectrum(double omega, const SourceParams& src)
{
    return src.p_in * lorentz(omega, gamma_l(src));
}

enum class Regime
{
    led,
    intermediate,
    lasing
};

inline const char* to_string(Regime r)
{
    switch (r)
    {
    case Regime::led: return "led";
    case Regime::intermediate: return "intermediate";
    case Regime::lasing: return "lasing";
    }
    return "unknown";
}

// Reporting only; numerics never branch on it.
inline Regime classify_regime(const SourceParams& src)
{
    const double ratio = gamma_l(src) / src.kappa_l;
    if (ratio > 3.0)
        return Regime::led;
    if (ratio < 1.0 / 3.0)
        return Regime::lasing;
    return Regime::intermediate;
}

// Microscopic two-level-emitter description of the source, below threshold.
struct SourceMicroParams
{
    double n0 = 2.0;          // emitter count
    double ne = 0.5;          // upper-state population
    double nth = 1.0;         // threshold inversion
    double omega_rabi = 1.0;  // vacuum Rabi frequency
    double gamma_perp = 100.0;
    double f = 0.5;
    double kappa_l = 1.0;

    /// 1 - (2 Ne - N0) / Nth; positive below threshold.
    double eta() const { return 1.0 - (2.0 * ne - n0) / nth; }

    void validate() const
    {
        if (!(n0 > 0) || !(ne > 0) || !(nth > 0))
            throw ParameterError("micro source: N0, Ne, Nth must be > 0");
        if (ne > n0)
            throw ParameterError("micro source: Ne must not exceed N0");
        if (!(kappa_l > 0) || !(gamma_perp > 0))
            throw ParameterError("micro source: kappa_l and gamma_perp must be > 0");
        if (!(eta() > 0))
            throw ParameterError("micro source is at or above threshold (eta <= 0)");
    }

    /// Adiabatic elimination of the polarization needs kappa_l << gamma_perp / 2.
    std::vector<std::string> warnings() const
    {
        std::vector<std::string> w;
        if (kappa_l / (0.5 * gamma_perp) >= 0.1)
            w.emplace_back("kappa_l is not small against gamma_perp/2; "
                           "adiabatic elimination of the polarization is questionable");
        return w;
    }
};

/// Semiclassical threshold inversion kappa_l gamma_perp / (2 Omega^2 f).
inline double threshold_inversion(double kappa_l, double omega_rabi, double gamma_perp, double f)
{
    if (!(omega_rabi > 0) || !(f > 0))
        throw ParameterError("threshold_inversion: Omega and f must be > 0");
    return kappa_l * gamma_perp / (2.0 * omega_rabi * omega_rabi * f);
}

inline double gamma_max_micro(const SourceMicroParams& micro)
{
    micro.validate();
    return micro.kappa_l * (1.0 + micro.n0 / micro.nth);
}

/// Frequency integral of 4 kappa_l^2 (Ne/Nth) / ((kappa_l eta)^2 + w^2).
inline double micro_input_power(const SourceMicroParams& micro)
{
    if (!(micro.eta() > 0))
        throw ParameterError("micro source is at or above threshold (eta <= 0)");
    micro.validate();
    return 2.0 * micro.kappa_l * (micro.ne / micro.nth) / micro.eta();
}

/// Macroscopic parameters implied by the microscopic model.
inline SourceParams to_source_params(const SourceMicroParams& micro)
{
    return {micro_input_power(micro), micro.kappa_l, gamma_max_micro(micro)};
}

/// Width kappa_l * eta of the microscopic input spectrum.
inline double micro_linewidth(const SourceMicroParams& micro)
{
    micro.validate();
    return micro.kappa_l * micro.eta();
}

} // namespace qfpi
