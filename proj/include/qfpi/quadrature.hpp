#pragma once

// Adaptive Gauss-Kronrod integration over finite, half-infinite and infinite
// intervals. Infinite ends are removed with the substitution
// omega = center + scale * tan(theta), so rational integrands decaying at
// least like 1/omega^2 become bounded on a finite theta interval.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qfpi/errors.hpp"

namespace qfpi
{

struct QuadratureSettings
{
    double rel_tol = 1e-11;
    double abs_tol = 1e-300;
    // Upper bound on bisections of each breakpoint panel.
    unsigned max_subdivisions = 1u << 14;
    // Scale of the tangent map in units of the breakpoint half-spread (or 1).
    double domain_half_width_multiplier = 1.0;

    void validate() const
    {
        if (!(rel_tol > 0) || !(abs_tol > 0))
            throw ParameterError("quadrature tolerances must be positive");
        if (max_subdivisions < 1)
            throw ParameterError("max_subdivisions must be at least 1");
        if (!(domain_half_width_multiplier > 0))
            throw ParameterError("domain_half_width_multiplier must be positive");
    }
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
};

namespace detail
{

inline unsigned depth_for(unsigned max_subdivisions)
{
    unsigned depth = 0;
    while ((1u << depth) < max_subdivisions && depth < 30)
        ++depth;
    return depth;
}

} // namespace detail

/// Integrates f over [lo, hi]; either end may be infinite.
///
/// Breakpoints (typically the centers of narrow spectral lines) split the
/// interval into panels that are refined independently, so a sharp peak is
/// never straddled by the coarse initial rule. Throws ConvergenceError when
/// the accumulated error estimate exceeds max(abs_tol, rel_tol*|result|).
template <class F>
QuadratureResult adaptive_integral(F&& f, double lo, double hi,
                                   const QuadratureSettings& settings = {},
                                   std::span<const double> breakpoints = {})
{
    settings.validate();
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
        throw ParameterError("adaptive_integral: need lo < hi");

    std::vector<double> bps;
    for (double b : breakpoints)
        if (std::isfinite(b) && b > lo && b < hi)
            bps.push_back(b);
    std::sort(bps.begin(), bps.end());
    // near-coincident breakpoints would leave slivers whose error estimates are pure round-off
    bps.erase(std::unique(bps.begin(), bps.end(),
                          [](double a, double b) { return b - a <= 1e-9 * std::max(1.0, std::abs(a)); }),
              bps.end());

    double center = 0.0;
    double half_spread = 1.0;
    if (!bps.empty())
    {
        center = 0.5 * (bps.front() + bps.back());
        half_spread = std::max(1.0, 0.5 * (bps.back() - bps.front()));
    }
    else if (std::isfinite(lo) && std::isfinite(hi))
    {
        center = 0.5 * (lo + hi);
    }
    else if (std::isfinite(lo))
    {
        center = lo;
    }
    else if (std::isfinite(hi))
    {
        center = hi;
    }
    const double scale = settings.domain_half_width_multiplier * half_spread;

    auto to_theta = [&](double w) {
        if (w == std::numeric_limits<double>::infinity())
            return std::numbers::pi / 2;
        if (w == -std::numeric_limits<double>::infinity())
            return -std::numbers::pi / 2;
        return std::atan((w - center) / scale);
    };
    auto mapped = [&](double theta) {
        const double t = std::tan(theta);
        const double sec2 = 1.0 + t * t;
        const double v = f(center + scale * t) * scale * sec2;
        return std::isfinite(v) ? v : 0.0;
    };

    std::vector<double> edges;
    edges.push_back(to_theta(lo));
    for (double b : bps)
        edges.push_back(to_theta(b));
    edges.push_back(to_theta(hi));

    const unsigned depth = detail::depth_for(settings.max_subdivisions);
    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    {
        if (!(edges[i] < edges[i + 1]))
            continue;
        double err = 0.0;
        double l1 = 0.0;
        out.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            mapped, edges[i], edges[i + 1], depth, settings.rel_tol, &err, &l1);
        out.error += err;
    }
    // Kronrod-vs-Gauss differences are pessimistic by orders of magnitude;
    // allow the estimate to sit at a few ulps of the result.
    const double allowed =
        std::max({settings.abs_tol, settings.rel_tol * std::abs(out.value),
                  64 * std::numeric_limits<double>::epsilon() * std::abs(out.value)});
    if (!(out.error <= allowed))
        throw ConvergenceError("adaptive_integral did not converge", out.value, out.error);
    return out;
}

template <class F>
QuadratureResult adaptive_integral(F&& f, const QuadratureSettings& settings = {},
                                   std::span<const double> breakpoints = {})
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return adaptive_integral(std::forward<F>(f), -inf, inf, settings, breakpoints);
}

template <class F>
QuadratureResult adaptive_integral(F&& f, const QuadratureSettings& settings,
                                   std::initializer_list<double> breakpoints)
{
    return adaptive_integral(std::forward<F>(f), settings,
                             std::span<const double>(breakpoints.begin(), breakpoints.size()));
}

} // namespace qfpi
