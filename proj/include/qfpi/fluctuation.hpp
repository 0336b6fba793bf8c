#pragma once

// Photon-number fluctuation spectrum inside the cavity and power fluctuation
// spectra of the transmitted and reflected beams.
//
// Inside the cavity the quantum part is colored: the field spectrum convolved
// with the commutator spectrum. Outside, quantum noise is a white floor equal
// to the mean power and is always kept apart from the colored arrays.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "qfpi/detail/parallel.hpp"
#include "qfpi/errors.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/lorentz.hpp"
#include "qfpi/source.hpp"

namespace qfpi
{

// One frequency point of a fluctuation spectrum.
struct FluctEntry
{
    double classical = 0.0;
    double quantum = 0.0;      // colored quantum part (cavity only)
    double white_floor = 0.0;  // flat quantum part (free space only)
    bool quadrature_fallback = false;

    double colored() const { return classical + quantum; }
    double total() const { return classical + quantum + white_floor; }
};

struct SpectrumDecomposition
{
    std::vector<double> omegas;
    std::vector<double> classical;
    std::vector<double> quantum;
    std::vector<double> total;
    double white_floor = 0.0;
    std::size_t quadrature_fallbacks = 0;
};

// ---------------------------------------------------------------------------
// Lorentz-product integrals of the closed-form spectra. J0 and J2 are even in
// omega (translate all centers by omega); they are evaluated at |omega| so the
// symmetry holds bit for bit.

inline ProductIntegral j0(double omega, const FpiParams& fpi, const SourceParams& src,
                          const QuadratureSettings& qs = {})
{
    fpi.validate();
    const double w = std::abs(omega);
    const double g = gamma_l(src);
    const double kt = fpi.kappa_t();
    const double d = fpi.delta;
    return lorentz_product_integral({{w, g}, {w + d, kt}, {0.0, g}, {d, kt}}, qs);
}

inline ProductIntegral j1(double omega, const FpiParams& fpi, const SourceParams& src,
                          const QuadratureSettings& qs = {})
{
    fpi.validate();
    const double g = gamma_l(src);
    const double kt = fpi.kappa_t();
    const double d = fpi.delta;
    const auto a = lorentz_product_integral({{omega, g}, {omega + d, kt}, {d, kt}}, qs);
    const auto b = lorentz_product_integral({{-omega, g}, {d - omega, kt}, {d, kt}}, qs);
    return {0.5 * (a.value + b.value), a.quadrature_fallback || b.quadrature_fallback,
            0.5 * (a.error_estimate + b.error_estimate)};
}

inline ProductIntegral j2(double omega, const FpiParams& fpi, const SourceParams& src,
                          const QuadratureSettings& qs = {})
{
    fpi.validate();
    const double w = std::abs(omega);
    const double g = gamma_l(src);
    const double kt = fpi.kappa_t();
    const double d = fpi.delta;
    const auto a = lorentz_product_integral({{w, g}, {0.0, g}, {w + d, kt}}, qs);
    const auto b = lorentz_product_integral({{w, g}, {0.0, g}, {d, kt}}, qs);
    return {a.value + b.value, a.quadrature_fallback || b.quadrature_fallback,
            a.error_estimate + b.error_estimate};
}

/// delta^2 n(omega) = A^2 J0 + A J1 with A = p_in kappa1 / kappa_t.
inline FluctEntry cavity_fluctuation_spectrum(double omega, const FpiParams& fpi,
                                              const SourceParams& src)
{
    const double amp = src.p_in * fpi.kappa1 / fpi.kappa_t();
    if (amp == 0.0)
        return {};
    const auto a = j0(omega, fpi, src);
    const auto b = j1(omega, fpi, src);
    return {amp * amp * a.value, amp * b.value, 0.0, a.quadrature_fallback || b.quadrature_fallback};
}

/// Transmitted power fluctuations: (2 kappa2 A)^2 J0 over a white floor p_t.
inline FluctEntry transmitted_fluct_spectrum(double omega, const FpiParams& fpi,
                                             const SourceParams& src)
{
    const double amp = 2.0 * fpi.kappa2 * src.p_in * fpi.kappa1 / fpi.kappa_t();
    const double floor = 2.0 * fpi.kappa2 * mean_photon_number(fpi, src);
    if (amp == 0.0)
        return {0.0, 0.0, floor, false};
    const auto a = j0(omega, fpi, src);
    return {amp * amp * a.value, 0.0, floor, a.quadrature_fallback};
}

/// Reflected power fluctuations:
/// p_in^2 {L(omega, 2 gamma_l) - w J2 + w^2 J0} over a white floor p_r, with
/// w the loss weight 2 kappa1 (kappa2 + kappa0) / kappa_t.
inline FluctEntry reflected_fluct_spectrum(double omega, const FpiParams& fpi,
                                           const SourceParams& src)
{
    const double floor = reflection_coefficient(fpi, src) * src.p_in;
    if (src.p_in == 0.0)
        return {0.0, 0.0, floor, false};
    const double w = loss_weight(fpi);
    const double base = lorentz(omega, 2.0 * gamma_l(src));
    if (w == 0.0)
        return {src.p_in * src.p_in * base, 0.0, floor, false};
    const auto a = j0(omega, fpi, src);
    const auto b = j2(omega, fpi, src);
    const double brace = base - w * b.value + w * w * a.value;
    return {src.p_in * src.p_in * brace, 0.0, floor,
            a.quadrature_fallback || b.quadrature_fallback};
}

/// Evaluates a spectrum on a grid. The white floor is taken from the first point.
template <class EntryFn>
SpectrumDecomposition decompose(const std::vector<double>& omegas, EntryFn&& entry)
{
    SpectrumDecomposition d;
    d.omegas = omegas;
    const std::size_t n = omegas.size();
    d.classical.resize(n);
    d.quantum.resize(n);
    d.total.resize(n);
    std::vector<char> flags(n, 0);
    std::vector<double> floors(n, 0.0);
    detail::parallel_for(n, [&](std::size_t i) {
        const FluctEntry e = entry(omegas[i]);
        d.classical[i] = e.classical;
        d.quantum[i] = e.quantum;
        d.total[i] = e.total();
        floors[i] = e.white_floor;
        flags[i] = e.quadrature_fallback;
    });
    d.white_floor = n ? floors[0] : 0.0;
    d.quadrature_fallbacks = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    return d;
}

inline SpectrumDecomposition cavity_fluct_decomposition(const std::vector<double>& omegas,
                                                        const FpiParams& fpi, const SourceParams& src)
{
    return decompose(omegas, [&](double w) { return cavity_fluctuation_spectrum(w, fpi, src); });
}

inline SpectrumDecomposition transmitted_fluct_decomposition(const std::vector<double>& omegas,
                                                             const FpiParams& fpi,
                                                             const SourceParams& src)
{
    return decompose(omegas, [&](double w) { return transmitted_fluct_spectrum(w, fpi, src); });
}

inline SpectrumDecomposition reflected_fluct_decomposition(const std::vector<double>& omegas,
                                                           const FpiParams& fpi,
                                                           const SourceParams& src)
{
    return decompose(omegas, [&](double w) { return reflected_fluct_spectrum(w, fpi, src); });
}

// ---------------------------------------------------------------------------
// General engines acting on tabulated spectra.

struct TabulatedSettings
{
    // Largest allowed ratio of an edge value to the peak value.
    double coverage_tol = 1e-4;
};

namespace detail
{

// Interpolant that vanishes outside the tabulated range.
class TabulatedSpectrum
{
  public:
    explicit TabulatedSpectrum(const SpectrumGrid& s) : lo_(s.omegas.front()), hi_(s.omegas.back())
    {
        if (s.omegas.size() >= 4)
        {
            auto x = s.omegas;
            auto y = s.values;
            spline_ = std::make_shared<boost::math::interpolators::makima<std::vector<double>>>(
                std::move(x), std::move(y));
        }
        else
        {
            x_ = s.omegas;
            y_ = s.values;
        }
    }

    double operator()(double w) const
    {
        if (!(w >= lo_ && w <= hi_))
            return 0.0;
        if (spline_)
            return (*spline_)(w);
        auto it = std::upper_bound(x_.begin(), x_.end(), w);
        if (it == x_.end())
            return y_.back();
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double t = (w - x_[i]) / (x_[i + 1] - x_[i]);
        return y_[i] + t * (y_[i + 1] - y_[i]);
    }

  private:
    double lo_;
    double hi_;
    std::shared_ptr<boost::math::interpolators::makima<std::vector<double>>> spline_;
    std::vector<double> x_;
    std::vector<double> y_;
};

// Local power-law decay exponent of y between two edge samples, measured
// from the peak location.
inline std::optional<double> edge_exponent(double x_inner, double y_inner, double x_edge,
                                           double y_edge, double peak)
{
    const double d_in = std::abs(x_inner - peak);
    const double d_out = std::abs(x_edge - peak);
    if (!(y_inner > 0) || !(y_edge > 0) || !(d_out > d_in) || !(d_in > 0))
        return std::nullopt;
    return std::log(y_inner / y_edge) / std::log(d_out / d_in);
}

// Trapezoid rule plus power-law tails beyond both ends.
inline double trapezoid_with_tails(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double sum = 0.0;
    std::size_t peak = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        sum += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(y[i]) > std::abs(y[peak]))
            peak = i;
    if (n < 3)
        return sum;
    const double xp = x[peak];
    if (auto k = edge_exponent(x[n - 2], y[n - 2], x[n - 1], y[n - 1], xp); k && *k > 1.0)
        sum += y[n - 1] * std::abs(x[n - 1] - xp) / (*k - 1.0);
    if (auto k = edge_exponent(x[1], y[1], x[0], y[0], xp); k && *k > 1.0)
        sum += y[0] * std::abs(x[0] - xp) / (*k - 1.0);
    return sum;
}

inline void check_coverage(const SpectrumGrid& s, const TabulatedSettings& settings,
                           const char* what)
{
    const auto& x = s.omegas;
    const auto& y = s.values;
    const std::size_t n = y.size();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(y[i]) > std::abs(y[peak]))
            peak = i;
    const double ymax = std::abs(y[peak]);
    if (ymax == 0.0)
        return;
    const double r_lo = std::abs(y.front()) / ymax;
    const double r_hi = std::abs(y.back()) / ymax;
    if (r_lo <= settings.coverage_tol && r_hi <= settings.coverage_tol)
        return;

    auto required = [&](double ratio, std::optional<double> k, double edge) {
        if (ratio <= settings.coverage_tol)
            return edge;
        if (!k || *k <= 0.0)
            return edge > x[peak] ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
        const double dist = std::abs(edge - x[peak]) * std::pow(ratio / settings.coverage_tol, 1.0 / *k);
        return edge > x[peak] ? x[peak] + dist : x[peak] - dist;
    };
    const double lo = required(r_lo, edge_exponent(x[1], y[1], x[0], y[0], x[peak]), x.front());
    const double hi =
        required(r_hi, edge_exponent(x[n - 2], y[n - 2], x[n - 1], y[n - 1], x[peak]), x.back());
    throw CoverageError(std::string(what) + ": tabulated spectrum does not decay inside the grid; "
                                            "extend it to [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]",
                        lo, hi);
}

} // namespace detail

/// delta^2 n(omega) from tabulated field and commutator spectra:
///   (2pi)^-1 Int n(omega + w) n(w) dw + (4pi)^-1 Int [n(w + omega) + n(w - omega)] c(w) dw.
/// The integrals run over the nodes of n_spec; shifted arguments are
/// interpolated and vanish outside the tables. Shifts that are multiples of a
/// uniform grid spacing land on nodes exactly.
inline FluctEntry general_cavity_fluct_spectrum(const SpectrumGrid& n_spec, const SpectrumGrid& c_spec,
                                                double omega, const TabulatedSettings& settings = {})
{
    n_spec.validate();
    c_spec.validate();
    detail::check_coverage(n_spec, settings, "general_cavity_fluct_spectrum");
    const detail::TabulatedSpectrum n_of(n_spec);
    const detail::TabulatedSpectrum c_of(c_spec);

    const auto& u = n_spec.omegas;
    std::vector<double> cl(u.size()), qu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        const double nu = n_spec.values[i];
        // both shift directions, so the estimate is even in omega like the exact result
        cl[i] = 0.5 * nu * (n_of(u[i] + omega) + n_of(u[i] - omega));
        // substituting w = u - omega and w = u + omega in the two quantum terms
        qu[i] = nu * (c_of(u[i] - omega) + c_of(u[i] + omega));
    }
    const double two_pi = 2.0 * std::numbers::pi;
    return {detail::trapezoid_with_tails(u, cl) / two_pi,
            detail::trapezoid_with_tails(u, qu) / (2.0 * two_pi), 0.0, false};
}

/// Free-space power fluctuations from a tabulated power spectrum:
/// colored (2pi)^-1 Int p(w - omega) p(w) dw over a white floor (2pi)^-1 Int p(w) dw.
inline FluctEntry general_freespace_fluct_spectrum(const SpectrumGrid& p_spec, double omega,
                                                   const TabulatedSettings& settings = {})
{
    p_spec.validate();
    detail::check_coverage(p_spec, settings, "general_freespace_fluct_spectrum");
    const detail::TabulatedSpectrum p_of(p_spec);
    const auto& u = p_spec.omegas;
    std::vector<double> co(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        co[i] = 0.5 * p_spec.values[i] * (p_of(u[i] - omega) + p_of(u[i] + omega));
    const double two_pi = 2.0 * std::numbers::pi;
    return {detail::trapezoid_with_tails(u, co) / two_pi, 0.0,
            detail::trapezoid_with_tails(u, p_spec.values) / two_pi, false};
}

/// Re-evaluates `eval(points)` on grids of n, 2n-1, 4n-3, ... points until two
/// successive values agree to rel_tol. Grids that keep every previous node
/// make the sequence monotone in resolution.
inline double refine_until_converged(const std::function<double(std::size_t)>& eval,
                                     std::size_t initial_points, double rel_tol = 1e-6,
                                     int max_doublings = 8)
{
    std::size_t pts = initial_points;
    double prev = eval(pts);
    for (int k = 0; k < max_doublings; ++k)
    {
        pts = 2 * pts - 1;
        const double next = eval(pts);
        if (std::abs(next - prev) <= rel_tol * std::abs(next))
            return next;
        prev = next;
    }
    throw ConvergenceError("grid refinement did not converge", prev, std::abs(prev) * rel_tol);
}

} // namespace qfpi
