#pragma once

// Second-order autocorrelation functions as cosine transforms of even
// fluctuation spectra,
//   v(tau) = (2pi)^-1 Int S(omega) cos(omega tau) d omega.
// White floors become the weight of delta(tau) and never enter `values`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "qfpi/detail/parallel.hpp"
#include "qfpi/errors.hpp"
#include "qfpi/fluctuation.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/source.hpp"

namespace qfpi
{

struct AutoCorrelation
{
    std::vector<double> taus;
    std::vector<double> values;
    double delta_weight = 0.0;
    std::optional<std::vector<double>> classical;
    std::optional<std::vector<double>> quantum;
};

struct TransformSettings
{
    // Upper end of the explicit frequency integration; 0 picks it from the spectrum scales.
    double omega_cutoff = 0.0;
    // Gauss-Legendre panel width; 0 picks it from the spectrum scales and the lag range.
    double panel_width = 0.0;
};

// Frequency scales of a spectrum that set the integration mesh.
struct SpectrumScales
{
    double min_width = 1.0;  // narrowest line width
    double extent = 1.0;     // distance from 0 within which all structure lies
};

inline std::vector<double> default_tau_grid(double tau_max = 12.0, std::size_t points = 601)
{
    return uniform_grid(0.0, tau_max, points);
}

namespace detail
{

// Upper bound on Gauss-Legendre panels; narrower lines cannot be resolved.
inline constexpr std::size_t max_panels = 4'000'000;

struct CosineMesh
{
    std::vector<double> nodes;
    std::vector<double> weights;
    double cutoff = 0.0;
};

inline CosineMesh cosine_mesh(const SpectrumScales& scales, double tau_max, const TransformSettings& ts)
{
    if (!(scales.min_width > 0) || !(scales.extent >= 0))
        throw ParameterError("spectrum scales must be positive");
    const double cutoff =
        ts.omega_cutoff > 0 ? ts.omega_cutoff : std::max(400.0, 40.0 * scales.extent);
    double h = ts.panel_width;
    if (!(h > 0))
    {
        h = std::min(0.05, 0.5 * scales.min_width);
        if (tau_max > 0)
            h = std::min(h, 0.5 * std::numbers::pi / tau_max);
    }
    const double panel_count = std::ceil(cutoff / h);
    if (!(panel_count <= static_cast<double>(max_panels)))
        throw ConvergenceError("cosine transform: a line of width " + std::to_string(scales.min_width) +
                                   " needs " + std::to_string(panel_count) + " panels, more than the limit of " +
                                   std::to_string(max_panels),
                               std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity());
    const auto panels = static_cast<std::size_t>(panel_count);
    h = cutoff / static_cast<double>(panels);

    using rule = boost::math::quadrature::gauss<double, 8>;
    CosineMesh m;
    m.cutoff = cutoff;
    m.nodes.reserve(panels * 8);
    m.weights.reserve(panels * 8);
    for (std::size_t p = 0; p < panels; ++p)
    {
        const double mid = (static_cast<double>(p) + 0.5) * h;
        for (std::size_t k = 0; k < rule::abscissa().size(); ++k)
        {
            const double x = rule::abscissa()[k] * 0.5 * h;
            const double w = rule::weights()[k] * 0.5 * h;
            m.nodes.push_back(mid - x);
            m.weights.push_back(w);
            m.nodes.push_back(mid + x);
            m.weights.push_back(w);
        }
    }
    return m;
}

// Lag grids of the form t0 + k * step are evaluated by complex rotation
// instead of one cosine per node and lag.
inline bool is_uniform(const std::vector<double>& taus, double& step)
{
    if (taus.size() < 3)
        return false;
    step = (taus.back() - taus.front()) / static_cast<double>(taus.size() - 1);
    if (!(step > 0))
        return false;
    const double tol = 1e-12 * (taus.back() - taus.front());
    for (std::size_t k = 0; k < taus.size(); ++k)
        if (std::abs(taus[k] - (taus.front() + step * static_cast<double>(k))) > tol)
            return false;
    return true;
}

// Tail of an even spectrum beyond the mesh: a u + b u^2 with u = 1/(w^2 + 1).
struct TailModel
{
    double a = 0.0;
    double b = 0.0;
};

// Matches the tail model to the spectrum at the cutoff and at half the cutoff.
inline TailModel fit_tail(double cutoff, double value_at_cutoff, double value_at_half)
{
    const double u1 = 1.0 / (cutoff * cutoff + 1.0);
    const double u2 = 1.0 / (0.25 * cutoff * cutoff + 1.0);
    const double det = u1 * u2 * (u2 - u1);
    return {(value_at_cutoff * u2 * u2 - value_at_half * u1 * u1) / det,
            (value_at_half * u1 - value_at_cutoff * u2) / det};
}

// (1/pi) Int_0^inf S cos(w tau) dw for an even S sampled on the mesh.
// The tail model is transformed exactly and only the remainder, which decays
// like w^-6, is integrated numerically.
inline std::vector<double> cosine_transform(const CosineMesh& mesh, const std::vector<double>& samples,
                                            const TailModel& tail, const std::vector<double>& taus)
{
    const std::size_t n = samples.size();
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double u = 1.0 / (mesh.nodes[i] * mesh.nodes[i] + 1.0);
        residual[i] = mesh.weights[i] * (samples[i] - u * (tail.a + tail.b * u));
    }

    const std::size_t nt = taus.size();
    std::vector<double> out(nt, 0.0);
    double step = 0.0;
    if (is_uniform(taus, step))
    {
        // fixed chunking keeps the summation order independent of thread count
        constexpr std::size_t chunks = 64;
        std::vector<std::vector<double>> partial(chunks, std::vector<double>(nt, 0.0));
        parallel_for(chunks, [&](std::size_t c) {
            auto& acc = partial[c];
            for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i)
            {
                const double w = mesh.nodes[i];
                const std::complex<double> rot = std::polar(1.0, w * step);
                std::complex<double> z = std::polar(residual[i], w * taus.front());
                for (std::size_t t = 0; t < nt; ++t)
                {
                    acc[t] += z.real();
                    z *= rot;
                }
            }
        });
        for (const auto& acc : partial)
            for (std::size_t t = 0; t < nt; ++t)
                out[t] += acc[t];
    }
    else
    {
        parallel_for(nt, [&](std::size_t t) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sum += residual[i] * std::cos(mesh.nodes[i] * taus[t]);
            out[t] = sum;
        });
    }
    for (std::size_t t = 0; t < nt; ++t)
    {
        const double tau = std::abs(taus[t]);
        out[t] = out[t] / std::numbers::pi + (0.5 * tail.a + 0.25 * tail.b * (1.0 + tau)) * std::exp(-tau);
    }
    return out;
}

inline void check_taus(const std::vector<double>& taus)
{
    for (double t : taus)
        if (!(t >= 0) || !std::isfinite(t))
            throw ParameterError("lags must be finite and non-negative");
}

} // namespace detail

/// Cosine transform of an analytic even spectrum. `entry(omega)` returns a
/// FluctEntry; the classical and quantum parts are transformed separately
/// when `split` is set, and the white floor becomes delta_weight.
template <class EntryFn>
AutoCorrelation autocorr_from_spectrum(EntryFn&& entry, const std::vector<double>& taus,
                                       const SpectrumScales& scales, bool split,
                                       const TransformSettings& ts = {})
{
    detail::check_taus(taus);
    const double tau_max = taus.empty() ? 0.0 : *std::max_element(taus.begin(), taus.end());
    const auto mesh = detail::cosine_mesh(scales, tau_max, ts);

    const std::size_t n = mesh.nodes.size();
    std::vector<double> cl(n), qu(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const FluctEntry e = entry(mesh.nodes[i]);
        cl[i] = e.classical;
        qu[i] = e.quantum;
    });
    const FluctEntry at_cut = entry(mesh.cutoff);
    const FluctEntry at_half = entry(0.5 * mesh.cutoff);
    const FluctEntry at_zero = entry(0.0);

    AutoCorrelation ac;
    ac.taus = taus;
    ac.delta_weight = at_zero.white_floor;
    auto c = detail::cosine_transform(mesh, cl, detail::fit_tail(mesh.cutoff, at_cut.classical, at_half.classical), taus);
    auto q = detail::cosine_transform(mesh, qu, detail::fit_tail(mesh.cutoff, at_cut.quantum, at_half.quantum), taus);
    ac.values.resize(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i)
        ac.values[i] = c[i] + q[i];
    if (split)
    {
        ac.classical = std::move(c);
        ac.quantum = std::move(q);
    }
    return ac;
}

/// Cosine transform of a tabulated decomposition by the trapezoid rule on its
/// grid. The colored parts must decay inside the grid; beyond it they are
/// continued with the tail model fitted at the grid edge and at half of it.
inline AutoCorrelation autocorr_from_spectrum(const SpectrumDecomposition& spec,
                                              const std::vector<double>& taus,
                                              const TabulatedSettings& settings = {})
{
    detail::check_taus(taus);
    const std::size_t n = spec.omegas.size();
    if (spec.classical.size() != n || spec.quantum.size() != n)
        throw ParameterError("autocorr_from_spectrum: component arrays differ in length");
    std::vector<double> colored(n);
    for (std::size_t i = 0; i < n; ++i)
        colored[i] = spec.classical[i] + spec.quantum[i];
    detail::check_coverage({spec.omegas, colored}, settings, "autocorr_from_spectrum");

    const double edge = std::min(-spec.omegas.front(), spec.omegas.back());
    auto transform = [&](const std::vector<double>& s) {
        detail::TailModel tail;
        if (edge > 0)
        {
            const detail::TabulatedSpectrum at({spec.omegas, s});
            tail = detail::fit_tail(edge, 0.5 * (at(edge) + at(-edge)), 0.5 * (at(0.5 * edge) + at(-0.5 * edge)));
        }
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double u = 1.0 / (spec.omegas[i] * spec.omegas[i] + 1.0);
            r[i] = s[i] - u * (tail.a + tail.b * u);
        }
        std::vector<double> out(taus.size());
        detail::parallel_for(taus.size(), [&](std::size_t t) {
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
            {
                const double w0 = spec.omegas[i], w1 = spec.omegas[i + 1];
                sum += 0.5 * (w1 - w0) *
                       (r[i] * std::cos(w0 * taus[t]) + r[i + 1] * std::cos(w1 * taus[t]));
            }
            const double tau = taus[t];
            out[t] = sum / (2.0 * std::numbers::pi) +
                     (0.5 * tail.a + 0.25 * tail.b * (1.0 + tau)) * std::exp(-tau);
        });
        return out;
    };
    AutoCorrelation ac;
    ac.taus = taus;
    ac.delta_weight = spec.white_floor;
    ac.classical = transform(spec.classical);
    ac.quantum = transform(spec.quantum);
    ac.values.resize(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i)
        ac.values[i] = (*ac.classical)[i] + (*ac.quantum)[i];
    return ac;
}

inline SpectrumScales fpi_scales(const FpiParams& fpi, const SourceParams& src)
{
    const double g = gamma_l(src);
    const double kt = fpi.kappa_t();
    return {std::min(g, kt), std::abs(fpi.delta) + kt + g};
}

/// delta^2 n(tau) with its classical and quantum parts.
inline AutoCorrelation cavity_autocorr(const FpiParams& fpi, const SourceParams& src,
                                       const std::vector<double>& taus, const TransformSettings& ts = {})
{
    fpi.validate();
    src.validate();
    return autocorr_from_spectrum([&](double w) { return cavity_fluctuation_spectrum(w, fpi, src); },
                                  taus, fpi_scales(fpi, src), true, ts);
}

/// Colored part of the transmitted power autocorrelation; delta_weight = p_t.
inline AutoCorrelation transmitted_autocorr(const FpiParams& fpi, const SourceParams& src,
                                            const std::vector<double>& taus,
                                            const TransformSettings& ts = {})
{
    fpi.validate();
    src.validate();
    return autocorr_from_spectrum([&](double w) { return transmitted_fluct_spectrum(w, fpi, src); },
                                  taus, fpi_scales(fpi, src), false, ts);
}

/// Colored part of the reflected power autocorrelation; delta_weight = p_r.
inline AutoCorrelation reflected_autocorr(const FpiParams& fpi, const SourceParams& src,
                                          const std::vector<double>& taus,
                                          const TransformSettings& ts = {})
{
    fpi.validate();
    src.validate();
    return autocorr_from_spectrum([&](double w) { return reflected_fluct_spectrum(w, fpi, src); },
                                  taus, fpi_scales(fpi, src), false, ts);
}

/// Divides values, components and the delta weight by `norm`.
inline AutoCorrelation normalized(AutoCorrelation ac, double norm)
{
    if (!(norm != 0.0) || !std::isfinite(norm))
        throw ParameterError("normalization factor must be finite and nonzero");
    for (auto& v : ac.values)
        v /= norm;
    for (auto* comp : {&ac.classical, &ac.quantum})
        if (*comp)
            for (auto& v : **comp)
                v /= norm;
    ac.delta_weight /= norm;
    return ac;
}

/// Normalizes by the zero-lag value; the first lag must be 0.
inline AutoCorrelation normalized(AutoCorrelation ac)
{
    if (ac.taus.empty() || ac.taus.front() != 0.0)
        throw ParameterError("normalized: lag grid must start at 0");
    const double norm = ac.values.front();
    return normalized(std::move(ac), norm);
}

struct ExponentialFitReport
{
    double rate = 0.0;           // 2 gamma_l
    double rms_deviation = 0.0;  // RMS over lags of v/v(0) - exp(-rate tau)
    double max_deviation = 0.0;
};

inline ExponentialFitReport exponential_fit_report(const AutoCorrelation& ac, double rate)
{
    if (ac.taus.empty() || ac.taus.front() != 0.0)
        throw ParameterError("exponential_fit_report: lag grid must start at 0");
    ExponentialFitReport r;
    r.rate = rate;
    const double v0 = ac.values.front();
    double sum = 0.0;
    for (std::size_t i = 0; i < ac.taus.size(); ++i)
    {
        const double d = ac.values[i] / v0 - std::exp(-rate * ac.taus[i]);
        sum += d * d;
        r.max_deviation = std::max(r.max_deviation, std::abs(d));
    }
    r.rms_deviation = std::sqrt(sum / static_cast<double>(ac.taus.size()));
    return r;
}

/// Deviation of the reflected autocorrelation from exp(-2 gamma_l tau).
inline ExponentialFitReport reflected_fit_report(const FpiParams& fpi, const SourceParams& src,
                                                 const AutoCorrelation& reflected)
{
    fpi.validate();
    return exponential_fit_report(reflected, 2.0 * gamma_l(src));
}

// ---------------------------------------------------------------------------
// Shape analysis of sampled curves.

struct DampedComponent
{
    double frequency = 0.0;  // angular, >= 0
    double damping = 0.0;    // decay rate
    double amplitude = 0.0;  // |complex amplitude| at the first sample
};

/// Decomposes uniformly sampled y into damped complex exponentials with the
/// matrix pencil method. Components below rel_threshold of the largest
/// singular value are dropped.
inline std::vector<DampedComponent> damped_components(const std::vector<double>& y, double step,
                                                      double rel_threshold = 1e-7,
                                                      std::size_t max_components = 16)
{
    using Eigen::Index;
    const Index n = static_cast<Index>(y.size());
    if (n < 8 || !(step > 0))
        throw ParameterError("damped_components: need at least 8 uniform samples");
    const Index pencil = n / 3;
    Eigen::MatrixXd hankel(n - pencil, pencil + 1);
    for (Index i = 0; i < n - pencil; ++i)
        for (Index j = 0; j <= pencil; ++j)
            hankel(i, j) = y[static_cast<std::size_t>(i + j)];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(hankel, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return {};
    Index order = 0;
    while (order < sv.size() && order < static_cast<Index>(max_components) &&
           sv(order) > rel_threshold * sv(0))
        ++order;

    const Eigen::MatrixXd v = svd.matrixV().leftCols(order);
    const Eigen::MatrixXd v1 = v.topRows(pencil);
    const Eigen::MatrixXd v2 = v.bottomRows(pencil);
    const Eigen::MatrixXd shift = v1.completeOrthogonalDecomposition().solve(v2);
    const Eigen::VectorXcd poles = shift.eigenvalues();

    // amplitudes by least squares on the Vandermonde system
    Eigen::MatrixXcd vander(n, order);
    for (Index k = 0; k < order; ++k)
    {
        std::complex<double> p = 1.0;
        for (Index i = 0; i < n; ++i)
        {
            vander(i, k) = p;
            p *= poles(k);
        }
    }
    Eigen::VectorXcd rhs(n);
    for (Index i = 0; i < n; ++i)
        rhs(i) = y[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd amp = vander.colPivHouseholderQr().solve(rhs);

    std::vector<DampedComponent> out;
    for (Index k = 0; k < order; ++k)
    {
        const auto z = poles(k);
        out.push_back({std::abs(std::arg(z)) / step, -std::log(std::abs(z)) / step, std::abs(amp(k))});
    }
    std::sort(out.begin(), out.end(),
              [](const DampedComponent& a, const DampedComponent& b) { return a.amplitude > b.amplitude; });
    return out;
}

/// Angular frequency of the strongest oscillating component of uniformly
/// sampled y, or 0 when every component is a pure decay.
inline double dominant_oscillation_frequency(const std::vector<double>& y, double step,
                                             double min_frequency = 1e-3)
{
    for (const auto& c : damped_components(y, step))
        if (c.frequency > min_frequency)
            return c.frequency;
    return 0.0;
}

/// Interior local maxima whose topographic prominence is at least
/// rel_prominence times the global maximum. The prominence is the height above
/// the higher of the two lowest points met on each side before higher ground
/// or the end of the data.
inline std::vector<std::size_t> prominent_peaks(const std::vector<double>& y, double rel_prominence = 1e-3)
{
    const std::size_t n = y.size();
    std::vector<std::size_t> out;
    if (n < 3)
        return out;
    const double gmax = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]))
            continue;
        double left_min = y[i], right_min = y[i];
        for (std::size_t j = i; j-- > 0 && y[j] <= y[i];)
            left_min = std::min(left_min, y[j]);
        for (std::size_t j = i + 1; j < n && y[j] <= y[i]; ++j)
            right_min = std::min(right_min, y[j]);
        if (y[i] - std::max(left_min, right_min) >= rel_prominence * std::abs(gmax))
            out.push_back(i);
    }
    return out;
}

/// True when y never rises by more than tol * |y[0]| from one sample to the next.
inline bool is_monotone_decreasing(const std::vector<double>& y, double tol = 1e-9)
{
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[i - 1] + tol * std::abs(y.front()))
            return false;
    return true;
}

} // namespace qfpi
