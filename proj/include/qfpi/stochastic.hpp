#pragma once

// Classical time-domain model of the driven cavity: a complex
// Ornstein-Uhlenbeck input with spectrum p_in L(omega, gamma_l) feeding the
// linear cavity filter. Intensity-fluctuation spectra are estimated with
// Welch-averaged periodograms. Only classical (colored) terms are reachable
// this way; quantum terms have no c-number counterpart.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fftw3.h>

#include "qfpi/detail/parallel.hpp"
#include "qfpi/errors.hpp"
#include "qfpi/fpi.hpp"
#include "qfpi/source.hpp"

namespace qfpi
{

struct SimConfig
{
    double dt = 0.01;
    std::size_t n_steps = std::size_t{1} << 20;  // recorded steps per realization
    std::size_t n_realizations = 16;
    std::uint64_t seed = 20240601;
    std::size_t burn_in = 20000;  // discarded steps before recording
    std::size_t segment_length = 8192;
    std::size_t batches_per_realization = 16;

    /// Throws ConfigError when the step does not resolve the fastest rate or
    /// the burn-in is too short to forget the initial state.
    void validate(const FpiParams& fpi, const SourceParams& src) const
    {
        if (!(dt > 0) || !std::isfinite(dt))
            throw ConfigError("oracle.dt", "must be positive");
        if (n_realizations < 1)
            throw ConfigError("oracle.n_realizations", "must be at least 1");
        if (segment_length < 16 || segment_length > n_steps)
            throw ConfigError("oracle.segment_length", "must lie in [16, n_steps]");
        if (batches_per_realization < 1 || batches_per_realization > n_steps)
            throw ConfigError("oracle.batches_per_realization", "must lie in [1, n_steps]");
        const double g = gamma_l(src);
        const double kt = fpi.kappa_t();
        const double fastest = std::max({g, kt, std::abs(fpi.delta)});
        const double dt_max = 0.05 / fastest;
        if (dt > dt_max * (1.0 + 1e-12))
            throw ConfigError("oracle.dt", "step " + std::to_string(dt) +
                                               " does not resolve the fastest rate; use dt <= " +
                                               std::to_string(dt_max));
        const double burn_min = 10.0 / (dt * std::min(g, kt));
        if (static_cast<double>(burn_in) < burn_min * (1.0 - 1e-12))
            throw ConfigError("oracle.burn_in", "too short to reach stationarity; use at least " +
                                                    std::to_string(static_cast<std::size_t>(std::ceil(burn_min))));
    }
};

struct Trajectory
{
    std::vector<double> times;
    std::vector<std::complex<double>> input_amplitude;
    std::vector<std::complex<double>> cavity_amplitude;
};

namespace detail
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for each (seed, realization) pair.
inline std::mt19937_64 realization_engine(std::uint64_t seed, std::uint64_t realization)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(realization + 0x632be59bd9b4e019ULL)));
}

} // namespace detail

/// One realization. Both updates are exact over a step: the OU input decays
/// by exp(-gamma dt) with a matching Gaussian kick, and the cavity propagates
/// exactly with the input held constant over the step.
inline Trajectory simulate(const FpiParams& fpi, const SourceParams& src, const SimConfig& cfg,
                           std::uint64_t realization = 0)
{
    fpi.validate();
    src.validate();
    cfg.validate(fpi, src);

    using cplx = std::complex<double>;
    const double g = gamma_l(src);
    const double decay = std::exp(-g * cfg.dt);
    const double kick = std::sqrt(src.p_in * (1.0 - decay * decay));
    const cplx rate(fpi.kappa_t(), fpi.delta);
    const cplx prop = std::exp(-rate * cfg.dt);
    const cplx drive = std::sqrt(2.0 * fpi.kappa1) * (1.0 - prop) / rate;

    auto rng = detail::realization_engine(cfg.seed, realization);
    // unit complex normal: E|xi|^2 = 1
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    auto xi = [&] {
        const double re = normal(rng);
        const double im = normal(rng);
        return cplx(re, im);
    };

    cplx x = std::sqrt(src.p_in) * xi();
    cplx a = 0.0;
    auto step = [&] {
        a = a * prop + drive * x;
        x = x * decay + kick * xi();
    };
    for (std::size_t i = 0; i < cfg.burn_in; ++i)
        step();

    Trajectory t;
    t.times.resize(cfg.n_steps);
    t.input_amplitude.resize(cfg.n_steps);
    t.cavity_amplitude.resize(cfg.n_steps);
    for (std::size_t i = 0; i < cfg.n_steps; ++i)
    {
        t.times[i] = cfg.dt * static_cast<double>(cfg.burn_in + i);
        t.input_amplitude[i] = x;
        t.cavity_amplitude[i] = a;
        step();
    }
    return t;
}

struct PeriodogramResult
{
    SpectrumGrid spectrum;  // two-sided density on omega >= 0
    std::size_t segments = 0;
    std::vector<std::string> warnings;
};

namespace detail
{

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwBuffers
{
    explicit FftwBuffers(std::size_t n)
        : in(fftw_alloc_real(n)), out(fftw_alloc_complex(n / 2 + 1)), size(n)
    {
        if (!in || !out)
            throw Error("FFTW allocation failed");
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    ~FftwBuffers()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftwBuffers(const FftwBuffers&) = delete;
    FftwBuffers& operator=(const FftwBuffers&) = delete;

    double* in;
    fftw_complex* out;
    std::size_t size;
    fftw_plan plan = nullptr;
};

} // namespace detail

/// Welch estimate of the spectrum of I(t) - <I> for a real series sampled at
/// step dt: Hann window, 50% overlap, mean taken over the whole series.
/// Normalized so that (2pi)^-1 Int S d omega equals the variance.
inline PeriodogramResult welch_spectrum(const std::vector<double>& series, double dt,
                                        std::size_t segment_length)
{
    if (segment_length < 16 || segment_length > series.size())
        throw ParameterError("welch_spectrum: segment length must lie in [16, series length]");
    double mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= static_cast<double>(series.size());

    const std::size_t m = segment_length;
    std::vector<double> window(m);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m));
        wsum2 += window[i] * window[i];
    }

    detail::FftwBuffers fft(m);
    const std::size_t bins = m / 2 + 1;
    std::vector<double> acc(bins, 0.0);
    const std::size_t hop = m / 2;
    std::size_t segments = 0;
    for (std::size_t start = 0; start + m <= series.size(); start += hop)
    {
        for (std::size_t i = 0; i < m; ++i)
            fft.in[i] = window[i] * (series[start + i] - mean);
        fftw_execute_dft_r2c(fft.plan, fft.in, fft.out);
        for (std::size_t k = 0; k < bins; ++k)
            acc[k] += fft.out[k][0] * fft.out[k][0] + fft.out[k][1] * fft.out[k][1];
        ++segments;
    }

    PeriodogramResult r;
    r.segments = segments;
    r.spectrum.omegas.resize(bins);
    r.spectrum.values.resize(bins);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
    for (std::size_t k = 0; k < bins; ++k)
    {
        r.spectrum.omegas[k] = domega * static_cast<double>(k);
        r.spectrum.values[k] = dt * acc[k] / (wsum2 * static_cast<double>(segments));
    }
    if (segments < 8)
        r.warnings.push_back("only " + std::to_string(segments) +
                             " periodogram segments; the spectral estimate has high variance");
    return r;
}

inline std::vector<double> intensities(const std::vector<std::complex<double>>& amp)
{
    std::vector<double> out(amp.size());
    std::transform(amp.begin(), amp.end(), out.begin(), [](auto z) { return std::norm(z); });
    return out;
}

/// Spectrum of |a(t)|^2 fluctuations for one trajectory.
inline PeriodogramResult intensity_fluct_spectrum(const Trajectory& traj, const SimConfig& cfg)
{
    return welch_spectrum(intensities(traj.cavity_amplitude), cfg.dt, cfg.segment_length);
}

/// Spectrum of |x(t)|^2 fluctuations of the input for one trajectory.
inline PeriodogramResult input_intensity_fluct_spectrum(const Trajectory& traj, const SimConfig& cfg)
{
    return welch_spectrum(intensities(traj.input_amplitude), cfg.dt, cfg.segment_length);
}

struct MeanEstimate
{
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Mean and batch-means standard error over equal-length batches.
inline MeanEstimate batch_means(const std::vector<double>& batch_values)
{
    const std::size_t n = batch_values.size();
    if (n < 2)
        throw ParameterError("batch_means: need at least two batches");
    double mean = 0.0;
    for (double v : batch_values)
        mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : batch_values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

struct OracleResult
{
    SpectrumGrid cavity_spectrum;  // averaged over realizations, omega >= 0
    SpectrumGrid input_spectrum;
    MeanEstimate cavity_mean;      // <|a|^2>
    MeanEstimate input_mean;       // <|x|^2>
    std::size_t segments = 0;      // total over realizations
    std::vector<std::string> warnings;
};

/// Runs all realizations (in parallel, each with its own stream) and averages
/// their periodograms in realization order.
inline OracleResult run_oracle(const FpiParams& fpi, const SourceParams& src, const SimConfig& cfg)
{
    cfg.validate(fpi, src);
    struct Partial
    {
        PeriodogramResult cavity;
        PeriodogramResult input;
        std::vector<double> cavity_batches;
        std::vector<double> input_batches;
    };
    std::vector<Partial> parts(cfg.n_realizations);
    detail::parallel_for(cfg.n_realizations, [&](std::size_t r) {
        const Trajectory t = simulate(fpi, src, cfg, r);
        const auto ic = intensities(t.cavity_amplitude);
        const auto ix = intensities(t.input_amplitude);
        Partial& p = parts[r];
        p.cavity = welch_spectrum(ic, cfg.dt, cfg.segment_length);
        p.input = welch_spectrum(ix, cfg.dt, cfg.segment_length);
        const std::size_t len = cfg.n_steps / cfg.batches_per_realization;
        for (std::size_t b = 0; b < cfg.batches_per_realization; ++b)
        {
            double sc = 0.0, sx = 0.0;
            for (std::size_t i = b * len; i < (b + 1) * len; ++i)
            {
                sc += ic[i];
                sx += ix[i];
            }
            p.cavity_batches.push_back(sc / static_cast<double>(len));
            p.input_batches.push_back(sx / static_cast<double>(len));
        }
    });

    OracleResult out;
    out.cavity_spectrum = parts[0].cavity.spectrum;
    out.input_spectrum = parts[0].input.spectrum;
    std::fill(out.cavity_spectrum.values.begin(), out.cavity_spectrum.values.end(), 0.0);
    std::fill(out.input_spectrum.values.begin(), out.input_spectrum.values.end(), 0.0);
    std::vector<double> cb, xb;
    for (const auto& p : parts)
    {
        for (std::size_t k = 0; k < out.cavity_spectrum.values.size(); ++k)
        {
            out.cavity_spectrum.values[k] += p.cavity.spectrum.values[k];
            out.input_spectrum.values[k] += p.input.spectrum.values[k];
        }
        out.segments += p.cavity.segments;
        cb.insert(cb.end(), p.cavity_batches.begin(), p.cavity_batches.end());
        xb.insert(xb.end(), p.input_batches.begin(), p.input_batches.end());
    }
    const double inv = 1.0 / static_cast<double>(cfg.n_realizations);
    for (auto& v : out.cavity_spectrum.values)
        v *= inv;
    for (auto& v : out.input_spectrum.values)
        v *= inv;
    if (cb.size() >= 2)
    {
        out.cavity_mean = batch_means(cb);
        out.input_mean = batch_means(xb);
    }
    if (out.segments < 8)
        out.warnings.push_back("only " + std::to_string(out.segments) +
                               " periodogram segments; the spectral estimate has high variance");
    return out;
}

/// Cavity intensities of one realization sampled at dt and at dt/2 along a
/// shared noise history: each pair of fine input kicks combines exactly into
/// the coarse kick, so differences come from the step size alone.
struct CoupledIntensities
{
    std::vector<double> coarse;  // n_steps samples at dt
    std::vector<double> fine;    // 2 n_steps samples at dt/2
};

inline CoupledIntensities simulate_coupled(const FpiParams& fpi, const SourceParams& src, const SimConfig& cfg,
                                           std::uint64_t realization = 0)
{
    fpi.validate();
    src.validate();
    cfg.validate(fpi, src);

    using cplx = std::complex<double>;
    const double g = gamma_l(src);
    const double hf = 0.5 * cfg.dt;
    const double decay_f = std::exp(-g * hf);
    const double kick_f = std::sqrt(src.p_in * (1.0 - decay_f * decay_f));
    const double decay_c = decay_f * decay_f;
    const double kick_c = std::sqrt(src.p_in * (1.0 - decay_c * decay_c));
    const cplx rate(fpi.kappa_t(), fpi.delta);
    const cplx prop_f = std::exp(-rate * hf), prop_c = prop_f * prop_f;
    const cplx drive_f = std::sqrt(2.0 * fpi.kappa1) * (1.0 - prop_f) / rate;
    const cplx drive_c = std::sqrt(2.0 * fpi.kappa1) * (1.0 - prop_c) / rate;

    auto rng = detail::realization_engine(cfg.seed, realization);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    auto xi = [&] {
        const double re = normal(rng);
        const double im = normal(rng);
        return cplx(re, im);
    };

    cplx xc = std::sqrt(src.p_in) * xi();
    cplx xf = xc, ac = 0.0, af = 0.0;
    CoupledIntensities out;
    out.coarse.reserve(cfg.n_steps);
    out.fine.reserve(2 * cfg.n_steps);
    for (std::size_t i = 0; i < cfg.burn_in + cfg.n_steps; ++i)
    {
        const bool record = i >= cfg.burn_in;
        if (record)
            out.coarse.push_back(std::norm(ac));
        const cplx x1 = xi(), x2 = xi();
        for (const cplx& k : {x1, x2})
        {
            if (record)
                out.fine.push_back(std::norm(af));
            af = af * prop_f + drive_f * xf;
            xf = xf * decay_f + kick_f * k;
        }
        ac = ac * prop_c + drive_c * xc;
        const double scale = kick_c > 0 ? kick_f / kick_c : 0.0;
        xc = xc * decay_c + kick_c * scale * (decay_f * x1 + x2);
    }
    return out;
}

/// Relative RMS difference over |omega| <= omega_max between the averaged
/// cavity spectra at dt and at dt/2 (segment lengths chosen so the bins coincide).
inline double dt_refinement_deviation(const FpiParams& fpi, const SourceParams& src, const SimConfig& cfg,
                                      double omega_max = 10.0)
{
    cfg.validate(fpi, src);
    std::vector<std::vector<double>> coarse(cfg.n_realizations), fine(cfg.n_realizations);
    std::vector<double> omegas;
    std::mutex grid_mutex;
    detail::parallel_for(cfg.n_realizations, [&](std::size_t r) {
        const auto pair = simulate_coupled(fpi, src, cfg, r);
        auto c = welch_spectrum(pair.coarse, cfg.dt, cfg.segment_length);
        auto f = welch_spectrum(pair.fine, 0.5 * cfg.dt, 2 * cfg.segment_length);
        coarse[r] = std::move(c.spectrum.values);
        fine[r] = std::move(f.spectrum.values);
        std::lock_guard lock(grid_mutex);
        if (omegas.empty())
            omegas = c.spectrum.omegas;
    });
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < omegas.size() && omegas[k] <= omega_max; ++k)
    {
        double c = 0.0, f = 0.0;
        for (std::size_t r = 0; r < cfg.n_realizations; ++r)
        {
            c += coarse[r][k];
            f += fine[r][k];
        }
        num += (c - f) * (c - f);
        den += f * f;
    }
    if (!(den > 0))
        return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::sqrt(num / den);
}

/// sqrt(mean((est - ref)^2) / mean(ref^2)) over estimate bins with |omega| <= omega_max.
template <class Ref>
double relative_rms_deviation(const SpectrumGrid& estimate, Ref&& reference, double omega_max)
{
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < estimate.omegas.size(); ++k)
    {
        if (std::abs(estimate.omegas[k]) > omega_max)
            continue;
        const double r = reference(estimate.omegas[k]);
        const double d = estimate.values[k] - r;
        num += d * d;
        den += r * r;
    }
    if (!(den > 0))
        return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::sqrt(num / den);
}

} // namespace qfpi
