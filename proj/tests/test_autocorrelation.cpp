#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qfpi/autocorrelation.hpp"

using qfpi::FpiParams;
using qfpi::SourceParams;

namespace
{
const std::vector<double> powers{0.1, 1.5, 5.0, 50.0};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(CosineTransform, LorentzianGivesExponential)
{
    const double k = 0.7;
    const auto taus = qfpi::default_tau_grid();
    const auto ac = qfpi::autocorr_from_spectrum(
        [&](double w) { return qfpi::FluctEntry{qfpi::lorentz(w, k), 0.0, 0.0}; }, taus, {k, k}, false);
    for (std::size_t i = 0; i < taus.size(); ++i)
        EXPECT_NEAR(ac.values[i], std::exp(-k * taus[i]), 1e-6);
}

TEST(CosineTransform, NonUniformLagsMatchUniformPath)
{
    const double k = 1.3;
    const std::vector<double> taus{0.0, 0.013, 0.5, 1.7, 4.25, 9.9};
    const auto ac = qfpi::autocorr_from_spectrum(
        [&](double w) { return qfpi::FluctEntry{qfpi::lorentz(w - 2.0, k) + qfpi::lorentz(w + 2.0, k), 0.0, 0.0}; },
        taus, {k, 2.0 + k}, false);
    for (std::size_t i = 0; i < taus.size(); ++i)
        EXPECT_NEAR(ac.values[i], 2.0 * std::cos(2.0 * taus[i]) * std::exp(-k * taus[i]), 1e-6);
}

TEST(CavityAutocorr, MatchesTimeDomainClosedForm)
{
    const FpiParams f;
    const auto taus = qfpi::default_tau_grid();
    for (double p : powers)
    {
        const SourceParams s{p, 1.0, 3.0};
        const auto ac = qfpi::cavity_autocorr(f, s, taus);
        ASSERT_TRUE(ac.classical && ac.quantum);
        const double n = qfpi::mean_photon_number(f, s);
        const double scale = n * (n + 1.0);
        for (std::size_t i = 0; i < taus.size(); ++i)
        {
            const auto ref = oracle::cavity_autocorr(f, s, taus[i]);
            EXPECT_LT(std::abs((*ac.classical)[i] - ref.classical), 1e-6 * scale) << "p=" << p << " i=" << i;
            EXPECT_LT(std::abs((*ac.quantum)[i] - ref.quantum), 1e-6 * scale) << "p=" << p << " i=" << i;
            EXPECT_DOUBLE_EQ(ac.values[i], (*ac.classical)[i] + (*ac.quantum)[i]);
        }
        EXPECT_EQ(ac.delta_weight, 0.0);
    }
}

TEST(CavityAutocorr, BruteForceFourierAtSelectedLags)
{
    const FpiParams f;
    const SourceParams s{5.0, 1.0, 3.0};
    const std::vector<double> taus{0.0, 0.8, 3.1};
    const auto ac = qfpi::cavity_autocorr(f, s, taus);
    for (std::size_t i = 0; i < taus.size(); ++i)
    {
        const auto ref = oracle::fourier(
            [&](double w) { return qfpi::cavity_fluctuation_spectrum(w, f, s).colored(); }, taus[i]);
        EXPECT_NEAR(ac.values[i], ref.real(), 1e-6);
        EXPECT_NEAR(ref.imag(), 0.0, 1e-9);
    }
}

TEST(CavityAutocorr, ZeroLagEqualsVariance)
{
    const FpiParams f;
    for (double p : powers)
    {
        const SourceParams s{p, 1.0, 3.0};
        const double n = qfpi::mean_photon_number(f, s);
        const auto ac = qfpi::cavity_autocorr(f, s, {0.0});
        EXPECT_NEAR(ac.values[0] / (n * (n + 1.0)), 1.0, 1e-6);
        EXPECT_NEAR((*ac.classical)[0] / (n * n), 1.0, 1e-6);
        EXPECT_NEAR((*ac.quantum)[0] / n, 1.0, 1e-6);
    }
}

TEST(CavityAutocorr, ShapeAcrossPowers)
{
    const FpiParams f;
    const auto taus = qfpi::default_tau_grid();
    const auto low = qfpi::cavity_autocorr(f, {0.1, 1.0, 3.0}, taus);
    EXPECT_TRUE(qfpi::is_monotone_decreasing(low.values));
    const auto high = qfpi::cavity_autocorr(f, {5.0, 1.0, 3.0}, taus);
    EXPECT_LT(*std::min_element(high.values.begin(), high.values.end()), 0.0);
    const double step = taus[1] - taus[0];
    for (double p : {1.5, 5.0, 50.0})
    {
        const auto ac = qfpi::cavity_autocorr(f, {p, 1.0, 3.0}, taus);
        EXPECT_NEAR(qfpi::dominant_oscillation_frequency(ac.values, step), f.delta, 0.05) << "p=" << p;
    }
}

TEST(TransmittedAutocorr, MatchesClosedFormAndCarriesFloor)
{
    const FpiParams f;
    const auto taus = qfpi::default_tau_grid();
    for (double p : powers)
    {
        const SourceParams s{p, 1.0, 3.0};
        const auto ac = qfpi::transmitted_autocorr(f, s, taus);
        EXPECT_FALSE(ac.classical.has_value());
        EXPECT_DOUBLE_EQ(ac.delta_weight, 2.0 * f.kappa2 * qfpi::mean_photon_number(f, s));
        const double scale = oracle::transmitted_autocorr(f, s, 0.0);
        for (std::size_t i = 0; i < taus.size(); ++i)
            EXPECT_LT(std::abs(ac.values[i] - oracle::transmitted_autocorr(f, s, taus[i])), 1e-6 * scale);
    }
}

TEST(ReflectedAutocorr, MatchesClosedForm)
{
    const FpiParams f;
    const auto taus = qfpi::default_tau_grid();
    for (double p : powers)
    {
        const SourceParams s{p, 1.0, 3.0};
        const auto ac = qfpi::reflected_autocorr(f, s, taus);
        EXPECT_DOUBLE_EQ(ac.delta_weight, qfpi::reflection_coefficient(f, s) * p);
        const double scale = oracle::reflected_autocorr(f, s, 0.0);
        for (std::size_t i = 0; i < taus.size(); ++i)
            EXPECT_LT(std::abs(ac.values[i] - oracle::reflected_autocorr(f, s, taus[i])), 1e-6 * scale);
    }
}

TEST(ReflectedAutocorr, CloseToSourceExponential)
{
    const FpiParams f;
    const auto taus = qfpi::default_tau_grid();
    for (double p : powers)
    {
        const SourceParams s{p, 1.0, 3.0};
        const auto r = qfpi::reflected_fit_report(f, s, qfpi::reflected_autocorr(f, s, taus));
        EXPECT_DOUBLE_EQ(r.rate, 2.0 * qfpi::gamma_l(s));
        EXPECT_LT(r.rms_deviation, 0.02) << "p=" << p;
    }
}

TEST(ReflectedAutocorr, TotalReflectionIsExactlyExponential)
{
    FpiParams f;
    f.kappa2 = 0.0;
    f.kappa0 = 0.0;
    const SourceParams s{1.5, 1.0, 3.0};
    const auto r = qfpi::reflected_fit_report(f, s, qfpi::reflected_autocorr(f, s, qfpi::default_tau_grid()));
    EXPECT_LT(r.max_deviation, 1e-6);
}

TEST(RoundTrip, ForwardTransformRecoversSpectrum)
{
    // integrate the closed-form autocorrelation back to frequency
    const FpiParams f;
    const SourceParams s{1.5, 1.0, 3.0};
    const auto taus = qfpi::uniform_grid(0.0, 20.0, 8001);
    const auto ac = qfpi::cavity_autocorr(f, s, taus);
    for (double w : {0.0, 2.0, 5.0})
    {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < taus.size(); ++i)
        {
            const double h = taus[i + 1] - taus[i];
            sum += 0.5 * h * (ac.values[i] * std::cos(w * taus[i]) + ac.values[i + 1] * std::cos(w * taus[i + 1]));
        }
        const double spec = 2.0 * sum;
        const double ref = qfpi::cavity_fluctuation_spectrum(w, f, s).colored();
        EXPECT_LT(std::abs(spec - ref) / ref, 1e-4) << "w=" << w;
    }
}

TEST(TabulatedTransform, AgreesWithProductionPath)
{
    const FpiParams f;
    const SourceParams s{5.0, 1.0, 3.0};
    const auto grid = qfpi::symmetric_grid(300.0, 60001);
    const auto spec = qfpi::cavity_fluct_decomposition(grid, f, s);
    const auto taus = qfpi::uniform_grid(0.0, 6.0, 61);
    const auto tab = qfpi::autocorr_from_spectrum(spec, taus);
    const auto ref = qfpi::cavity_autocorr(f, s, taus);
    const double n = qfpi::mean_photon_number(f, s);
    EXPECT_LT(max_abs_diff(tab.values, ref.values), 1e-4 * n * (n + 1.0));

    // truncated grid leaves the line tails uncovered
    const auto narrow = qfpi::cavity_fluct_decomposition(qfpi::symmetric_grid(3.0, 301), f, s);
    EXPECT_THROW(qfpi::autocorr_from_spectrum(narrow, taus), qfpi::CoverageError);
}

TEST(Normalization, ZeroLagAndExplicitFactor)
{
    const FpiParams f;
    const SourceParams s{5.0, 1.0, 3.0};
    const auto ac = qfpi::cavity_autocorr(f, s, qfpi::default_tau_grid());
    const auto n1 = qfpi::normalized(ac);
    EXPECT_EQ(n1.values[0], 1.0);
    const auto n2 = qfpi::normalized(ac, 2.0);
    EXPECT_EQ(n2.values[5], ac.values[5] / 2.0);
    EXPECT_EQ((*n2.classical)[5], (*ac.classical)[5] / 2.0);
    EXPECT_THROW(qfpi::normalized(ac, 0.0), qfpi::ParameterError);
    EXPECT_THROW(qfpi::normalized(qfpi::cavity_autocorr(f, s, {0.5, 1.0})), qfpi::ParameterError);
}

TEST(LagGrid, RejectsInvalidLags)
{
    const FpiParams f;
    const SourceParams s{5.0, 1.0, 3.0};
    EXPECT_THROW(qfpi::cavity_autocorr(f, s, {0.0, -1.0}), qfpi::ParameterError);
    EXPECT_THROW(qfpi::cavity_autocorr(f, s, {0.0, NAN}), qfpi::ParameterError);
}

TEST(ShapeAnalysis, PencilRecoversDampedCosine)
{
    std::vector<double> y;
    const double step = 0.02;
    for (int i = 0; i < 600; ++i)
        y.push_back(std::exp(-0.3 * i * step) + 0.4 * std::exp(-0.8 * i * step) * std::cos(3.3 * i * step));
    const auto comps = qfpi::damped_components(y, step);
    ASSERT_GE(comps.size(), 3u);
    EXPECT_NEAR(qfpi::dominant_oscillation_frequency(y, step), 3.3, 1e-6);
    EXPECT_THROW(qfpi::damped_components({1.0, 2.0}, step), qfpi::ParameterError);
}

TEST(ShapeAnalysis, PeaksAndMonotonicity)
{
    const std::vector<double> y{0.0, 1.0, 0.5, 0.5005, 0.4, 2.0, 0.0};
    const auto peaks = qfpi::prominent_peaks(y);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_EQ(peaks[0], 1u);
    EXPECT_EQ(peaks[1], 5u);
    EXPECT_TRUE(qfpi::is_monotone_decreasing({3.0, 2.0, 2.0, 1.0}));
    EXPECT_FALSE(qfpi::is_monotone_decreasing({3.0, 2.0, 2.1}));
}
