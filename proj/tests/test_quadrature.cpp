#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "qfpi/fluctuation.hpp"
#include "qfpi/lorentz.hpp"
#include "qfpi/quadrature.hpp"

namespace
{
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TEST(AdaptiveIntegral, LorentzNormalization)
{
    const auto r = qfpi::adaptive_integral([](double w) { return qfpi::lorentz(w, 1.0) / two_pi; });
    EXPECT_NEAR(r.value, 1.0, 1e-10);
    EXPECT_LE(r.error, 1e-10);
}

TEST(AdaptiveIntegral, ConvolutionIdentity)
{
    const double d = 5.0, g1 = 0.3, g2 = 1.1;
    const auto r = qfpi::adaptive_integral(
        [&](double w) { return qfpi::lorentz(w, g1) * qfpi::lorentz(d - w, g2) / two_pi; }, {}, {0.0, d});
    EXPECT_NEAR(r.value, qfpi::lorentz(d, g1 + g2), 1e-12);
}

TEST(AdaptiveIntegral, MatchesResiduesForCavityIntegrandAtDetuning)
{
    const qfpi::FpiParams f;
    const qfpi::SourceParams s{5.0, 1.0, 3.0};
    const double g = qfpi::gamma_l(s), kt = f.kappa_t(), d = f.delta, w = d;
    const qfpi::LorentzProduct p{{w, g}, {w + d, kt}, {0.0, g}, {d, kt}};
    const auto q = qfpi::adaptive_integral([&](double x) { return p(x) / two_pi; }, {}, {0.0, d, w, w + d});
    const double residue = qfpi::j0(w, f, s).value;
    EXPECT_LT(std::abs(q.value - residue) / residue, 1e-8);
}

TEST(AdaptiveIntegral, FiniteAndHalfInfiniteIntervals)
{
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_NEAR(qfpi::adaptive_integral([](double x) { return x * x; }, 0.0, 3.0).value, 9.0, 1e-12);
    // Int_0^inf L(w, k) dw = pi
    EXPECT_NEAR(qfpi::adaptive_integral([](double x) { return qfpi::lorentz(x, 0.2); }, 0.0, inf).value,
                std::numbers::pi, 1e-10);
    EXPECT_NEAR(qfpi::adaptive_integral([](double x) { return qfpi::lorentz(x, 0.2); }, -inf, 0.0).value,
                std::numbers::pi, 1e-10);
}

TEST(AdaptiveIntegral, ReportsNonConvergenceWithBestEstimate)
{
    qfpi::QuadratureSettings s;
    s.max_subdivisions = 1;
    s.rel_tol = 1e-15;
    try
    {
        // a very narrow line far from the map center defeats a single panel
        qfpi::adaptive_integral([](double x) { return qfpi::lorentz(x - 300.0, 1e-4); }, s);
        FAIL() << "expected ConvergenceError";
    }
    catch (const qfpi::ConvergenceError& e)
    {
        EXPECT_TRUE(std::isfinite(e.best_estimate));
        EXPECT_GT(e.error_bound, 0.0);
    }
}

TEST(AdaptiveIntegral, ValidatesSettingsAndBounds)
{
    qfpi::QuadratureSettings s;
    s.rel_tol = 0.0;
    EXPECT_THROW(qfpi::adaptive_integral([](double) { return 1.0; }, 0.0, 1.0, s), qfpi::ParameterError);
    EXPECT_THROW(qfpi::adaptive_integral([](double) { return 1.0; }, 1.0, 0.0), qfpi::ParameterError);
}
