#pragma once

// Normalized Lorentz lines L(w, k) = 2k / (w^2 + k^2) and exact integrals of
// their products. All frequencies are in units of the source escape rate.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "qfpi/errors.hpp"
#include "qfpi/quadrature.hpp"

namespace qfpi
{

class Lorentzian
{
  public:
    constexpr Lorentzian() = default;
    Lorentzian(double center, double hwhm) : center_(center), hwhm_(hwhm)
    {
        if (!std::isfinite(center))
            throw ParameterError("Lorentzian center must be finite");
        if (!(hwhm > 0) || !std::isfinite(hwhm))
            throw ParameterError("Lorentzian hwhm must be positive, got " + std::to_string(hwhm));
    }

    double center() const { return center_; }
    double hwhm() const { return hwhm_; }

    double operator()(double omega) const
    {
        const double x = omega - center_;
        return 2.0 * hwhm_ / (x * x + hwhm_ * hwhm_);
    }

    friend bool operator==(const Lorentzian&, const Lorentzian&) = default;

  private:
    double center_ = 0.0;
    double hwhm_ = 1.0;
};

/// L(omega - center, hwhm).
inline double lorentz_value(double omega, const Lorentzian& line)
{
    return line(omega);
}

/// Unchecked L(x, k) for hot loops whose widths are validated upstream.
inline double lorentz(double x, double k)
{
    return 2.0 * k / (x * x + k * k);
}

/// (2pi)^-1 Int L(w, g1) L(shift - w, g2) dw, which is L(shift, g1 + g2).
inline double lorentz_convolve(double shift, double g1, double g2)
{
    if (!(g1 > 0) || !(g2 > 0))
        throw ParameterError("lorentz_convolve: widths must be positive");
    return lorentz(shift, g1 + g2);
}

// Product of one to four Lorentz factors, stored inline.
class LorentzProduct
{
  public:
    static constexpr std::size_t max_factors = 4;

    LorentzProduct(std::initializer_list<Lorentzian> factors)
    {
        if (factors.size() < 1 || factors.size() > max_factors)
            throw ParameterError("LorentzProduct holds 1 to 4 factors");
        for (const auto& f : factors)
            factors_[size_++] = f;
    }

    explicit LorentzProduct(const std::vector<Lorentzian>& factors)
    {
        if (factors.size() < 1 || factors.size() > max_factors)
            throw ParameterError("LorentzProduct holds 1 to 4 factors");
        for (const auto& f : factors)
            factors_[size_++] = f;
    }

    std::size_t size() const { return size_; }
    const Lorentzian& operator[](std::size_t i) const { return factors_[i]; }
    const Lorentzian* begin() const { return factors_.data(); }
    const Lorentzian* end() const { return factors_.data() + size_; }

    double operator()(double omega) const
    {
        double v = 1.0;
        for (const auto& f : *this)
            v *= f(omega);
        return v;
    }

  private:
    std::array<Lorentzian, max_factors> factors_{};
    std::size_t size_ = 0;
};

struct ProductIntegral
{
    double value = 0.0;
    // Set when coincident poles forced the quadrature path.
    bool quadrature_fallback = false;
    double error_estimate = 0.0;
};

// Upper poles closer than this fraction of the summed widths are degenerate.
inline constexpr double pole_degeneracy_threshold = 1e-9;

namespace detail
{

using cplx = std::complex<double>;

// Taylor coefficients of 1/(z - w) about z = p, truncated to `order` terms.
inline void inverse_linear_series(cplx p, cplx w, std::size_t order, std::array<cplx, 4>& out)
{
    const cplx inv = 1.0 / (p - w);
    cplx term = inv;
    for (std::size_t n = 0; n < order; ++n)
    {
        out[n] = term;
        term *= -inv;
    }
}

inline void series_multiply(std::array<cplx, 4>& acc, const std::array<cplx, 4>& b, std::size_t order)
{
    std::array<cplx, 4> r{};
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; i + j < order; ++j)
            r[i + j] += acc[i] * b[j];
    acc = r;
}

inline ProductIntegral product_integral_by_quadrature(const LorentzProduct& product,
                                                      const QuadratureSettings& settings)
{
    std::array<double, 3 * LorentzProduct::max_factors> bps{};
    std::size_t nb = 0;
    for (const auto& f : product)
    {
        bps[nb++] = f.center();
        bps[nb++] = f.center() - f.hwhm();
        bps[nb++] = f.center() + f.hwhm();
    }
    const auto r = adaptive_integral([&](double w) { return product(w); }, settings,
                                     std::span<const double>(bps.data(), nb));
    return {r.value / (2.0 * std::numbers::pi), false, r.error / (2.0 * std::numbers::pi)};
}

} // namespace detail

/// (2pi)^-1 Int prod_i L(w - a_i, k_i) dw by closing the contour in the upper
/// half-plane. With poles z_j = a_j + i k_j the result is
///   Re sum_j i Res_{z_j},
/// which for simple poles reduces to sum_j prod_{i != j} 2k_i / ((z_j - a_i)^2 + k_i^2).
/// Identical factors are merged into a higher-order pole and handled exactly;
/// distinct poles closer than pole_degeneracy_threshold fall back to quadrature.
inline ProductIntegral lorentz_product_integral(const LorentzProduct& product,
                                                const QuadratureSettings& settings = {})
{
    using detail::cplx;
    const std::size_t n = product.size();

    std::array<cplx, LorentzProduct::max_factors> upper{};
    double width_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        upper[i] = {product[i].center(), product[i].hwhm()};
        width_sum += product[i].hwhm();
    }

    // cluster[i] is the index of the first factor with the same pole.
    std::array<std::size_t, LorentzProduct::max_factors> cluster{};
    for (std::size_t i = 0; i < n; ++i)
    {
        cluster[i] = i;
        for (std::size_t j = 0; j < i; ++j)
        {
            if (std::abs(upper[i] - upper[j]) < pole_degeneracy_threshold * width_sum)
            {
                if (!(product[i] == product[j]))
                {
                    auto fb = detail::product_integral_by_quadrature(product, settings);
                    fb.quadrature_fallback = true;
                    return fb;
                }
                cluster[i] = cluster[j];
                break;
            }
        }
    }

    cplx total{};
    for (std::size_t p = 0; p < n; ++p)
    {
        if (cluster[p] != p)
            continue;
        std::size_t mult = 0;
        for (std::size_t i = 0; i < n; ++i)
            mult += (cluster[i] == p);

        const cplx pole = upper[p];
        std::array<cplx, 4> acc{};
        acc[0] = 1.0;
        std::array<cplx, 4> s{};
        for (std::size_t i = 0; i < n; ++i)
        {
            const double k = product[i].hwhm();
            const cplx lower = std::conj(upper[i]);
            // 2k / ((z - z_i)(z - conj z_i)); the (z - p) factors of the pole
            // itself are divided out.
            detail::inverse_linear_series(pole, lower, mult, s);
            for (auto& c : s)
                c *= 2.0 * k;
            detail::series_multiply(acc, s, mult);
            if (cluster[i] != p)
            {
                detail::inverse_linear_series(pole, upper[i], mult, s);
                detail::series_multiply(acc, s, mult);
            }
        }
        total += acc[mult - 1];
    }
    // i * sum of residues; the imaginary part is round-off.
    return {(cplx(0.0, 1.0) * total).real(), false, 0.0};
}

} // namespace qfpi
