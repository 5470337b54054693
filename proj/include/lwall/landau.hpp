#pragma once

// Landau-level structure in the symmetric gauge: levels, normalized radial
// eigenfunctions, boundary coefficients c_{n,m} on the wall circle, and the
// semiclassical resonance index.

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <utility>

#include "lwall/errors.hpp"
#include "lwall/signed_log.hpp"
#include "lwall/specfun.hpp"

namespace lwall {

/// Physical configuration: field B, wall radius a, coupling alpha.
struct Params {
    double B = 1.0;
    double a = 1.1;
    double alpha = -1.0;

    void validate() const {
        if (!(B > 0.0) || !std::isfinite(B)) throw ConfigError("B must be positive");
        if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("a must be positive");
        if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
    }

    /// Laguerre argument B a^2 / 2 at the wall.
    double x() const { return 0.5 * B * a * a; }
    double magnetic_length() const { return 1.0 / std::sqrt(B); }
};

inline void require_field(double B) {
    if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("B must be positive");
}
inline void require_level(int n) {
    if (n < 0) throw DomainError("level index must be nonnegative");
}

/// Lambda_n = B (2n + 1).
inline double landau_level(double B, int n) {
    require_field(B);
    require_level(n);
    return B * (2.0 * n + 1.0);
}

/// |C_{n,m}|^2 = B^{|m|+1} n! / (2^{|m|+1} pi (n+|m|)!).
inline SignedLog norm_const_sq(double B, int n, int m) {
    require_field(B);
    require_level(n);
    const int k = std::abs(m);
    const double log_v = (k + 1.0) * (std::log(B) - std::numbers::ln2) -
                         std::log(std::numbers::pi) + log_gamma(n + 1.0) -
                         log_gamma(n + k + 1.0);
    return SignedLog::from_log(log_v);
}

/// Radial factor C_{n,m} r^{|m|} e^{-B r^2/4} L_n^{(|m|)}(B r^2 / 2), C_{n,m} > 0.
inline double eigenfunction_radial(double B, int n, int m, double r) {
    require_field(B);
    require_level(n);
    if (r < 0.0) throw DomainError("radius must be nonnegative");
    const int k = std::abs(m);
    if (r == 0.0) return k == 0 ? std::sqrt(norm_const_sq(B, n, m).to_real()) : 0.0;
    const double xi = 0.5 * B * r * r;
    const ScaledLaguerre lag = laguerre_scaled(n, k, xi);
    if (lag.ratio == 0.0) return 0.0;
    const double log_v = 0.5 * norm_const_sq(B, n, m).log_abs + k * std::log(r) -
                         0.25 * B * r * r + lag.log_abs_value();
    return (lag.ratio > 0 ? 1.0 : -1.0) * std::exp(log_v);
}

/// 2 pi r |psi_{n,m}(r)|^2; integrates to one over r in [0, inf).
inline double radial_probability(double B, int n, int m, double r) {
    const double v = eigenfunction_radial(B, n, m, r);
    return 2.0 * std::numbers::pi * r * v * v;
}

namespace detail {

// d/dr ln(2 pi r |psi_{n,m}|^2) = (2k+1)/r - B r - 2 B r L_{n-1}^{(k+1)}(xi) / L_n^{(k)}(xi)
inline double log_density_slope(double B, int n, int k, double r) {
    double slope = (2.0 * k + 1.0) / r - B * r;
    if (n > 0) {
        const double xi = 0.5 * B * r * r;
        const ScaledLaguerre num = laguerre_scaled(n - 1, k + 1, xi);
        const ScaledLaguerre den = laguerre_scaled(n, k, xi);
        // binom(n+k, n-1) / binom(n+k, n) = n / (k+1)
        slope -= 2.0 * B * r * (num.ratio / den.ratio) * n / (k + 1.0);
    }
    return slope;
}

}  // namespace detail

/// argmax over r > 0 of radial_probability (global maximum over all lobes).
/// A coarse scan picks the tallest lobe; a golden-section search inside the
/// bracketing cells is then refined by bisection on the log-derivative.
inline double peak_radius(double B, int n, int m) {
    require_field(B);
    require_level(n);
    const int k = std::abs(m);
    const double r_hi = 3.0 * std::sqrt((2.0 * n + 2.0 * k + 2.0) / B);
    constexpr int samples = 4000;
    const double dr = r_hi / samples;
    int best = 1;
    double best_v = -1.0;
    for (int i = 1; i < samples; ++i) {
        const double v = radial_probability(B, n, m, i * dr);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double lo = (best - 1) * dr;
    double hi = (best + 1) * dr;
    if (lo <= 0.0) lo = 0.5 * dr;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = radial_probability(B, n, m, c);
    double fd = radial_probability(B, n, m, d);
    while (hi - lo > 1e-6 * dr) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = radial_probability(B, n, m, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = radial_probability(B, n, m, d);
        }
    }
    // widen to a sign change of the slope, then bisect to full precision
    double a_lo = std::max(lo - dr, 0.25 * lo);
    double a_hi = hi + dr;
    if (detail::log_density_slope(B, n, k, a_lo) > 0.0 &&
        detail::log_density_slope(B, n, k, a_hi) < 0.0) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a_lo + a_hi);
            if (mid <= a_lo || mid >= a_hi) break;
            if (detail::log_density_slope(B, n, k, mid) > 0.0)
                a_lo = mid;
            else
                a_hi = mid;
        }
        return 0.5 * (a_lo + a_hi);
    }
    return 0.5 * (lo + hi);
}

/// Boundary coefficient c_{n,m} = ||psi_{n,m}(a, .)||^2_{L^2(S_a)}, evaluated as
///   a B e^{-x} x^{|m|} n!/(n+|m|)! L_n^{(|m|)}(x)^2,  x = B a^2 / 2.
inline SignedLog boundary_coeff(double B, double a, int n, int m) {
    require_field(B);
    require_level(n);
    if (!(a > 0.0)) throw DomainError("wall radius must be positive");
    const int k = std::abs(m);
    const double x = 0.5 * B * a * a;
    const ScaledLaguerre lag = laguerre_scaled(n, k, x);
    if (lag.ratio == 0.0) return SignedLog::zero();
    const double log_v = std::log(a * B) - x + k * std::log(x) + log_gamma(n + 1.0) -
                         log_gamma(n + k + 1.0) + 2.0 * lag.log_abs_value();
    return SignedLog::from_log(log_v);
}

/// True when L_n^{(|m|)}(B a^2/2) cannot be told apart from zero in binary64,
/// i.e. a sits on a special radius and the pole at Lambda_n is absent.
inline bool boundary_coeff_vanishes(double B, double a, int n, int m) {
    const ScaledLaguerre lag = laguerre_scaled(n, std::abs(m), 0.5 * B * a * a);
    return std::fabs(lag.ratio) <= 64.0 * std::numeric_limits<double>::epsilon() * lag.abs_sum;
}

/// The constant multiplying the large-|m| form of c_{n,m} as printed:
/// n! B e^{-B a^2/2} / 2.
inline double paper_core_constant(double B, double a, int n) {
    require_field(B);
    require_level(n);
    return std::exp(log_gamma(n + 1.0) - 0.5 * B * a * a) * B / 2.0;
}

/// Leading large-|m| form
///   (2a) K_n (1/(n+|m|)!) x^{|m|} binom(n+|m|, n)^2,
/// where the factor 2a restores the prefactor a B n! e^{-x} of the exact formula.
inline SignedLog boundary_coeff_asymptotic(double B, double a, int n, int m) {
    require_field(B);
    require_level(n);
    if (!(a > 0.0)) throw DomainError("wall radius must be positive");
    const int k = std::abs(m);
    const double x = 0.5 * B * a * a;
    const double log_v = std::log(2.0 * a * paper_core_constant(B, a, n)) -
                         log_gamma(n + k + 1.0) + k * std::log(x) +
                         2.0 * log_binomial(n, k);
    return SignedLog::from_log(log_v);
}

struct ResonanceIndex {
    double value;
    long nearest;  // ties to even
};

/// m_* = a^2 / (2 l_B^2) - (n + 1/2).
inline ResonanceIndex resonance_index(double B, double a, int n) {
    require_field(B);
    require_level(n);
    if (!(a > 0.0)) throw DomainError("wall radius must be positive");
    const double v = 0.5 * a * a * B - (n + 0.5);
    return {v, static_cast<long>(std::nearbyint(v))};
}

/// r_c(n) = sqrt(2n+1) l_B.
inline double cyclotron_radius(double B, int n) {
    require_field(B);
    require_level(n);
    return std::sqrt(2.0 * n + 1.0) / std::sqrt(B);
}

}  // namespace lwall
