#pragma once

// Special-function kernels: log-gamma, generalized Laguerre polynomials
// (plain and binomially scaled), modified Bessel I, and Laguerre zeros.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include "lwall/errors.hpp"
#include "lwall/tridiag.hpp"

namespace lwall {

namespace detail {

// ln((n-1)!) for n = 1..171, accumulated once.
inline const std::array<double, 172>& log_factorial_table() {
    static const std::array<double, 172> table = [] {
        std::array<double, 172> t{};
        t[0] = 0.0;  // unused (Gamma(0) pole)
        t[1] = 0.0;
        long double acc = 0.0L;
        for (int n = 2; n < 172; ++n) {
            acc += std::log(static_cast<long double>(n - 1));
            t[n] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

// Stirling series for ln Gamma(x), x >= 15: error below 1e-17 relative.
inline double log_gamma_stirling(double x) {
    constexpr double half_log_2pi = 0.91893853320467274178;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli coefficients B_{2k} / (2k (2k-1))
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 +
                                               inv2 * (-691.0 / 360360.0 +
                                                       inv2 * (1.0 / 156.0)))))));
    return (x - 0.5) * std::log(x) - x + half_log_2pi + series;
}

}  // namespace detail

/// ln Gamma(x) for x > 0. Thread-safe (does not touch the global signgam).
inline double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("log_gamma: argument must be positive and finite");
    if (x == std::floor(x) && x < 172.0)
        return detail::log_factorial_table()[static_cast<int>(x)];
    if (x >= 15.0) return detail::log_gamma_stirling(x);
    // shift up: Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1))
    double prod = 1.0;
    double y = x;
    while (y < 15.0) {
        prod *= y;
        y += 1.0;
    }
    return detail::log_gamma_stirling(y) - std::log(prod);
}

/// ln binom(n + k, n).
inline double log_binomial(int n, int k) {
    return log_gamma(n + k + 1.0) - log_gamma(n + 1.0) - log_gamma(k + 1.0);
}

/// Generalized Laguerre L_n^{(k)}(x) by the forward three-term recurrence.
inline double laguerre(int n, int k, double x) {
    if (n < 0 || k < 0 || x < 0.0)
        throw DomainError("laguerre: requires n >= 0, k >= 0, x >= 0");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + k - x;
    for (int j = 1; j < n; ++j) {
        const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// L_n^{(k)}(x) / binom(n+k, n) and ln binom(n+k, n).
struct ScaledLaguerre {
    double ratio = 1.0;
    double log_binom = 0.0;
    /// Sum of |terms| of the scaled finite expansion; |ratio| below ~eps*abs_sum
    /// is indistinguishable from a zero of the polynomial.
    double abs_sum = 1.0;

    /// Natural log of |L_n^{(k)}(x)|, -inf at a zero.
    double log_abs_value() const {
        return ratio == 0.0 ? -std::numeric_limits<double>::infinity()
                            : std::log(std::fabs(ratio)) + log_binom;
    }
    double value() const { return ratio * std::exp(log_binom); }
};

/// Scaled Laguerre value from the finite sum
///   sum_j (-1)^j x^j / j! * binom(n+k, n-j) / binom(n+k, n),
/// where each binomial ratio is a product of j factors (n-i)/(k+1+i).
inline ScaledLaguerre laguerre_scaled(int n, int k, double x) {
    if (n < 0 || k < 0 || x < 0.0)
        throw DomainError("laguerre_scaled: requires n >= 0, k >= 0, x >= 0");
    ScaledLaguerre out;
    out.log_binom = log_binomial(n, k);
    double term = 1.0;  // (-1)^j x^j / j! * binom ratio
    double sum = 1.0;
    double abs_sum = 1.0;
    for (int j = 1; j <= n; ++j) {
        term *= -x / j * (n - j + 1.0) / (k + j);
        sum += term;
        abs_sum += std::fabs(term);
    }
    out.ratio = sum;
    out.abs_sum = abs_sum;
    return out;
}

/// Modified Bessel I_m(z) by its ascending series. Used for cross-checks.
inline double bessel_i(int m, double z) {
    if (m < 0) throw DomainError("bessel_i: order must be nonnegative");
    if (!(z >= 0.0) || z > 700.0) throw DomainError("bessel_i: argument outside [0, 700]");
    if (z == 0.0) return m == 0 ? 1.0 : 0.0;
    const double half = 0.5 * z;
    double term = std::exp(m * std::log(half) - log_gamma(m + 1.0));
    double sum = term;
    const double q = half * half;
    for (int j = 0; j < 100000; ++j) {
        term *= q / ((j + 1.0) * (m + j + 1.0));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

namespace detail {

inline void silence_gsl() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

}  // namespace detail

/// ln(e^{-w} I_m(w)) for w >= 0; -inf when the scaled value underflows.
inline double log_bessel_i_scaled(int m, double w) {
    detail::silence_gsl();
    if (w == 0.0) return m == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double mu4 = 4.0 * m * m;
    if (w > std::max(50.0, static_cast<double>(m) * m)) {
        // Hankel expansion; GSL degrades out here
        double sum = 1.0, term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -(mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * w);
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        return std::log(sum) - 0.5 * std::log(2.0 * std::numbers::pi * w);
    }
    gsl_sf_result res;
    const int status = gsl_sf_bessel_In_scaled_e(m, w, &res);
    if (status == GSL_EUNDRFLW || (status == GSL_SUCCESS && res.val < 1e-280)) {
        // ascending series in log form, past GSL's underflow
        const double q = 0.25 * w * w;
        double term = 1.0, sum = 1.0;
        for (int j = 0; j < 100000; ++j) {
            term *= q / ((j + 1.0) * (m + j + 1.0));
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return m * std::log(0.5 * w) - log_gamma(m + 1.0) + std::log(sum) - w;
    }
    if (status != GSL_SUCCESS)
        throw ConvergenceError("scaled Bessel I failed: " + std::string(gsl_strerror(status)));
    return std::log(res.val);
}

/// Positive zeros of L_n^{(k)}, ascending, from the eigenvalues of the Jacobi
/// matrix (diagonal 2j+k+1, off-diagonal sqrt(j(j+k))), polished by Newton.
inline std::vector<double> laguerre_zeros(int n, int k) {
    if (k < 0) throw DomainError("laguerre_zeros: k must be nonnegative");
    if (n <= 0) return {};
    SymTridiag jac;
    jac.diag.resize(n);
    jac.offdiag.resize(n - 1);
    for (int j = 0; j < n; ++j) jac.diag[j] = 2.0 * j + k + 1.0;
    for (int j = 1; j < n; ++j) jac.offdiag[j - 1] = std::sqrt(static_cast<double>(j) * (j + k));
    auto roots = eigenvalues(jac, 0.0);
    for (double& x : roots) {
        // d/dx L_n^{(k)} = -L_{n-1}^{(k+1)}
        for (int it = 0; it < 3; ++it) {
            const double f = laguerre(n, k, x);
            const double df = -laguerre(n - 1, k + 1, x);
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step) || std::fabs(step) > 1e-6 * std::max(1.0, x)) break;
            x -= step;
        }
        const ScaledLaguerre s = laguerre_scaled(n, k, x);
        if (std::fabs(s.ratio) > 1e-9 * s.abs_sum)
            throw ConvergenceError("laguerre_zeros: root failed verification", s.ratio);
    }
    return roots;
}

}  // namespace lwall
