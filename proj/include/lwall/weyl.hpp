#pragma once

// Diagonal Weyl coefficients
//
//     mu_m(z) = sum_n c_{n,m} / (Lambda_n - z),   Lambda_n = B (2n + 1).
//
// The terms decay only like n^{-3/2}, so the series is never summed directly.
// With p_n = n + s, s = 1/2 - z/(2B), and 1/p = int_0^1 t^{p-1} dt, splitting
// the t-integral at t0 gives the exact representation
//
//     2B mu = sum_n c_n t0^{p_n} / p_n  +  int_{t0}^1 t^{s-1} G(t) dt,
//
// where G(t) = sum_n c_n t^n has the Hardy-Hille closed form
//
//     G(t) = a B t^{-m/2} (1-t)^{-1} exp(-(xi1+xi2)(1+t) / (2(1-t)))
//            * I_m(2 sqrt(xi1 xi2 t) / (1-t))
//
// (xi1 = xi2 = B a^2/2 for mu itself). The first sum converges like t0^n and
// is analytic in s away from the poles; the integral is smooth in u = sqrt(1-t).
// The same split with 1/p^2 = int_0^1 t^{p-1} (-ln t) dt gives d mu / dE.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lwall/errors.hpp"
#include "lwall/landau.hpp"
#include "lwall/specfun.hpp"

namespace lwall {

/// Truncation policy for the Weyl series.
struct WeylSettings {
    double term_tol = 1e-12;
    int n_max_cap = 20000;
    int tail_safety = 8;  // consecutive below-tolerance terms before stopping

    void validate() const {
        if (!(term_tol > 0.0)) throw ConfigError("term_tol must be positive");
        if (n_max_cap < 1) throw ConfigError("n_max_cap must be at least 1");
        if (tail_safety < 1) throw ConfigError("tail_safety must be at least 1");
    }

    /// Doubled cap and halved tolerance, for stability checks.
    WeylSettings refined() const { return {0.5 * term_tol, 2 * n_max_cap, tail_safety}; }
};

template <class T>
struct WeylEval {
    T value{};
    int n_used = 0;
    double tail_bound = 0.0;  // series tail bound plus quadrature error estimate
};

/// An energy given either absolutely or as Lambda_level + offset. The anchored
/// form keeps offsets far below ulp(Lambda_level) exact.
struct Energy {
    int level = -1;
    double offset = 0.0;

    static Energy absolute(double E) { return {-1, E}; }
    static Energy near_level(int n, double offset) { return {n, offset}; }

    double value(double B) const {
        return level < 0 ? offset : B * (2.0 * level + 1.0) + offset;
    }
};

/// Largest |m| the kernel evaluation supports.
inline constexpr int max_mode = 500;

namespace detail {

// p_n = (n + shift) + frac; for an anchored energy p_level = -offset/(2B) exactly.
template <class S>
struct Exponent {
    int shift = 0;
    S frac{};

    S p(int n) const { return S(static_cast<double>(n + shift)) + frac; }
    double re_s() const { return shift + std::real(frac); }
    double im_s() const { return std::imag(frac); }
};

inline Exponent<double> exponent_of(double B, Energy e) {
    if (e.level >= 0) return {-e.level, -e.offset / (2.0 * B)};
    return {0, 0.5 - e.offset / (2.0 * B)};
}

// Coefficients kappa_n = P binom(n+m, n) l_n(xi1) l_n(xi2) with
// P = a B (xi1 xi2)^{m/2} e^{-(xi1+xi2)/2} / m! and l_n = L_n^{(m)} / binom(n+m, n).
// For xi1 = xi2 = x this is c_{n,m}; in general it is 2 pi a R_{n,m}(r) R_{n,m}(a).
struct KernelArgs {
    double log_ab;  // ln(a B)
    double xi1;
    double xi2;
    int m;
};

class CoefficientStream {
public:
    explicit CoefficientStream(const KernelArgs& k) : k_(k) {
        const bool vanishing = k.m > 0 && (k.xi1 == 0.0 || k.xi2 == 0.0);
        if (vanishing) {
            log_p_ = -std::numeric_limits<double>::infinity();
        } else {
            log_p_ = k.log_ab - 0.5 * (k.xi1 + k.xi2) - log_gamma(k.m + 1.0);
            if (k.m > 0) log_p_ += 0.5 * k.m * (std::log(k.xi1) + std::log(k.xi2));
        }
    }

    // Advance to index n (call with n = 0, 1, 2, ... in order).
    void advance() {
        if (n_ < 0) {
            n_ = 0;
            l1_ = l2_ = 1.0;
            log_binom_ = 0.0;
            return;
        }
        const int j = n_;
        const double m = k_.m;
        const double denom = j + 1.0 + m;
        const double n1 = ((2.0 * j + 1.0 + m - k_.xi1) * l1_ - j * l1_prev_) / denom;
        const double n2 = ((2.0 * j + 1.0 + m - k_.xi2) * l2_ - j * l2_prev_) / denom;
        l1_prev_ = l1_;
        l2_prev_ = l2_;
        l1_ = n1;
        l2_ = n2;
        log_binom_ += std::log((j + 1.0 + m) / (j + 1.0));
        ++n_;
    }

    int index() const { return n_; }
    // sign and log-magnitude of kappa_n
    int sign() const {
        const double prod = l1_ * l2_;
        return (prod == 0.0 || log_p_ == -std::numeric_limits<double>::infinity())
                   ? 0
                   : (prod > 0 ? 1 : -1);
    }
    double log_abs() const {
        return log_p_ + log_binom_ + std::log(std::fabs(l1_)) + std::log(std::fabs(l2_));
    }

private:
    KernelArgs k_;
    double log_p_ = 0.0;
    int n_ = -1;
    double l1_ = 1.0, l2_ = 1.0, l1_prev_ = 0.0, l2_prev_ = 0.0;
    double log_binom_ = 0.0;
};

// ln G(t) at t = 1 - u^2 (G includes the a B prefactor); -inf where it vanishes.
inline double kernel_log(const KernelArgs& k, double u) {
    const double u2 = u * u;
    const double t = 1.0 - u2;
    const double sqt = std::sqrt(t);
    const double prod = k.xi1 * k.xi2;
    const double dsq = std::sqrt(k.xi1) - std::sqrt(k.xi2);
    const double gm = std::sqrt(prod);
    const double expo = -dsq * dsq * (1.0 + t) / (2.0 * u2) - gm * u2 / ((1.0 + sqt) * (1.0 + sqt));
    const double w = 2.0 * std::sqrt(prod * t) / u2;
    const double log_i = log_bessel_i_scaled(k.m, w);
    if (log_i == -std::numeric_limits<double>::infinity()) return log_i;
    return k.log_ab - std::log(u2) - 0.5 * k.m * std::log(t) + expo + log_i;
}

inline double kernel_log_at_t(const KernelArgs& k, double t) {
    return kernel_log(k, std::sqrt(1.0 - t));
}

// Weight attached to 1/p^{order+1}: first the closed form of
// int_0^{t0} t^{p-1} (-ln t)^order / order! dt, analytically continued in p.
template <class S>
S head_weight(S p, double log_t0, int order) {
    const S tp = std::exp(p * log_t0);
    if (order == 0) return tp / p;
    return tp * (S(1.0) / (p * p) - log_t0 / p);
}

// c * head_weight in log form: c and p may both be subnormal near a pole.
inline double head_weight_scaled(double log_c, double p, double log_t0, int order) {
    const double sp = p > 0 ? 1.0 : -1.0;
    const double lp = std::log(std::fabs(p));
    if (order == 0) return sp * std::exp(log_c + p * log_t0 - lp);
    return std::exp(log_c + p * log_t0 - 2.0 * lp) * (1.0 - p * log_t0);
}

// Same with the pole part 1/p^{order+1} removed (order 0 only):
// (t0^p - 1)/p = ln t0 * expm1(p ln t0) / (p ln t0).
inline double head_weight_regular(double p, double log_t0) {
    const double y = p * log_t0;
    const double phi = (std::fabs(y) < 1e-300) ? 1.0 : std::expm1(y) / y;
    return log_t0 * phi;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& cuts, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    QuadResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // mapped to [-1, 1]: the Boost 1.74 recursion mixes scaled and
        // unscaled error estimates on short intervals
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double half = 0.5 * (cuts[i + 1] - cuts[i]);
        double err = 0.0;
        out.value += gauss_kronrod<double, 31>::integrate(
            [&](double y) { return half * f(mid + half * y); }, -1.0, 1.0, 15, tol, &err);
        out.error += err;
    }
    return out;
}

inline std::vector<double> breakpoints(const KernelArgs& k, double abs_s, double u_max) {
    std::vector<double> scales;
    scales.push_back(1.0 / std::sqrt(abs_s + 1.0));
    const double gm = std::sqrt(k.xi1 * k.xi2);
    if (k.m > 0 && gm > 0.0) scales.push_back(2.0 * std::sqrt(gm) / (k.m + 1.0));
    const double d = std::fabs(std::sqrt(k.xi1) - std::sqrt(k.xi2));
    if (d > 0.0) scales.push_back(d);
    std::vector<double> cuts{0.0, u_max};
    for (double s : scales)
        for (double f : {0.125, 0.5, 2.0}) {
            const double c = s * f;
            if (c > 1e-12 * u_max && c < 0.98 * u_max) cuts.push_back(c);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [u_max](double x, double y) { return y - x < 1e-3 * u_max; }),
               cuts.end());
    cuts.back() = u_max;
    return cuts;
}

// Core evaluation of sum_n kappa_n / p_n^{order+1} by the split representation.
// `skip` >= 0 removes the singular part of that index (order 0, real s only).
template <class S>
WeylEval<S> split_sum(const KernelArgs& k, const Exponent<S>& ex, int order, int skip,
                      const WeylSettings& settings) {
    settings.validate();
    const double re_s = ex.re_s();
    const double t0 = re_s >= -1.5 ? 0.25 : std::exp(-2.0 / -re_s);
    const double log_t0 = std::log(t0);
    const double tau = std::sqrt(t0);

    // damped series
    CoefficientStream coeffs(k);
    S partial{};
    int small_run = 0;
    const int n_min = std::max(0, static_cast<int>(std::ceil(-re_s))) + 1;
    double tail = std::numeric_limits<double>::infinity();
    double k_tau = -1.0;  // sqrt(G11(tau) G22(tau)), lazily
    int n = 0;
    for (;; ++n) {
        if (n >= settings.n_max_cap)
            throw ConvergenceError("Weyl series: n_max_cap reached before term_tol",
                                   std::abs(partial));
        coeffs.advance();
        S term{};
        const int sg = coeffs.sign();
        if (sg != 0) {
            const S p = ex.p(n);
            if (p == S(0.0) && n != skip) throw PoleError("Weyl series evaluated at a Landau level");
            const double log_c = coeffs.log_abs();
            if constexpr (std::is_same_v<S, double>) {
                if (n == skip)
                    term = sg * std::exp(log_c) * head_weight_regular(p, log_t0);
                else
                    term = sg * head_weight_scaled(log_c, p, log_t0, order);
            } else {
                term = static_cast<double>(sg) * std::exp(log_c) * head_weight(p, log_t0, order);
            }
        }
        partial += term;
        const double scale = std::max(1.0, std::abs(partial));
        small_run = (std::abs(term) < settings.term_tol * scale) ? small_run + 1 : 0;
        if (n >= n_min && small_run >= settings.tail_safety) {
            if (k_tau < 0.0) {
                const KernelArgs d1{k.log_ab, k.xi1, k.xi1, k.m};
                const KernelArgs d2{k.log_ab, k.xi2, k.xi2, k.m};
                k_tau = std::exp(0.5 * (kernel_log_at_t(d1, tau) + kernel_log_at_t(d2, tau)));
            }
            const double pk = n + 1 + re_s;  // > 0 by n_min
            const double phi = order == 0 ? 1.0 / pk : 1.0 / (pk * pk) - log_t0 / pk;
            const double r = t0 / tau;
            tail = k_tau * std::exp(re_s * log_t0) * phi * std::pow(r, n + 1) / (1.0 - r);
            if (tail <= settings.term_tol * scale) break;
        }
    }

    // kernel integral over t in [t0, 1], in u = sqrt(1 - t)
    const double u_max = std::sqrt(1.0 - t0);
    const auto cuts = breakpoints(k, std::abs(S(static_cast<double>(ex.shift)) + ex.frac), u_max);
    const double qtol = std::min(1e-13, 0.1 * settings.term_tol);
    const double im_s = ex.im_s();
    auto magnitude = [&](double u, double& log_t) {
        if (u <= 0.0) return 0.0;
        log_t = std::log1p(-u * u);
        const double lk = kernel_log(k, u);
        if (lk == -std::numeric_limits<double>::infinity()) return 0.0;
        double v = std::exp(std::numbers::ln2 + std::log(u) + (re_s - 1.0) * log_t + lk);
        if (order == 1) v *= -log_t;
        return v;
    };
    S integral{};
    double qerr = 0.0;
    if constexpr (std::is_same_v<S, double>) {
        const auto q = integrate_pieces(
            [&](double u) {
                double lt = 0.0;
                return magnitude(u, lt);
            },
            cuts, qtol);
        integral = q.value;
        qerr = q.error;
    } else {
        const auto qr = integrate_pieces(
            [&](double u) {
                double lt = 0.0;
                const double v = magnitude(u, lt);
                return v * std::cos(im_s * lt);
            },
            cuts, qtol);
        const auto qi = integrate_pieces(
            [&](double u) {
                double lt = 0.0;
                const double v = magnitude(u, lt);
                return v * std::sin(im_s * lt);
            },
            cuts, qtol);
        integral = S(qr.value, qi.value);
        qerr = qr.error + qi.error;
    }

    WeylEval<S> out;
    out.value = partial + integral;
    out.n_used = n + 1;
    out.tail_bound = tail + qerr;
    return out;
}

inline KernelArgs diagonal_args(const Params& p, int m) {
    const double x = p.x();
    return {std::log(p.a * p.B), x, x, std::abs(m)};
}

inline void check_mode(int m) {
    if (std::abs(m) > max_mode)
        throw DomainError("|m| = " + std::to_string(std::abs(m)) + " exceeds the supported " +
                          std::to_string(max_mode));
}

inline void check_energy(double B, Energy e) {
    if (!std::isfinite(e.offset)) throw DomainError("energy must be finite");
    if (e.level >= 0) {
        if (e.offset == 0.0) throw PoleError("energy sits on Landau level " + std::to_string(e.level));
        return;
    }
    // absolute energies: refuse anything closer than 1e-12 B to a level
    const double E = e.offset;
    const double nu = (E / B - 1.0) / 2.0;
    if (nu > -0.5) {
        const double nearest = B * (2.0 * std::max(0.0, std::round(nu)) + 1.0);
        if (std::fabs(E - nearest) < 1e-12 * B)
            throw PoleError("energy within 1e-12 B of a Landau level");
    }
}

template <class S>
WeylEval<S> scale_result(WeylEval<S> r, double B, int order) {
    const double f = order == 0 ? 1.0 / (2.0 * B) : 1.0 / (4.0 * B * B);
    r.value *= f;
    r.tail_bound *= f;
    return r;
}

}  // namespace detail

/// mu_{m,B}(E) at a real energy (absolute or anchored to a level).
inline WeylEval<double> mu(const Params& p, int m, Energy E, const WeylSettings& settings = {}) {
    p.validate();
    detail::check_mode(m);
    detail::check_energy(p.B, E);
    const auto ex = detail::exponent_of(p.B, E);
    return detail::scale_result(detail::split_sum(detail::diagonal_args(p, m), ex, 0, -1, settings),
                                p.B, 0);
}

inline WeylEval<double> mu(const Params& p, int m, double E, const WeylSettings& settings = {}) {
    return mu(p, m, Energy::absolute(E), settings);
}

/// mu_{m,B}(z) off the real axis.
inline WeylEval<std::complex<double>> mu(const Params& p, int m, std::complex<double> z,
                                         const WeylSettings& settings = {}) {
    if (z.imag() == 0.0) {
        const auto r = mu(p, m, z.real(), settings);
        return {r.value, r.n_used, r.tail_bound};
    }
    p.validate();
    detail::check_mode(m);
    const detail::Exponent<std::complex<double>> ex{0, 0.5 - z / (2.0 * p.B)};
    return detail::scale_result(detail::split_sum(detail::diagonal_args(p, m), ex, 0, -1, settings),
                                p.B, 0);
}

/// d mu / dE = sum_n c_{n,m} / (Lambda_n - E)^2.
inline WeylEval<double> mu_derivative(const Params& p, int m, Energy E,
                                      const WeylSettings& settings = {}) {
    p.validate();
    detail::check_mode(m);
    detail::check_energy(p.B, E);
    const auto ex = detail::exponent_of(p.B, E);
    return detail::scale_result(detail::split_sum(detail::diagonal_args(p, m), ex, 1, -1, settings),
                                p.B, 1);
}

inline WeylEval<double> mu_derivative(const Params& p, int m, double E,
                                      const WeylSettings& settings = {}) {
    return mu_derivative(p, m, Energy::absolute(E), settings);
}

/// h_{n,m}(E) = mu_{m,B}(E) - c_{n,m}/(Lambda_n - E); finite at E = Lambda_n.
inline WeylEval<double> h_remainder(const Params& p, int m, int n, Energy E,
                                    const WeylSettings& settings = {}) {
    p.validate();
    detail::check_mode(m);
    require_level(n);
    if (E.level != n) E = Energy::near_level(n, E.value(p.B) - landau_level(p.B, n));
    if (!std::isfinite(E.offset)) throw DomainError("energy must be finite");
    const detail::Exponent<double> ex{-n, -E.offset / (2.0 * p.B)};
    return detail::scale_result(detail::split_sum(detail::diagonal_args(p, m), ex, 0, n, settings),
                                p.B, 0);
}

inline WeylEval<double> h_remainder(const Params& p, int m, int n, double E,
                                    const WeylSettings& settings = {}) {
    return h_remainder(p, m, n, Energy::absolute(E), settings);
}

struct PoleResidue {
    double value = 0.0;         // c_{n,m} as a real (0 on underflow)
    bool underflow = false;
    double extrapolated = 0.0;  // limit of (Lambda_n - E) mu(E) as E -> Lambda_n
    double relative_error = 0.0;
};

/// Residue of mu at Lambda_n, checked against the extrapolated limit of
/// (Lambda_n - E) mu(E) along E = Lambda_n + 2^{-j} B s, j = 10..20. The scale
/// s = min(1, c / (B |h_{n,m}(Lambda_n)|)) keeps the linear term below c.
inline PoleResidue pole_residue(const Params& p, int m, int n, const WeylSettings& settings = {}) {
    p.validate();
    const SignedLog c = boundary_coeff(p.B, p.a, n, m);
    PoleResidue out;
    out.value = c.to_real();
    out.underflow = c.underflows() || (c.is_zero() == false && out.value == 0.0);
    if (out.underflow || c.is_zero()) {
        out.extrapolated = 0.0;
        out.relative_error = 0.0;
        return out;
    }
    const double h0 = std::fabs(h_remainder(p, m, n, Energy::near_level(n, 0.0), settings).value);
    const double s = std::min(1.0, out.value / (p.B * std::max(h0, 1e-300)));
    std::vector<double> xs, fs;
    for (int j = 10; j <= 20; ++j) {
        const double delta = std::ldexp(p.B * s, -j);
        const double v = mu(p, m, Energy::near_level(n, delta), settings).value;
        xs.push_back(delta);
        fs.push_back(-delta * v);
    }
    // Neville extrapolation to delta = 0
    std::vector<double> t = fs;
    const std::size_t N = xs.size();
    for (std::size_t level = 1; level < N; ++level)
        for (std::size_t i = N - 1; i >= level; --i) {
            t[i] = (xs[i - level] * t[i] - xs[i] * t[i - 1]) / (xs[i - level] - xs[i]);
            if (i == level) break;
        }
    out.extrapolated = t[N - 1];
    out.relative_error = std::fabs(out.extrapolated - out.value) / out.value;
    return out;
}

/// w(r) = 2 pi a sum_n R_{n,m}(r) R_{n,m}(a) / (Lambda_n - E): the channel
/// resolvent applied to the wall trace. Kink at r = a with w'(a+) - w'(a-) = -1.
inline WeylEval<double> green_profile(const Params& p, int m, Energy E, double r,
                                      const WeylSettings& settings = {}) {
    p.validate();
    detail::check_mode(m);
    detail::check_energy(p.B, E);
    if (!(r >= 0.0)) throw DomainError("radius must be nonnegative");
    const double x = p.x();
    const detail::KernelArgs k{std::log(p.a * p.B), 0.5 * p.B * r * r, x, std::abs(m)};
    const auto ex = detail::exponent_of(p.B, E);
    return detail::scale_result(detail::split_sum(k, ex, 0, -1, settings), p.B, 0);
}

}  // namespace lwall
