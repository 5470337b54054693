#pragma once

// Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, plus
// eigenvectors by inverse iteration. Shared by the Laguerre-zero finder and the
// finite-difference oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lwall {

struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;  // size diag.size() - 1

    std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below `shift` (LDL^T pivot sign count).
inline std::size_t sturm_count(const SymTridiag& t, double shift) {
    const std::size_t n = t.size();
    if (n == 0) return 0;
    constexpr double tiny = std::numeric_limits<double>::min() * 1e4;
    std::size_t count = 0;
    double q = t.diag[0] - shift;
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == n) break;
        const double e = t.offdiag[i];
        q = t.diag[i + 1] - shift - e * e / q;
    }
    return count;
}

/// Gerschgorin enclosure [lo, hi] of the spectrum.
inline std::pair<double, double> gerschgorin(const SymTridiag& t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::fabs(t.offdiag[i - 1]);
        if (i + 1 < n) r += std::fabs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    return {lo, hi};
}

/// k-th smallest eigenvalue (0-based) inside [lo, hi], bisected to `abs_tol`.
inline double kth_eigenvalue(const SymTridiag& t, std::size_t k, double lo, double hi,
                             double abs_tol) {
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= abs_tol || mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// All eigenvalues below `cut`, at most `max_count` of them, ascending.
inline std::vector<double> eigenvalues_below(const SymTridiag& t, double cut,
                                             std::size_t max_count,
                                             double abs_tol = 1e-12) {
    std::vector<double> out;
    if (t.size() == 0) return out;
    const auto [glo, ghi] = gerschgorin(t);
    const double hi = std::min(cut, ghi + 1.0);
    const std::size_t n_below = std::min(sturm_count(t, cut), max_count);
    out.reserve(n_below);
    double lo = glo - 1.0;
    for (std::size_t k = 0; k < n_below; ++k) {
        // eigenvalues come out ascending; the previous one is a valid lower bound
        const double ev = kth_eigenvalue(t, k, lo, hi, abs_tol);
        out.push_back(ev);
        lo = std::max(lo, ev - 2.0 * abs_tol);
    }
    return out;
}

/// All eigenvalues, ascending.
inline std::vector<double> eigenvalues(const SymTridiag& t, double abs_tol = 1e-13) {
    const auto [glo, ghi] = gerschgorin(t);
    std::vector<double> out;
    out.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        out.push_back(kth_eigenvalue(t, k, glo - 1.0, ghi + 1.0, abs_tol));
    return out;
}

namespace detail {

// Solve (T - shift I) x = b by Gaussian elimination with partial pivoting.
// U has two superdiagonals after pivoting.
inline std::vector<double> shifted_solve(const SymTridiag& t, double shift,
                                         std::vector<double> b) {
    const std::size_t n = t.size();
    std::vector<double> d(n), du(n, 0.0), du2(n, 0.0), dl(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        du[i] = t.offdiag[i];
        dl[i] = t.offdiag[i];
    }
    const double tiny = std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::fabs(shift));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::fabs(d[i]) >= std::fabs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            if (i + 2 < n) du2[i] = 0.0;
            b[i + 1] -= f * b[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= f * b[i];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        if (ii + 1 < n) s -= du[ii] * x[ii + 1];
        if (ii + 2 < n) s -= du2[ii] * x[ii + 2];
        x[ii] = s / d[ii];
    }
    return x;
}

}  // namespace detail

/// Unit-norm eigenvector for a (bisected) eigenvalue, by inverse iteration.
inline std::vector<double> eigenvector(const SymTridiag& t, double eigenvalue) {
    const std::size_t n = t.size();
    if (n == 0) return {};
    const double shift =
        eigenvalue + 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::fabs(eigenvalue));
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 4; ++it) {
        x = detail::shifted_solve(t, shift, std::move(x));
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : x) v /= norm;
    }
    // fix the sign convention: first significant component positive
    const auto it = std::find_if(x.begin(), x.end(),
                                 [](double v) { return std::fabs(v) > 1e-12; });
    if (it != x.end() && *it < 0.0)
        for (double& v : x) v = -v;
    return x;
}

}  // namespace lwall
