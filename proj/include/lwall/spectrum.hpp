#pragma once

// Per-mode eigenvalues in spectral gaps.
//
// mu is strictly increasing between consecutive poles, so each gap holds at
// most one root of mu(E) = mu_target per mode. Roots are bracketed in the log
// of the distance to the nearer gap edge, which keeps shifts far below
// ulp(Lambda_n) resolvable, and refined with Brent's method.

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_roots.h>

#include "lwall/errors.hpp"
#include "lwall/landau.hpp"
#include "lwall/specfun.hpp"
#include "lwall/weyl.hpp"

namespace lwall {

enum class ScalarCondition {
    PaperForm,        // alpha - mu(E) = 0
    BirmanSchwinger,  // 1 + alpha mu(E) = 0
};

inline const char* condition_name(ScalarCondition c) {
    return c == ScalarCondition::PaperForm ? "paper" : "bs";
}

inline constexpr int below_lowest_gap = -1;

struct Gap {
    double lower = 0.0;  // finite search floor for the below-lowest gap
    double upper = 0.0;
    int n_gap = 0;       // lower edge Lambda_{n_gap}, or below_lowest_gap

    static Gap between(double B, int n) {
        require_level(n);
        return {landau_level(B, n), landau_level(B, n + 1), n};
    }
    static Gap below_lowest(double B, double e_min) {
        if (!(e_min < landau_level(B, 0))) throw ConfigError("search floor must lie below Lambda_0");
        return {e_min, landau_level(B, 0), below_lowest_gap};
    }
};

/// Search floor for the gap below Lambda_0.
inline double lowest_search_floor(const Params& p) {
    return -10.0 * std::max({1.0, p.alpha * p.alpha, p.B});
}

struct EigenvalueRecord {
    int n_gap = 0;
    int m = 0;
    double E = 0.0;
    int anchor = 0;       // nearest Landau level
    double shift = 0.0;   // E - Lambda_anchor, exact
    double predicted_shift = 0.0;
    double c_nm = 0.0;    // residue at the anchor level
    int multiplicity = 1;
    ScalarCondition condition = ScalarCondition::PaperForm;
    int iterations = 0;
    double residual = 0.0;
    int n_used = 0;
};

struct SolveOptions {
    double root_tol = 1e-10;   // absolute, in ln|E - Lambda_anchor|
    double split = 0.5;        // position of the half-selection probe inside the gap
    double ladder_scale = 1.0; // multiplies the epsilon ladder

    void validate() const {
        if (!(root_tol > 0.0)) throw ConfigError("root_tol must be positive");
        if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
        if (!(ladder_scale > 0.0 && ladder_scale <= 1.0))
            throw ConfigError("ladder_scale must lie in (0, 1]");
    }
};

inline void require_coupling(double alpha) {
    if (alpha == 0.0 || !std::isfinite(alpha))
        throw ConfigError("alpha must be finite and nonzero");
}

/// Value of mu at which the condition vanishes.
inline double target_mu(double alpha, ScalarCondition c) {
    require_coupling(alpha);
    return c == ScalarCondition::PaperForm ? alpha : -1.0 / alpha;
}

inline double condition_value(double alpha, ScalarCondition c, double mu_value) {
    return c == ScalarCondition::PaperForm ? alpha - mu_value : 1.0 + alpha * mu_value;
}

/// Leading shift of the mode-m eigenvalue next to Lambda_n: -c/alpha for the
/// paper form, alpha c for Birman-Schwinger. 0 when c underflows.
inline double predicted_shift(const Params& p, int n, int m,
                              ScalarCondition c = ScalarCondition::PaperForm) {
    p.validate();
    require_coupling(p.alpha);
    const SignedLog cl = boundary_coeff(p.B, p.a, n, m);
    if (cl.is_zero()) return 0.0;
    if (c == ScalarCondition::PaperForm)
        return -std::exp(cl.log_abs - std::log(std::fabs(p.alpha))) * (p.alpha > 0 ? 1.0 : -1.0);
    return std::exp(cl.log_abs + std::log(std::fabs(p.alpha))) * (p.alpha > 0 ? 1.0 : -1.0);
}

namespace detail {

inline constexpr double log_underflow = -745.0;

// E = Lambda_anchor + side * delta with delta in (0, delta_max].
struct HalfProblem {
    int anchor = 0;
    int side = 1;
    double delta_max = 0.0;
    double target = 0.0;
};

inline Energy half_energy(const HalfProblem& hp, double delta) {
    return Energy::near_level(hp.anchor, hp.side * delta);
}

struct HalfRoot {
    double delta = 0.0;
    int iterations = 0;
};

struct GslSolverDeleter {
    void operator()(gsl_root_fsolver* s) const { gsl_root_fsolver_free(s); }
};

template <class F>
double brent_log(F&& phi_of_log, double y_lo, double y_hi, double tol, int& iterations) {
    silence_gsl();
    struct Ctx {
        F* f;
        std::exception_ptr err;
    } ctx{&phi_of_log, nullptr};
    gsl_function fn;
    fn.params = &ctx;
    fn.function = [](double y, void* raw) {
        auto* c = static_cast<Ctx*>(raw);
        try {
            return (*c->f)(y);
        } catch (...) {
            if (!c->err) c->err = std::current_exception();
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::unique_ptr<gsl_root_fsolver, GslSolverDeleter> s(
        gsl_root_fsolver_alloc(gsl_root_fsolver_brent));
    if (gsl_root_fsolver_set(s.get(), &fn, y_lo, y_hi) != GSL_SUCCESS) {
        if (ctx.err) std::rethrow_exception(ctx.err);
        throw ConvergenceError("Brent: invalid bracket", 0.0);
    }
    for (iterations = 1; iterations <= 200; ++iterations) {
        const int st = gsl_root_fsolver_iterate(s.get());
        if (ctx.err) std::rethrow_exception(ctx.err);
        if (st != GSL_SUCCESS) throw ConvergenceError("Brent iteration failed", 0.0);
        const double lo = gsl_root_fsolver_x_lower(s.get());
        const double hi = gsl_root_fsolver_x_upper(s.get());
        if (gsl_root_test_interval(lo, hi, tol, 0.0) == GSL_SUCCESS)
            return gsl_root_fsolver_root(s.get());
    }
    throw ConvergenceError("Brent: iteration limit", 0.0);
}

inline int sign_of(double v) { return (v > 0) - (v < 0); }

// Root of phi(delta) = mu(E(delta)) - target in (0, delta_max]; phi_far is phi(delta_max).
inline std::optional<HalfRoot> solve_half(const Params& p, int m, const HalfProblem& hp,
                                          double phi_far, const WeylSettings& ws,
                                          const SolveOptions& opt) {
    const int near_sign = -hp.side;  // mu -> -side * inf at the anchor
    if (phi_far == 0.0) return HalfRoot{hp.delta_max, 0};
    if (sign_of(phi_far) == near_sign) return std::nullopt;

    auto phi = [&](double delta) {
        return mu(p, m, half_energy(hp, delta), ws).value - hp.target;
    };

    const SignedLog c = boundary_coeff(p.B, p.a, hp.anchor, m);
    const bool unresolved = c.is_zero() || boundary_coeff_vanishes(p.B, p.a, hp.anchor, m) ||
                            c.log_abs < log_underflow;
    double h_limit = std::numeric_limits<double>::quiet_NaN();
    auto limit = [&] {
        if (std::isnan(h_limit))
            h_limit = h_remainder(p, m, hp.anchor, Energy::near_level(hp.anchor, 0.0), ws).value;
        return h_limit;
    };
    if (unresolved) {
        // pole absent (or below binary64): mu stays bounded at the edge
        if (sign_of(limit() - hp.target) != near_sign) return std::nullopt;
    }

    double far = hp.delta_max;
    double near = 0.0;
    bool found = false;
    for (int k = 1; k <= 5 && !found; ++k) {
        const double d = opt.ladder_scale * std::pow(10.0, -2.0 * k) * p.B;
        if (d >= far) continue;
        const double v = phi(d);
        if (v == 0.0) return HalfRoot{d, 0};
        if (sign_of(v) == near_sign) {
            near = d;
            found = true;
        } else {
            far = d;
        }
    }
    if (!found) {
        // mu ~ -side c / delta + h near the anchor
        double d = far * 0.5;
        if (!unresolved) {
            const double gap = std::fabs(limit() - hp.target);
            if (gap > 0.0) {
                const double est = std::exp(c.log_abs - std::log(gap));
                if (est < far) d = est;
            }
        }
        for (int k = 1; k <= 2000 && !found; ++k) {
            d *= 0.5;
            if (!(d > 0.0) || d < 1e-305) break;
            const double v = phi(d);
            if (v == 0.0) return HalfRoot{d, 0};
            if (sign_of(v) == near_sign) {
                near = d;
                found = true;
            } else {
                far = d;
            }
        }
    }
    if (!found) return std::nullopt;

    HalfRoot out;
    const double y = brent_log([&](double yy) { return phi(std::exp(yy)); }, std::log(near),
                               std::log(far), opt.root_tol, out.iterations);
    out.delta = std::exp(y);
    return out;
}

inline EigenvalueRecord make_record(const Params& p, int m, int n_gap, const HalfProblem& hp,
                                    const HalfRoot& root, ScalarCondition cond,
                                    const WeylSettings& ws) {
    EigenvalueRecord r;
    r.n_gap = n_gap;
    r.m = m;
    r.anchor = hp.anchor;
    r.shift = hp.side * root.delta;
    r.E = landau_level(p.B, hp.anchor) + r.shift;
    r.predicted_shift = predicted_shift(p, hp.anchor, m, cond);
    r.c_nm = boundary_coeff(p.B, p.a, hp.anchor, m).to_real();
    r.multiplicity = m == 0 ? 1 : 2;
    r.condition = cond;
    r.iterations = root.iterations;
    const auto ev = mu(p, m, half_energy(hp, root.delta), ws);
    r.residual = condition_value(p.alpha, cond, ev.value);
    r.n_used = ev.n_used;
    return r;
}

}  // namespace detail

/// The eigenvalue of mode m in the gap, if any.
inline std::optional<EigenvalueRecord> solve_mode(const Params& p, int m, const Gap& gap,
                                                  ScalarCondition cond,
                                                  const WeylSettings& ws = {},
                                                  const SolveOptions& opt = {}) {
    p.validate();
    ws.validate();
    opt.validate();
    const double target = target_mu(p.alpha, cond);

    if (gap.n_gap == below_lowest_gap) {
        const double l0 = landau_level(p.B, 0);
        if (!(gap.lower < l0)) throw ConfigError("search floor must lie below Lambda_0");
        detail::HalfProblem hp{0, -1, l0 - gap.lower, target};
        const double phi_far = mu(p, m, Energy::absolute(gap.lower), ws).value - target;
        const auto root = detail::solve_half(p, m, hp, phi_far, ws, opt);
        if (!root) return std::nullopt;
        return detail::make_record(p, m, below_lowest_gap, hp, *root, cond, ws);
    }

    require_level(gap.n_gap);
    const int n = gap.n_gap;
    const double width = 2.0 * p.B;
    const double probe = opt.split * width;
    const double phi_mid = mu(p, m, Energy::near_level(n, probe), ws).value - target;
    if (phi_mid == 0.0) {
        detail::HalfProblem hp{n, 1, probe, target};
        return detail::make_record(p, m, n, hp, {probe, 0}, cond, ws);
    }
    // mu increases through the gap: a positive phi at the probe puts the root below it
    detail::HalfProblem hp = phi_mid > 0 ? detail::HalfProblem{n, 1, probe, target}
                                         : detail::HalfProblem{n + 1, -1, width - probe, target};
    const auto root = detail::solve_half(p, m, hp, phi_mid, ws, opt);
    if (!root) return std::nullopt;
    return detail::make_record(p, m, n, hp, *root, cond, ws);
}

struct ClusterOptions {
    double stop_tol = 0.0;  // 0 selects 1e-13 B
    int m_cap = 400;
};

/// Side of Lambda_n on which the cluster accumulates: +1 above, -1 below.
inline int cluster_side(double alpha, ScalarCondition cond) {
    return target_mu(alpha, cond) < 0 ? 1 : -1;
}

/// Eigenvalues accumulating at Lambda_n, one per mode m >= 0 (multiplicity 2
/// for m != 0 since mu depends on |m| only). Sorted by |shift| descending.
inline std::vector<EigenvalueRecord> cluster(const Params& p, int n, ScalarCondition cond,
                                             const WeylSettings& ws = {},
                                             const ClusterOptions& copt = {},
                                             const SolveOptions& opt = {}) {
    p.validate();
    require_level(n);
    const double stop_tol = copt.stop_tol > 0.0 ? copt.stop_tol : 1e-13 * p.B;
    if (copt.m_cap < 0) throw ConfigError("m_cap must be nonnegative");
    const int side = cluster_side(p.alpha, cond);
    std::vector<EigenvalueRecord> out;
    if (side < 0 && n == 0) return out;  // no gap between levels below Lambda_0
    const Gap gap = Gap::between(p.B, side > 0 ? n : n - 1);
    for (int m = 0; m <= copt.m_cap; ++m) {
        const SignedLog c = boundary_coeff(p.B, p.a, n, m);
        if (!c.is_zero() && c.log_abs < detail::log_underflow) break;
        if (m > max_mode) break;
        const auto rec = solve_mode(p, m, gap, cond, ws, opt);
        if (!rec) continue;
        const double shift = rec->E - landau_level(p.B, n);
        if (rec->anchor == n && std::fabs(rec->shift) < stop_tol) break;
        if (std::fabs(shift) < stop_tol) break;
        out.push_back(*rec);
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenvalueRecord& x, const EigenvalueRecord& y) {
        const double ax = std::fabs(x.shift), ay = std::fabs(y.shift);
        if (ax != ay) return ax > ay;
        return x.m < y.m;
    });
    return out;
}

/// Roots below Lambda_0 for m = 0..m_cap, searched on (E_min, Lambda_0).
inline std::vector<EigenvalueRecord> below_lowest(const Params& p, ScalarCondition cond,
                                                  const WeylSettings& ws = {}, int m_cap = 50,
                                                  const SolveOptions& opt = {}) {
    p.validate();
    require_coupling(p.alpha);
    const Gap gap = Gap::below_lowest(p.B, lowest_search_floor(p));
    std::vector<EigenvalueRecord> out;
    for (int m = 0; m <= std::min(m_cap, max_mode); ++m) {
        const SignedLog c = boundary_coeff(p.B, p.a, 0, m);
        if (!c.is_zero() && c.log_abs < detail::log_underflow) break;
        if (auto rec = solve_mode(p, m, gap, cond, ws, opt)) out.push_back(*rec);
    }
    return out;
}

/// Wall radii a at which L_n^{(|m|)}(B a^2 / 2) = 0, ascending.
inline std::vector<double> special_radii(double B, int n, int m) {
    require_field(B);
    require_level(n);
    std::vector<double> out;
    for (double x : laguerre_zeros(n, std::abs(m))) out.push_back(std::sqrt(2.0 * x / B));
    return out;
}

/// Dimension of ker(H - Lambda_n) counted from vanishing Laguerre factors for
/// m in [0, m_scan] (+1 for m = 0, +2 otherwise). Never exceeds 2n.
inline int embedded_kernel_dim(double B, double a, int n, double tol = 1e-10, int m_scan = 200) {
    require_field(B);
    if (!(a > 0.0)) throw DomainError("a must be positive");
    require_level(n);
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (n == 0) return 0;
    const double x = 0.5 * B * a * a;
    int dim = 0;
    for (int m = 0; m <= m_scan; ++m) {
        const ScaledLaguerre l = laguerre_scaled(n, m, x);
        if (std::fabs(l.ratio) < tol * l.abs_sum) dim += m == 0 ? 1 : 2;
    }
    if (dim > 2 * n)
        throw std::logic_error("embedded kernel dimension " + std::to_string(dim) + " exceeds 2n");
    return dim;
}

/// Unnormalized radial profile w(r) = 2 pi a sum_n R_{n,m}(r) R_{n,m}(a) / (Lambda_n - E).
inline double bound_state_radial(const Params& p, int m, Energy E, double r,
                                 const WeylSettings& ws = {}) {
    return green_profile(p, m, E, r, ws).value;
}

inline double bound_state_radial(const Params& p, int m, double E, double r,
                                 const WeylSettings& ws = {}) {
    return bound_state_radial(p, m, Energy::absolute(E), r, ws);
}

/// Factor that makes w L2-normalized in the plane and positive at r = a:
/// int |w|^2 2 pi r dr = 2 pi a sum_n c_n / (Lambda_n - E)^2 = 2 pi a mu'(E).
inline double profile_normalization(const Params& p, int m, Energy E, const WeylSettings& ws = {}) {
    const double d = mu_derivative(p, m, E, ws).value;
    const double wa = mu(p, m, E, ws).value;
    const double s = wa < 0 ? -1.0 : 1.0;
    return s / std::sqrt(2.0 * std::numbers::pi * p.a * d);
}

}  // namespace lwall
