#pragma once

// Finite-difference check of the channel spectrum, independent of the Weyl
// series. One angular-momentum channel of (-i grad - A)^2 + alpha delta(r - a):
//
//     -(1/r)(r u')' + (m/r - B r/2)^2 u,   u'(a+) - u'(a-) = alpha u(a).
//
// Cell-centred conservative differences, symmetrized with sqrt(r_i); the zero
// flux at r = 0 needs no boundary condition and the scheme is O(h^2) for every
// m. The wall sits on a cell centre and contributes alpha/h there.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lwall/errors.hpp"
#include "lwall/landau.hpp"
#include "lwall/spectrum.hpp"
#include "lwall/tridiag.hpp"
#include "lwall/weyl.hpp"

namespace lwall {

struct OracleGrid {
    double R_max = 0.0;
    int K = 0;        // cells
    double h = 0.0;
    int a_index = 0;  // 1-based cell whose centre (a_index - 1/2) h is the wall

    double centre(int i) const { return (i - 0.5) * h; }

    /// Grid with the wall on cell N, h = a / (N - 1/2) <= h_max, covering [0, R_max].
    static OracleGrid with_wall_cell(double a, int N, double R_max) {
        if (!(a > 0.0)) throw ConfigError("oracle grid: a must be positive");
        if (N < 1) throw ConfigError("oracle grid: wall cell index must be >= 1");
        OracleGrid g;
        g.a_index = N;
        g.h = a / (N - 0.5);
        g.K = static_cast<int>(std::ceil(R_max / g.h));
        g.K = std::max(g.K, N + 1);
        g.R_max = g.K * g.h;
        return g;
    }

    static OracleGrid for_spacing(double a, double h_max, double R_max) {
        if (!(h_max > 0.0)) throw ConfigError("oracle grid: spacing must be positive");
        const int N = static_cast<int>(std::ceil(a / h_max + 0.5));
        return with_wall_cell(a, N, R_max);
    }

    /// R_max = a + 8 sqrt((2 n_target + 1)/B), h <= min(0.005, a/200).
    static OracleGrid standard(const Params& p, int n_target) {
        p.validate();
        require_level(n_target);
        const double R = p.a + 8.0 * std::sqrt((2.0 * n_target + 1.0) / p.B);
        return for_spacing(p.a, std::min(0.005, p.a / 200.0), R);
    }

    /// Same wall radius and extent with the wall cell index doubled (h roughly halved).
    OracleGrid refined() const {
        const double a = centre(a_index);
        return with_wall_cell(a, 2 * a_index, R_max);
    }
};

struct ChannelMatrix {
    SymTridiag matrix;
    OracleGrid grid;
    int m = 0;
};

/// Channel matrix for field B of either sign (B = 0 allowed).
inline ChannelMatrix build_channel_raw(double B, double a, double alpha, int m,
                                       const OracleGrid& g) {
    if (g.K < 2 || g.a_index < 1 || g.a_index > g.K || !(g.h > 0.0))
        throw ConfigError("oracle grid is inconsistent");
    if (std::fabs(g.centre(g.a_index) - a) > 1e-12 * a)
        throw ConfigError("oracle grid does not place the wall on a cell centre");
    ChannelMatrix out;
    out.grid = g;
    out.m = m;
    auto& t = out.matrix;
    t.diag.resize(g.K);
    t.offdiag.resize(g.K - 1);
    const double h2 = g.h * g.h;
    for (int i = 1; i <= g.K; ++i) {
        const double r = g.centre(i);
        const double v = m / r - 0.5 * B * r;
        // faces at (i-1) h and i h; Dirichlet one cell past R_max
        t.diag[i - 1] = ((i - 1) * g.h + i * g.h) / (r * h2) + v * v;
        if (i < g.K) t.offdiag[i - 1] = -(i * g.h) / (h2 * std::sqrt(r * g.centre(i + 1)));
    }
    t.diag[g.a_index - 1] += alpha / g.h;
    return out;
}

inline ChannelMatrix build_channel(const Params& p, int m, const OracleGrid& g) {
    p.validate();
    return build_channel_raw(p.B, p.a, p.alpha, m, g);
}

/// Eigenvalues below E_cut (at most max_count), ascending, to 1e-10 absolute.
inline std::vector<double> eigenvalues_below(const ChannelMatrix& c, double E_cut,
                                             std::size_t max_count) {
    if (!std::isfinite(E_cut)) throw ConfigError("E_cut must be finite");
    return eigenvalues_below(c.matrix, E_cut, max_count, 1e-10);
}

/// Eigenvalues in the open interval (lo, hi), ascending.
inline std::vector<double> eigenvalues_between(const ChannelMatrix& c, double lo, double hi) {
    const auto& t = c.matrix;
    const std::size_t k0 = sturm_count(t, lo);
    const std::size_t k1 = sturm_count(t, hi);
    const auto [glo, ghi] = gerschgorin(t);
    std::vector<double> out;
    for (std::size_t k = k0; k < k1; ++k) {
        const double ev = kth_eigenvalue(t, k, std::min(glo, lo) - 1.0, std::max(ghi, hi) + 1.0, 1e-12);
        if (ev > lo && ev < hi) out.push_back(ev);
    }
    return out;
}

/// Unit-norm eigenvector in the symmetrized variable v_i = sqrt(r_i) u_i (times sqrt(h)).
inline std::vector<double> eigenvector(const ChannelMatrix& c, double eigenvalue) {
    return eigenvector(c.matrix, eigenvalue);
}

/// Richardson extrapolation of an O(h^2) quantity from spacings h1 > h2.
inline double richardson(double e1, double e2, double h1, double h2) {
    const double rho2 = (h1 / h2) * (h1 / h2);
    return e2 + (e2 - e1) / (rho2 - 1.0);
}

/// Extrapolated oracle eigenvalues of mode m in (lo, hi) from a grid and its refinement.
/// Returns the fine-grid values when the two grids disagree on the count.
inline std::vector<double> oracle_eigenvalues(double B, double a, double alpha, int m,
                                              const OracleGrid& g, double lo, double hi) {
    const OracleGrid g2 = g.refined();
    const auto e1 = eigenvalues_between(build_channel_raw(B, a, alpha, m, g), lo, hi);
    const auto e2 = eigenvalues_between(build_channel_raw(B, a, alpha, m, g2), lo, hi);
    if (e1.size() != e2.size()) return e2;
    std::vector<double> out(e1.size());
    for (std::size_t i = 0; i < e1.size(); ++i) out[i] = richardson(e1[i], e2[i], g.h, g2.h);
    return out;
}

struct AuditEntry {
    int m = 0;
    std::vector<double> oracle;           // extrapolated eigenvalues in the gap
    std::optional<double> paper;          // PaperForm root
    std::optional<double> bs;             // BirmanSchwinger root
    std::optional<double> paper_diff;     // |paper - nearest oracle|
    std::optional<double> bs_diff;
    bool paper_match = false;
    bool bs_match = false;
    std::vector<double> mirror_oracle;    // channel -m in the same gap
    std::optional<double> mirror_diff;    // first eigenvalue of -m minus that of +m
};

struct AuditReport {
    Params params;
    Gap gap;
    double tolerance = 5e-3;
    double h = 0.0;
    double h_refined = 0.0;
    std::vector<AuditEntry> entries;

    /// "paper", "bs", "mixed" or "none": which form alone matches for every mode.
    std::string matching_form() const {
        bool all_paper = !entries.empty(), all_bs = !entries.empty();
        for (const auto& e : entries) {
            all_paper = all_paper && e.paper_match && !e.bs_match;
            all_bs = all_bs && e.bs_match && !e.paper_match;
        }
        if (all_paper) return "paper";
        if (all_bs) return "bs";
        for (const auto& e : entries)
            if (e.paper_match || e.bs_match) return "mixed";
        return "none";
    }
};

namespace detail {

inline std::optional<double> nearest_diff(const std::vector<double>& xs, double v) {
    std::optional<double> best;
    for (double x : xs) {
        const double d = std::fabs(x - v);
        if (!best || d < *best) best = d;
    }
    return best;
}

}  // namespace detail

/// Compare both scalar-condition roots with the oracle spectrum, mode by mode.
inline AuditReport channel_audit(const Params& p, const std::vector<int>& m_list, const Gap& gap,
                                 const WeylSettings& ws = {}, double tolerance = 5e-3) {
    p.validate();
    require_coupling(p.alpha);
    const int n_target = gap.n_gap == below_lowest_gap ? 0 : gap.n_gap + 1;
    const OracleGrid g = OracleGrid::standard(p, n_target);
    AuditReport rep;
    rep.params = p;
    rep.gap = gap;
    rep.tolerance = tolerance;
    rep.h = g.h;
    rep.h_refined = g.refined().h;
    for (int m : m_list) {
        AuditEntry e;
        e.m = m;
        e.oracle = oracle_eigenvalues(p.B, p.a, p.alpha, m, g, gap.lower, gap.upper);
        e.mirror_oracle = oracle_eigenvalues(p.B, p.a, p.alpha, -m, g, gap.lower, gap.upper);
        if (!e.oracle.empty() && !e.mirror_oracle.empty())
            e.mirror_diff = e.mirror_oracle.front() - e.oracle.front();
        if (auto r = solve_mode(p, m, gap, ScalarCondition::PaperForm, ws)) e.paper = r->E;
        if (auto r = solve_mode(p, m, gap, ScalarCondition::BirmanSchwinger, ws)) e.bs = r->E;
        if (e.paper) e.paper_diff = detail::nearest_diff(e.oracle, *e.paper);
        if (e.bs) e.bs_diff = detail::nearest_diff(e.oracle, *e.bs);
        e.paper_match = e.paper_diff && *e.paper_diff <= tolerance;
        e.bs_match = e.bs_diff && *e.bs_diff <= tolerance;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

struct SmallBPoint {
    double B = 0.0;
    std::optional<double> E;         // lowest eigenvalue below Lambda_0(B)
    std::optional<double> E_mirror;  // same with (B, m) -> (-B, -m)
};

struct SmallBTrack {
    double a = 0.0;
    double alpha = 0.0;
    int m = 0;
    std::optional<double> E0;        // B = 0 reference
    std::vector<SmallBPoint> points;
    double quadratic_coeff = 0.0;    // least squares of E(B) - E(0) on B^2
    double h = 0.0;
    double R_max = 0.0;

    /// Largest E(0) - E(B) over the track (<= 0 means E(B) >= E(0) everywhere).
    double worst_drop() const {
        double w = -std::numeric_limits<double>::infinity();
        for (const auto& pt : points)
            if (pt.E && E0) w = std::max(w, *E0 - *pt.E);
        return w;
    }
    double worst_mirror_gap() const {
        double w = 0.0;
        for (const auto& pt : points)
            if (pt.E && pt.E_mirror) w = std::max(w, std::fabs(*pt.E - *pt.E_mirror));
        return w;
    }
};

/// Lowest bound state of channel m as B -> 0 on one common grid.
inline SmallBTrack small_b_track(double a, double alpha, int m, const std::vector<double>& B_grid,
                                 double h_max = 0.005) {
    if (!(alpha < 0.0)) throw ConfigError("small_b_track needs alpha < 0");
    if (!(a > 0.0)) throw ConfigError("a must be positive");
    if (B_grid.empty()) throw ConfigError("B grid is empty");
    for (std::size_t i = 0; i < B_grid.size(); ++i) {
        if (!(B_grid[i] > 0.0)) throw ConfigError("B grid must be positive");
        if (i > 0 && !(B_grid[i] > B_grid[i - 1])) throw ConfigError("B grid must be ascending");
    }
    const double b_min = B_grid.front();
    const OracleGrid g = OracleGrid::for_spacing(a, std::min(h_max, a / 200.0),
                                                 a + 8.0 / std::sqrt(b_min));
    SmallBTrack out;
    out.a = a;
    out.alpha = alpha;
    out.m = m;
    out.h = g.h;
    out.R_max = g.R_max;

    auto lowest_below = [&](double B, int mm, double cut) -> std::optional<double> {
        const auto ev = eigenvalues_below(build_channel_raw(B, a, alpha, mm, g), cut, 1);
        if (ev.empty()) return std::nullopt;
        return ev.front();
    };
    out.E0 = lowest_below(0.0, m, 0.0);
    double num = 0.0, den = 0.0;
    for (double B : B_grid) {
        SmallBPoint pt;
        pt.B = B;
        pt.E = lowest_below(B, m, B);
        pt.E_mirror = lowest_below(-B, -m, B);
        if (pt.E && out.E0) {
            num += B * B * (*pt.E - *out.E0);
            den += B * B * B * B;
        }
        out.points.push_back(pt);
    }
    out.quadratic_coeff = den > 0.0 ? num / den : 0.0;
    return out;
}

}  // namespace lwall
