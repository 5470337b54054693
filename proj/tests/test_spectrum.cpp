#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "lwall/spectrum.hpp"
#include "reference_values.hpp"

using namespace lwall;

namespace {

constexpr auto Paper = ScalarCondition::PaperForm;
constexpr auto BS = ScalarCondition::BirmanSchwinger;

// plain bisection on the condition with absolute energies
double bisect(const Params& p, int m, ScalarCondition cond, double lo, double hi) {
    const auto f = [&](double E) { return condition_value(p.alpha, cond, mu(p, m, E).value); };
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::fabs(hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// number of sign changes of the condition on a grid inside (lo, hi)
int sign_changes(const Params& p, int m, ScalarCondition cond, double lo, double hi, int samples) {
    int changes = 0;
    double prev = 0.0;
    for (int i = 1; i < samples; ++i) {
        const double E = lo + (hi - lo) * i / samples;
        const double v = condition_value(p.alpha, cond, mu(p, m, E).value);
        if (i > 1 && (v > 0) != (prev > 0)) ++changes;
        prev = v;
    }
    return changes;
}

}  // namespace

TEST(Solve, PaperFormGroundGap) {
    const Params p{1.0, 1.1, -1.0};
    const auto r = solve_mode(p, 0, Gap::between(1.0, 0), Paper);
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(r->E, 1.0);
    EXPECT_LT(r->E, 3.0);
    EXPECT_NEAR(r->E, bisect(p, 0, Paper, 1.0 + 1e-9, 3.0 - 1e-9), 1e-10 * r->E);
    EXPECT_NEAR(r->E, 1.49602341826115, 1e-12);
    EXPECT_EQ(r->n_gap, 0);
    EXPECT_EQ(r->multiplicity, 1);
    EXPECT_LE(std::fabs(r->residual), 1e-8);
    EXPECT_EQ(r->condition, Paper);
}

TEST(Solve, BirmanSchwingerNearUpperEdge) {
    const Params p{1.0, 1.1, -1.0};
    const auto r = solve_mode(p, 0, Gap::between(1.0, 0), BS);
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(r->E, 2.0);
    EXPECT_LT(r->E, 3.0);
    EXPECT_EQ(r->anchor, 1);
    EXPECT_LT(r->shift, 0.0);
    EXPECT_NEAR(r->E, bisect(p, 0, BS, 1.0 + 1e-9, 3.0 - 1e-9), 1e-10 * r->E);
    EXPECT_NEAR(r->E, 2.91834216905784, 1e-12);
    EXPECT_LE(std::fabs(r->residual), 1e-8);
}

TEST(Solve, PerturbedBracketsAgree) {
    const Params p{1.0, 1.1, -1.0};
    const auto base = solve_mode(p, 0, Gap::between(1.0, 0), Paper);
    ASSERT_TRUE(base);
    for (double split : {0.1, 0.3, 0.77, 0.95})
        for (double scale : {1.0, 0.37, 1e-3}) {
            const auto r = solve_mode(p, 0, Gap::between(1.0, 0), Paper, {}, {1e-10, split, scale});
            ASSERT_TRUE(r) << split << ' ' << scale;
            EXPECT_NEAR(r->E, base->E, 1e-10 * base->E);
        }
}

TEST(Solve, UniquenessOnRandomSample) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dB(0.5, 2.0), da(0.5, 2.5), dal(-3.0, 3.0), us(0.05, 0.95),
        ul(0.01, 1.0);
    std::uniform_int_distribution<int> dm(-8, 8), dn(0, 3), dc(0, 1);
    int with_roots = 0;
    for (int trial = 0; trial < 400 && with_roots < 200; ++trial) {
        Params p{dB(rng), da(rng), dal(rng)};
        if (std::fabs(p.alpha) < 0.05) continue;
        const int m = dm(rng), n = dn(rng);
        const auto cond = dc(rng) ? Paper : BS;
        const Gap gap = Gap::between(p.B, n);
        const auto base = solve_mode(p, m, gap, cond);
        if (!base) continue;
        ++with_roots;
        EXPECT_GT(base->E, gap.lower);
        EXPECT_LT(base->E, gap.upper);
        EXPECT_LE(std::fabs(base->residual), 1e-8 * std::max(1.0, std::fabs(p.alpha)));
        for (int k = 0; k < 2; ++k) {
            const auto r = solve_mode(p, m, gap, cond, {}, {1e-10, us(rng), ul(rng)});
            ASSERT_TRUE(r);
            EXPECT_NEAR(r->E, base->E, 1e-10 * std::fabs(base->E));
        }
    }
    EXPECT_EQ(with_roots, 200);
}

TEST(Solve, SingleSignChangePerGap) {
    const Params p{1.0, 1.1, -1.0};
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 2; ++n)
            for (auto cond : {Paper, BS}) {
                const double lo = landau_level(1.0, n), hi = landau_level(1.0, n + 1);
                const int changes = sign_changes(p, m, cond, lo, hi, 400);
                const auto r = solve_mode(p, m, Gap::between(1.0, n), cond);
                // a pole is not a sign change of the finite condition between grid points
                EXPECT_LE(changes, 1) << m << ' ' << n;
                if (changes == 1) {
                    EXPECT_TRUE(r.has_value()) << m << ' ' << n;
                }
            }
}

TEST(Solve, ModeSymmetryBitExact) {
    const Params p{1.0, 1.1, -1.0};
    for (int m = 1; m <= 10; ++m)
        for (auto cond : {Paper, BS}) {
            const auto a = solve_mode(p, m, Gap::between(1.0, 0), cond);
            const auto b = solve_mode(p, -m, Gap::between(1.0, 0), cond);
            ASSERT_EQ(a.has_value(), b.has_value());
            if (a) {
                EXPECT_EQ(a->E, b->E);
                EXPECT_EQ(a->shift, b->shift);
            }
        }
}

TEST(Solve, HalfLineRangeAtSpecialRadius) {
    // c_{1,0} = 0 at a = sqrt 2: mu stays bounded at the upper edge of (1, 3)
    const Params base{1.0, std::sqrt(2.0), 0.1};
    ASSERT_TRUE(boundary_coeff_vanishes(1.0, base.a, 1, 0));
    const double limit = h_remainder(base, 0, 1, Energy::near_level(1, 0.0)).value;
    ASSERT_GT(limit, 0.0);
    Params above = base, below = base;
    above.alpha = limit + 0.05;
    below.alpha = limit - 0.05;
    EXPECT_FALSE(solve_mode(above, 0, Gap::between(1.0, 0), Paper).has_value());
    const auto r = solve_mode(below, 0, Gap::between(1.0, 0), Paper);
    ASSERT_TRUE(r.has_value());
    EXPECT_GT(r->E, 1.0);
    EXPECT_LT(r->E, 3.0);
}

TEST(Solve, ZeroCouplingRejected) {
    const Params p{1.0, 1.1, 0.0};
    EXPECT_THROW(solve_mode(p, 0, Gap::between(1.0, 0), Paper), ConfigError);
    EXPECT_THROW(cluster(p, 0, Paper), ConfigError);
    EXPECT_THROW(predicted_shift(p, 0, 0), ConfigError);
    EXPECT_THROW(below_lowest(p, BS), ConfigError);
}

TEST(Solve, BadOptionsRejected) {
    const Params p{1.0, 1.1, -1.0};
    EXPECT_THROW(solve_mode(p, 0, Gap::between(1.0, 0), Paper, {}, {1e-10, 1.5, 1.0}), ConfigError);
    EXPECT_THROW(solve_mode(p, 0, Gap::between(1.0, 0), Paper, {}, {0.0, 0.5, 1.0}), ConfigError);
    EXPECT_THROW(Gap::below_lowest(1.0, 2.0), ConfigError);
}

TEST(Cluster, PaperFormAboveGroundLevel) {
    const Params p{1.0, 1.1, -1.0};
    const auto recs = cluster(p, 0, Paper);
    ASSERT_GT(recs.size(), 10u);
    for (const auto& r : recs) {
        EXPECT_GT(r.shift, 0.0) << r.m;
        EXPECT_EQ(r.anchor, 0);
        EXPECT_EQ(r.multiplicity, r.m == 0 ? 1 : 2);
        EXPECT_LE(std::fabs(r.residual), 1e-8);
    }
    for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_GE(recs[i - 1].shift, recs[i].shift);
    // sorted order coincides with increasing m once c_{0,m} dominates
    for (std::size_t i = 3; i < recs.size(); ++i) EXPECT_GT(recs[i].m, recs[i - 1].m);
    EXPECT_GE(std::fabs(recs.back().shift), 1e-13);
}

TEST(Cluster, ShiftRatioMatchesOracle) {
    const Params p{1.0, 1.1, -1.0};
    for (const auto& s : ref::paper_shifts) {
        const auto r = solve_mode(p, s.m, Gap::between(1.0, 0), Paper);
        ASSERT_TRUE(r);
        EXPECT_NEAR(r->shift / s.delta, 1.0, 1e-9) << s.m;
        EXPECT_NEAR(r->shift / r->predicted_shift, s.ratio, 1e-9) << s.m;
    }
    const auto r20 = solve_mode(p, 20, Gap::between(1.0, 0), Paper);
    EXPECT_LE(std::fabs(r20->shift / r20->predicted_shift - 1.0), 0.05);
}

TEST(Cluster, PositiveCouplingHasNoGroundCluster) {
    EXPECT_TRUE(cluster(Params{1.0, 1.1, 1.0}, 0, Paper).empty());
    const auto upper = cluster(Params{1.0, 1.1, 1.0}, 1, Paper, {}, {0.0, 30});
    ASSERT_FALSE(upper.empty());
    for (const auto& r : upper) EXPECT_LT(r.shift, 0.0);
}

TEST(Cluster, BirmanSchwingerSide) {
    // 1 + alpha mu = 0 puts the alpha < 0 cluster below Lambda_n
    const auto recs = cluster(Params{1.0, 1.1, -1.0}, 1, BS, {}, {0.0, 30});
    ASSERT_FALSE(recs.empty());
    for (const auto& r : recs) {
        EXPECT_LT(r.shift, 0.0);
        EXPECT_NEAR(r.shift / r.predicted_shift, 1.0, 0.5) << r.m;
    }
}

TEST(Cluster, IndependentOfOptions) {
    const Params p{1.0, 1.1, -1.0};
    const auto a = cluster(p, 0, Paper, {}, {0.0, 25});
    const auto b = cluster(p, 0, Paper, {}, {0.0, 25}, {1e-10, 0.8, 0.5});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].m, b[i].m);
        EXPECT_NEAR(a[i].shift / b[i].shift, 1.0, 1e-9);
    }
}

TEST(PredictedShift, Examples) {
    EXPECT_NEAR(predicted_shift(Params{1.0, 1.0, -1.0}, 0, 0), 0.6065306597126334, 1e-15);
    EXPECT_GT(predicted_shift(Params{1.0, 1.1, -2.0}, 1, 3), 0.0);
    EXPECT_LT(predicted_shift(Params{1.0, 1.1, 2.0}, 1, 3), 0.0);
    EXPECT_NEAR(predicted_shift(Params{1.0, 1.1, -2.0}, 0, 2),
                boundary_coeff(1.0, 1.1, 0, 2).to_real() / 2.0, 1e-16);
    // Birman-Schwinger form: shift = alpha c
    EXPECT_NEAR(predicted_shift(Params{1.0, 1.1, -2.0}, 0, 2, BS),
                -2.0 * boundary_coeff(1.0, 1.1, 0, 2).to_real(), 1e-16);
    EXPECT_EQ(predicted_shift(Params{1.0, 0.1, -1.0}, 0, 400), 0.0);
}

TEST(SpecialRadii, Examples) {
    const auto r1 = special_radii(1.0, 1, 0);
    ASSERT_EQ(r1.size(), 1u);
    EXPECT_NEAR(r1[0], std::sqrt(2.0), 1e-13);
    EXPECT_LE(boundary_coeff(1.0, r1[0], 1, 0).to_real(), 1e-13);
    const auto r2 = special_radii(2.0, 1, 0);
    ASSERT_EQ(r2.size(), 1u);
    EXPECT_NEAR(r2[0], 1.0, 1e-13);
    const auto r3 = special_radii(1.0, 2, 0);
    ASSERT_EQ(r3.size(), 2u);
    EXPECT_NEAR(r3[0], std::sqrt(2.0 * (2.0 - std::sqrt(2.0))), 1e-13);
    EXPECT_NEAR(r3[1], std::sqrt(2.0 * (2.0 + std::sqrt(2.0))), 1e-13);
    EXPECT_TRUE(special_radii(1.0, 0, 3).empty());
}

TEST(SpecialRadii, CoefficientCollapses) {
    for (int n = 1; n <= 5; ++n)
        for (int m : {0, 2, -5}) {
            const auto radii = special_radii(1.3, n, m);
            EXPECT_LE(static_cast<int>(radii.size()), n);
            for (double a : radii) {
                const double c = boundary_coeff(1.3, a, n, m).to_real();
                const double neighbours = std::max(boundary_coeff(1.3, a, n, std::abs(m) + 1).to_real(),
                                                   boundary_coeff(1.3, a, n, std::abs(m) + 2).to_real());
                EXPECT_LE(c, 1e-13 * neighbours) << n << ' ' << m << ' ' << a;
            }
        }
}

TEST(EmbeddedKernel, Examples) {
    EXPECT_EQ(embedded_kernel_dim(1.0, 1.0, 0), 0);
    EXPECT_EQ(embedded_kernel_dim(1.0, std::sqrt(2.0), 1), 1);
    EXPECT_EQ(embedded_kernel_dim(1.0, 2.0, 1), 2);
    EXPECT_EQ(embedded_kernel_dim(1.0, 1.1, 1), 0);
}

TEST(EmbeddedKernel, BoundedByTwiceLevel) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dB(0.2, 4.0), da(0.2, 4.0);
    std::uniform_int_distribution<int> dn(0, 4);
    for (int i = 0; i < 100; ++i) {
        const double B = dB(rng), a = da(rng);
        const int n = dn(rng);
        const int dim = embedded_kernel_dim(B, a, n);
        EXPECT_LE(dim, 2 * n);
        if (n == 0) {
            EXPECT_EQ(dim, 0);
        }
    }
    // special radii switch the count on
    for (int n = 1; n <= 4; ++n)
        for (double a : special_radii(1.0, n, 1)) EXPECT_GE(embedded_kernel_dim(1.0, a, n), 2) << n;
}

TEST(BelowLowest, Examples) {
    EXPECT_TRUE(below_lowest(Params{1.0, 1.1, -1.0}, Paper).empty());
    EXPECT_TRUE(below_lowest(Params{1.0, 1.1, 0.5}, BS).empty());
    const auto recs = below_lowest(Params{1.0, 1.1, -1.0}, BS);
    // mu runs over (0, inf) below Lambda_0 in every channel: one root per mode
    ASSERT_EQ(recs.size(), 51u);
    for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].m, static_cast<int>(i));
    EXPECT_EQ(recs[0].m, 0);
    EXPECT_EQ(recs[0].n_gap, below_lowest_gap);
    EXPECT_LT(recs[0].E, 1.0);
    const Params p{1.0, 1.1, -1.0};
    EXPECT_NEAR(recs[0].E, bisect(p, 0, BS, lowest_search_floor(p), 1.0 - 1e-9), 1e-10);
    EXPECT_NEAR(recs[0].E, 0.274138807326, 1e-10);
}

TEST(BelowLowest, PaperFormPositiveCoupling) {
    // alpha in the range (0, inf) of mu below Lambda_0
    const auto recs = below_lowest(Params{1.0, 1.1, 0.5}, Paper, {}, 5);
    ASSERT_FALSE(recs.empty());
    for (const auto& r : recs) {
        EXPECT_LT(r.E, 1.0);
        EXPECT_LE(std::fabs(r.residual), 1e-8);
    }
}

TEST(Profile, ContinuousAtWall) {
    const Params p{1.0, 1.1, -1.0};
    const auto r = solve_mode(p, 0, Gap::between(1.0, 0), BS);
    ASSERT_TRUE(r);
    const Energy E = Energy::near_level(r->anchor, r->shift);
    double peak = 0.0;
    for (double s = 0.05; s < 6.0; s += 0.05) peak = std::max(peak, std::fabs(bound_state_radial(p, 0, E, s)));
    const double jump = std::fabs(bound_state_radial(p, 0, E, p.a + 1e-8) - bound_state_radial(p, 0, E, p.a - 1e-8));
    EXPECT_LE(jump, 1e-6 * peak);
}

TEST(Profile, DerivativeJumpAtBirmanSchwingerRoot) {
    for (int m : {0, 1, 2}) {
        const Params p{1.0, 1.1, -1.0};
        const auto r = solve_mode(p, m, Gap::between(1.0, 0), BS);
        ASSERT_TRUE(r);
        const Energy E = Energy::near_level(r->anchor, r->shift);
        const auto w = [&](double s) { return bound_state_radial(p, m, E, s); };
        const double h = 1e-4, a = p.a;
        const double right = (-3 * w(a) + 4 * w(a + h) - w(a + 2 * h)) / (2 * h);
        const double left = (3 * w(a) - 4 * w(a - h) + w(a - 2 * h)) / (2 * h);
        EXPECT_NEAR((right - left) / (p.alpha * w(a)), 1.0, 1e-3) << m;
    }
}

TEST(Profile, LocalizedAtWallForStrongCoupling) {
    const Params p{1.0, std::sqrt(3.0), -3.0};
    const auto recs = below_lowest(p, BS, {}, 1);
    ASSERT_EQ(recs.size(), 2u);
    const auto& r = recs[1];
    ASSERT_EQ(r.m, 1);
    const Energy E = Energy::near_level(r.anchor, r.shift);
    double best_r = 0.0, best = -1.0;
    for (double s = 0.01; s < 6.0; s += 0.01) {
        const double v = std::fabs(bound_state_radial(p, 1, E, s));
        if (v > best) {
            best = v;
            best_r = s;
        }
    }
    EXPECT_NEAR(best_r, p.a, 0.15);
}

TEST(Profile, NormalizationMatchesQuadrature) {
    using boost::math::quadrature::gauss_kronrod;
    const Params p{1.0, 1.1, -1.0};
    for (int m : {0, 2}) {
        const auto r = solve_mode(p, m, Gap::between(1.0, 0), BS);
        ASSERT_TRUE(r);
        const Energy E = Energy::near_level(r->anchor, r->shift);
        const double k = profile_normalization(p, m, E);
        const auto dens = [&](double s) {
            const double w = k * bound_state_radial(p, m, E, s);
            return 2.0 * std::numbers::pi * s * w * w;
        };
        double total = 0.0;
        // kink at a, decay well inside r = 10
        const double cuts[] = {0.0, p.a, 3.0, 6.0, 10.0};
        for (int i = 0; i < 4; ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]), half = 0.5 * (cuts[i + 1] - cuts[i]);
            total += gauss_kronrod<double, 31>::integrate([&](double y) { return half * dens(mid + half * y); },
                                                          -1.0, 1.0, 6, 1e-9);
        }
        EXPECT_NEAR(total, 1.0, 1e-6) << m;
        EXPECT_GT(k * bound_state_radial(p, m, E, p.a), 0.0);
    }
}
