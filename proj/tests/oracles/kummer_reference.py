#!/usr/bin/env python3
"""Reference values for the diagonal Weyl coefficient from the closed-form
channel Green's function.

For m >= 0 the radial channel solutions are r^m e^{-xi/2} M(s, m+1, xi) and
r^m e^{-xi/2} U(s, m+1, xi) with xi = B r^2 / 2 and s = 1/2 - z/(2B).  Their
Wronskian gives

    mu_m(z) = (a/2) * Gamma(s)/m! * x^m e^{-x} * M(s, m+1, x) * U(s, m+1, x)

with x = B a^2 / 2.  This route shares nothing with the library (no Laguerre
series, no Hardy-Hille kernel) and is evaluated at 40 digits.

Usage: python3 kummer_reference.py   (prints C++ initializer rows)
"""
import mpmath as mp

mp.mp.dps = 40


def mu(B, a, m, z):
    B, a, z = mp.mpf(B), mp.mpf(a), mp.mpc(z) if isinstance(z, complex) else mp.mpf(z)
    m = abs(m)
    x = B * a * a / 2
    s = mp.mpf(1) / 2 - z / (2 * B)
    return (a / 2) * mp.gamma(s) / mp.factorial(m) * x**m * mp.e**(-x) \
        * mp.hyp1f1(s, m + 1, x) * mp.hyperu(s, m + 1, x)


def mu_at_offset(B, a, m, level, delta):
    """mu at E = B(2 level + 1) + delta, evaluated without rounding E."""
    return mu(B, a, m, mp.mpf(B) * (2 * level + 1) + mp.mpf(delta))


def shift_root(B, a, alpha, m, level, form):
    """Root offset delta of the scalar condition next to `level`."""
    if form == "paper":
        f = lambda d: alpha - mu_at_offset(B, a, m, level, d)
    else:
        f = lambda d: 1 + alpha * mu_at_offset(B, a, m, level, d)
    x = mp.mpf(B) * a * a / 2
    c = a * B * mp.e**(-x) * x**m / mp.factorial(m)
    guess = c / abs(alpha)
    return mp.findroot(f, (guess * 0.5, guess * 1.5), solver="anderson")


if __name__ == "__main__":
    pts = [
        (1.0, 1.0, 0, 0.0), (1.0, 1.1, 0, 0.0), (1.0, 1.1, 0, 2.0),
        (1.0, 1.1, 1, 2.0), (1.0, 1.1, 5, 2.0), (1.0, 1.1, 3, -3.0),
        (1.0, 1.1, 0, 4.5), (2.5, 0.7, 2, 11.0), (1.0, 3.0, 4, 1.7),
        (1.0, 1.1, 30, 2.2), (1.0, 1.1, 0, -1.0e6), (0.3, 2.0, 7, 0.1),
    ]
    print("// {B, a, m, E, mu}")
    for B, a, m, E in pts:
        print("{%r, %r, %d, %r, %s}," % (B, a, m, E, mp.nstr(mu(B, a, m, E), 20)))
    print("// complex: {B, a, m, E, eta, re, im}")
    for B, a, m, E, eta in [(1.0, 1.0, 0, 2.0, 0.1), (1.0, 1.1, 3, 0.5, 1.0), (2.0, 0.8, 1, 6.5, 0.01)]:
        v = mu(B, a, m, complex(E, eta))
        print("{%r, %r, %d, %r, %r, %s, %s}," % (B, a, m, E, eta, mp.nstr(v.real, 20), mp.nstr(v.imag, 20)))
    print("// paper-form shifts at B=1, a=1.1, alpha=-1, level 0: {m, delta, ratio}")
    x = mp.mpf("1.21") / 2
    for m in (12, 20):
        d = shift_root(1.0, mp.mpf("1.1"), -1, m, 0, "paper")
        c = mp.mpf("1.1") * mp.e**(-x) * x**m / mp.factorial(m)
        print("{%d, %s, %s}," % (m, mp.nstr(d, 20), mp.nstr(d / c, 12)))
    print("// h_{0,m}(Lambda_0) at B=1, a=1.1: {m, h}")
    for m in (1, 10, 20, 60):
        # h(d) = h + O(d); two offsets and a linear extrapolation. Offsets much
        # below 1e-20 lose digits to cancellation inside hyperu.
        with mp.workdps(60):
            a = mp.mpf(11) / 10
            xx = a * a / 2
            c = a * mp.e**(-xx) * xx**m / mp.factorial(m)
            d = mp.mpf("1e-15")
            h1 = mu_at_offset(1, a, m, 0, d) + c / d
            h2 = mu_at_offset(1, a, m, 0, 2 * d) + c / (2 * d)
            h = 2 * h1 - h2
        print("{%d, %s}," % (m, mp.nstr(h, 20)))
