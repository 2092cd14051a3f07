#pragma once

// Test-only oracles, kept independent of the production special-function
// path: adaptive Simpson quadrature, the Kummer-U integral representation,
// and the Landau spectral sum with an exact integral remainder.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

template <typename F>
auto adaptive_simpson(F&& f, double a, double b, double tol, int depth = 28)
    -> decltype(f(a)) {
    using R = decltype(f(a));
    struct Rec {
        F& f;
        double tol0;
        R run(double a, double b, R fa, R fm, R fb, R whole, double tol, int d) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const R flm = f(lm), frm = f(rm);
            const R left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const R right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const R delta = left + right - whole;
            if (d <= 0 || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return run(a, m, fa, flm, fm, left, 0.5 * tol, d - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, d - 1);
        }
    };
    const double m = 0.5 * (a + b);
    const R fa = f(a), fm = f(m), fb = f(b);
    const R whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Rec rec{f, tol};
    return rec.run(a, b, fa, fm, fb, whole, tol, depth);
}

// U(a, b; rho) for real a in (0, 1), via the Laplace-type integral
// representation with the endpoint singularity removed by t = u^4.
inline double kummer_u_integral(double a, int b, double rho) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("oracle: need 0 < a < 1");
    const double umax = std::pow(46.0 / rho, 0.25);
    auto g = [&](double u) {
        const double t = u * u * u * u;
        return 4.0 * std::exp(-rho * t) * std::pow(u, 4.0 * a - 1.0) *
               std::pow(1.0 + t, static_cast<double>(b) - a - 1.0);
    };
    const double I = adaptive_simpson(g, 0.0, umax, 1e-14);
    return I / std::tgamma(a);
}

inline double laguerre(int n, double x) {
    double l0 = 1.0, l1 = 1.0 - x;
    if (n == 0) return l0;
    if (n == 1) return l1;
    for (int k = 2; k <= n; ++k) {
        const double l2 = ((2.0 * k - 1.0 - x) * l1 - (k - 1.0) * l0) / k;
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

// Plane resolvent kernel of (z - H0)^{-1} as the Landau spectral sum:
// the first numax+1 residue terms plus the exact remainder
//   sum_{nu>numax} L_nu(u)/(z - E_nu)
//     = -(1/B) int_0^1 s^{alpha-1} [G(s,u) - P(s,u)] ds,
// G the Laguerre generating function, P its degree-numax partial sum.
inline cplx resolvent_plane_spectral(double dx, double dy, cplx z, double B, int numax = 40) {
    const double s2 = dx * dx + dy * dy;
    const double u = 0.5 * B * s2;
    const cplx alpha = 0.5 - z / B;

    cplx head(0.0);
    for (int nu = 0; nu <= numax; ++nu)
        head += laguerre(nu, u) / (z - (nu + 0.5) * B);

    auto integrand = [&](double s) -> cplx {
        if (s <= 0.0) return cplx(0.0);
        double G;
        if (s >= 1.0 - 1e-14) G = 0.0;
        else G = std::exp(-u * s / (1.0 - s)) / (1.0 - s);
        double P = 0.0, l0 = 1.0, l1 = 1.0 - u, pw = 1.0;
        P += l0;
        if (numax >= 1) { pw *= s; P += l1 * pw; }
        for (int nu = 2; nu <= numax; ++nu) {
            const double l2 = ((2.0 * nu - 1.0 - u) * l1 - (nu - 1.0) * l0) / nu;
            l0 = l1; l1 = l2;
            pw *= s;
            P += l2 * pw;
        }
        return std::exp((alpha - 1.0) * std::log(s)) * (G - P);
    };
    const double scut = std::max(0.5, 1.0 - u / 50.0);
    cplx tail = adaptive_simpson(integrand, 0.0, scut, 1e-13);
    tail += adaptive_simpson(integrand, scut, 1.0 - 1e-12, 1e-13);
    head += -(1.0 / B) * tail;

    const double phase_re = 0.0;  // caller applies the gauge phase
    (void)phase_re;
    return (B / (2.0 * 3.14159265358979323846)) * std::exp(-0.5 * u) * head;
}

} // namespace oracle
