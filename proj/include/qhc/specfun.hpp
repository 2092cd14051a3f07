#pragma once

#include <complex>
#include <vector>
#include <stdexcept>

namespace qhc::sf {

using cplx = std::complex<double>;

struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};

// Euler Gamma, Lanczos rational approximation with reflection.
// Relative accuracy ~1e-13 for |w| <= 50 away from the nonpositive integers.
cplx gamma_fn(cplx w);

cplx digamma(cplx w);

// Tricomi U(a, b; rho) for integer b in {1, 2}, rho > 0. Logarithmic series
// for rho <= 20, asymptotic expansion with optimal truncation beyond.
// Nonpositive-integer a reduces to the Laguerre-type polynomial.
cplx kummer_u(cplx a, int b, double rho);

// d/drho U(a, 1; rho) computed as U(a,1;rho) - U(a,2;rho).
cplx kummer_u_drho(cplx a, double rho);

// Gamma(a) * U(a, b; rho) evaluated without forming Gamma(a) alone, so the
// product stays finite-and-stable near the poles of Gamma (the Landau levels
// enter resolvent kernels only through this combination).
cplx gamma_times_u(cplx a, int b, double rho);

struct Point {
    double x = 0.0, y = 0.0;
};

// Resolvent kernel of (z - H0)^{-1} on the infinite plane,
//   -(1/2pi) Gamma(a_z) U(a_z, 1; B|dx|^2/2) e^{-B|dx|^2/4} M(x, x'),
// a_z = 1/2 - z/B, M = exp(i B (x+x')(y-y')/2).
cplx resolvent_kernel_plane(Point a, Point b, cplx z, double B);
cplx resolvent_kernel_plane_dx(Point a, Point b, cplx z, double B);

// Periodized kernels on the cylinder of circumference L (image sums).
cplx resolvent_kernel_cylinder(Point a, Point b, cplx z, double B, double L);
cplx resolvent_kernel_cylinder_dx(Point a, Point b, cplx z, double B, double L);

// Lowest-Landau-level projector kernel, plane and cylinder.
cplx landau_projector_kernel_plane(Point a, Point b, double B);
cplx landau_projector_kernel(Point a, Point b, double B, double L);

// ---- Lemma-3 style decay certificates ----
//
// |d^n/dx^n R0(x, x'; z)| <= Cn * B^{1+n/2} / dist(z, sigma(H0)) * e^{-B(x-x')^2/8}
// for B(x-x')^2/2 > 1, Re z in (B/2, 3B/2), |Im z| <= 1. The numerical
// prefactors Cn were frozen from a calibration sweep (max observed ratio
// times 1.5); certify_* evaluates fresh points against the frozen bound.

extern const double kLemma3C0;
extern const double kLemma3C1;

struct KernelCertificate {
    Point xa, xb;
    cplx z;
    int order = 0;          // derivative order n in {0, 1}
    cplx kernel{};
    double bound = 0.0;
    bool pass = false;
};

double dist_to_landau(cplx z, double B);
double lemma3_bound(Point a, Point b, cplx z, double B, int order);

KernelCertificate certify_lemma3_point(Point a, Point b, cplx z, double B, double L, int order);

// Max over a deterministic sweep of |kernel| * e^{+B(x-x')^2/8} * dist / B^{1+n/2};
// the frozen constants must dominate this (the calibration protocol).
double lemma3_ratio_sweep_max(int order, double B, double L, int n_samples, unsigned seed);

} // namespace qhc::sf
