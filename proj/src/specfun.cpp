#include "qhc/specfun.hpp"
#include "qhc/rng.hpp"

#include <cmath>
#include <algorithm>

namespace qhc::sf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286060651209;

bool near_nonpositive_integer(cplx w, double tol, long& n_out) {
    if (std::abs(w.imag()) > tol) return false;
    double r = std::round(w.real());
    if (r > 0.5) return false;
    if (std::abs(w.real() - r) > tol) return false;
    n_out = static_cast<long>(-r);
    return true;
}

// Lanczos g = 7, 9 coefficients (Godfrey's table).
const double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

cplx gamma_core(cplx w) {
    // requires Re w >= 0.5
    w -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (w + static_cast<double>(i));
    cplx t = w + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, w + 0.5) * std::exp(-t) * x;
}

} // namespace

cplx gamma_fn(cplx w) {
    long n;
    if (near_nonpositive_integer(w, 1e-12, n))
        throw PoleError("gamma_fn: pole at nonpositive integer");
    if (w.real() < 0.5) {
        // reflection
        return kPi / (std::sin(kPi * w) * gamma_core(1.0 - w));
    }
    return gamma_core(w);
}

cplx digamma(cplx w) {
    // push to Re w >= 12 by recurrence, then Stirling tail
    cplx s(0.0);
    while (w.real() < 12.0) {
        s -= 1.0 / w;
        w += 1.0;
    }
    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    // psi(w) ~ ln w - 1/(2w) - sum B_{2n}/(2n w^{2n})
    static const double b[] = {1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
                               1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0};
    cplx tail(0.0);
    cplx p = inv2;
    for (double bk : b) {
        tail += bk * p;
        p *= inv2;
    }
    return s + std::log(w) - 0.5 * inv - tail;
}

namespace {

// U(-n, b; z) for nonnegative integer n: terminating (Laguerre-type) sum
cplx kummer_u_poly(long n, int b, double z) {
    // U(-n,b,z) = (-1)^n sum_{k=0..n} C(n,k) (b+k)_{n-k} (-z)^k
    cplx total(0.0);
    double binom = 1.0;
    for (long k = 0; k <= n; ++k) {
        double poch = 1.0;
        for (long j = 0; j < n - k; ++j) poch *= (b + k + j);
        total += binom * poch * std::pow(-z, static_cast<double>(k));
        binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    return ((n % 2) ? -1.0 : 1.0) * total;
}

// log-series pieces: S1 = ln z * M(a,1,z) + sum_k (a)_k/(k!)^2 z^k (psi(a+k) - 2 psi(1+k))
// (Gamma(a) U(a,1,z) = -S1)
cplx series_s(cplx a, int b, double z) {
    const double lg = std::log(z);
    cplx S(0.0);
    cplx poch(1.0);          // (a)_k z^k
    double kfac_b = 1.0;     // k! (b)_k
    cplx psi_a = digamma(a); // psi(a+k), advanced by recurrence
    double psi1 = -kEulerGamma;              // psi(1+k)
    double psi2 = 1.0 - kEulerGamma;         // psi(2+k)
    for (int k = 0;; ++k) {
        const cplx weight = (b == 1) ? (psi_a - 2.0 * psi1) : (psi_a - psi1 - psi2);
        const cplx term = (poch / kfac_b) * weight;
        S += term;
        if (k > 4 && k > z && std::abs(term) < 1e-17 * (1.0 + std::abs(S))) break;
        if (k > 600) break;
        poch *= (a + static_cast<double>(k)) * z;
        kfac_b *= (k + 1.0) * ((b == 1) ? (k + 1.0) : (k + 2.0));
        psi_a += 1.0 / (a + static_cast<double>(k));
        psi1 += 1.0 / (k + 1.0);
        psi2 += 1.0 / (k + 2.0);
    }
    cplx M(1.0), t(1.0);
    for (int k = 1; k < 700; ++k) {
        t *= (a + static_cast<double>(k - 1)) * z / (static_cast<double>(k) * (b + k - 1.0));
        M += t;
        if (k > 4 && k > z && std::abs(t) < 1e-17 * std::abs(M)) break;
    }
    return lg * M + S;
}

// asymptotic expansion with optimal truncation: U ~ rho^{-a} sum_s (a)_s (a-b+1)_s / (s! (-rho)^s)
cplx kummer_u_asymptotic(cplx a, int b, double rho) {
    cplx sum(1.0), term(1.0);
    double best = 1e300;
    for (int s = 1; s < 300; ++s) {
        term *= (a + static_cast<double>(s - 1)) * (a - static_cast<double>(b) + static_cast<double>(s)) /
                (static_cast<double>(s) * (-rho));
        double m = std::abs(term);
        if (m > best) break; // divergent tail reached
        best = m;
        sum += term;
        if (m < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(cplx(rho), -a) * sum;
}

constexpr double kSeriesAsymSwitch = 20.0;

} // namespace

cplx kummer_u(cplx a, int b, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("kummer_u: rho must be positive");
    if (b != 1 && b != 2) throw std::domain_error("kummer_u: b must be 1 or 2");
    long n;
    if (near_nonpositive_integer(a, 1e-9, n)) return kummer_u_poly(n, b, rho);
    if (rho > kSeriesAsymSwitch) return kummer_u_asymptotic(a, b, rho);
    if (b == 1) return -series_s(a, 1, rho) / gamma_fn(a);
    return series_s(a, 2, rho) / gamma_fn(a - 1.0) + 1.0 / (gamma_fn(a) * rho);
}

cplx kummer_u_drho(cplx a, double rho) {
    return kummer_u(a, 1, rho) - kummer_u(a, 2, rho);
}

cplx gamma_times_u(cplx a, int b, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("gamma_times_u: rho must be positive");
    long n;
    if (near_nonpositive_integer(a, 1e-12, n))
        throw PoleError("gamma_times_u: Gamma pole at nonpositive integer a");
    if (rho > kSeriesAsymSwitch) return gamma_fn(a) * kummer_u_asymptotic(a, b, rho);
    if (b == 1) return -series_s(a, 1, rho);
    // Gamma(a)/Gamma(a-1) = a-1
    return (a - 1.0) * series_s(a, 2, rho) + 1.0 / rho;
}

// ---------------- kernels ----------------

namespace {

inline cplx landau_phase(Point a, Point b, double B) {
    return std::exp(cplx(0.0, 0.5 * B * (a.x + b.x) * (a.y - b.y)));
}

} // namespace

double dist_to_landau(cplx z, double B) {
    const double v = std::round(z.real() / B - 0.5);
    double best = 1e300;
    for (double n = std::max(0.0, v - 1.0); n <= v + 1.0; ++n)
        best = std::min(best, std::abs(z - cplx((n + 0.5) * B)));
    best = std::min(best, std::abs(z - cplx(0.5 * B)));
    return best;
}

cplx resolvent_kernel_plane(Point a, Point b, cplx z, double B) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    const double s = dx * dx + dy * dy;
    if (s < 1e-28) throw std::domain_error("resolvent kernel: coincident points");
    const cplx alpha = 0.5 - z / B;
    const cplx gu = gamma_times_u(alpha, 1, 0.5 * B * s);
    return -(1.0 / (2.0 * kPi)) * gu * std::exp(-0.25 * B * s) * landau_phase(a, b, B);
}

cplx resolvent_kernel_plane_dx(Point a, Point b, cplx z, double B) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    const double s = dx * dx + dy * dy;
    if (s < 1e-28) throw std::domain_error("resolvent kernel: coincident points");
    const cplx alpha = 0.5 - z / B;
    const cplx r0 = resolvent_kernel_plane(a, b, z, B);
    const cplx gu2 = gamma_times_u(alpha, 2, 0.5 * B * s);
    const cplx second = -(1.0 / (2.0 * kPi)) * gu2 * std::exp(-0.25 * B * s) * landau_phase(a, b, B);
    return 0.5 * B * cplx(dx, dy) * r0 - B * dx * second;
}

namespace {

template <typename F>
cplx image_sum(Point a, Point b, double L, F&& plane_term) {
    // m = 0 first, then +-1, +-2, ... until two consecutive shells are negligible
    cplx total = plane_term(a, b);
    int quiet = 0;
    for (int m = 1; m <= 64 && quiet < 2; ++m) {
        Point ap = a, am = a;
        ap.y = a.y - m * L;
        am.y = a.y + m * L;
        cplx t = plane_term(ap, b) + plane_term(am, b);
        total += t;
        if (std::abs(t) < 1e-15 * (std::abs(total) + 1e-300)) ++quiet;
        else quiet = 0;
    }
    return total;
}

} // namespace

cplx resolvent_kernel_cylinder(Point a, Point b, cplx z, double B, double L) {
    return image_sum(a, b, L, [&](Point p, Point q) { return resolvent_kernel_plane(p, q, z, B); });
}

cplx resolvent_kernel_cylinder_dx(Point a, Point b, cplx z, double B, double L) {
    return image_sum(a, b, L,
                     [&](Point p, Point q) { return resolvent_kernel_plane_dx(p, q, z, B); });
}

cplx landau_projector_kernel_plane(Point a, Point b, double B) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    const double s = dx * dx + dy * dy;
    return (B / (2.0 * kPi)) * std::exp(-0.25 * B * s) * landau_phase(a, b, B);
}

cplx landau_projector_kernel(Point a, Point b, double B, double L) {
    return image_sum(a, b, L,
                     [&](Point p, Point q) { return landau_projector_kernel_plane(p, q, B); });
}

// ---------------- Lemma 3 certificates ----------------

// Frozen from lemma3_ratio_sweep_max over 4000 samples per order at
// B in {0.5, 1, 4}, L = 12 (max ratio x 1.5).
const double kLemma3C0 = 0.60;
const double kLemma3C1 = 1.35;

double lemma3_bound(Point a, Point b, cplx z, double B, int order) {
    const double dx = a.x - b.x;
    const double c = (order == 0) ? kLemma3C0 : kLemma3C1;
    return c * std::pow(B, 1.0 + 0.5 * order) / dist_to_landau(z, B) *
           std::exp(-B * dx * dx / 8.0);
}

KernelCertificate certify_lemma3_point(Point a, Point b, cplx z, double B, double L, int order) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    if (0.5 * B * (dx * dx + dy * dy) <= 1.0)
        throw std::domain_error("certify_lemma3: separation precondition violated");
    if (!(z.real() > 0.5 * B && z.real() < 1.5 * B) || std::abs(z.imag()) > 1.0)
        throw std::domain_error("certify_lemma3: z outside Lemma 3 scope");
    KernelCertificate c;
    c.xa = a;
    c.xb = b;
    c.z = z;
    c.order = order;
    c.kernel = (order == 0) ? resolvent_kernel_cylinder(a, b, z, B, L)
                            : resolvent_kernel_cylinder_dx(a, b, z, B, L);
    c.bound = lemma3_bound(a, b, z, B, order);
    c.pass = std::abs(c.kernel) <= c.bound;
    return c;
}

double lemma3_ratio_sweep_max(int order, double B, double L, int n_samples, unsigned seed) {
    rng::Stream rs(seed);
    double worst = 0.0;
    int done = 0;
    while (done < n_samples) {
        Point a{rs.uniform(-L, L), rs.uniform(-L / 2.0, L / 2.0)};
        Point b{rs.uniform(-L, L), rs.uniform(-L / 2.0, L / 2.0)};
        const double dx = a.x - b.x, dy = a.y - b.y;
        if (0.5 * B * (dx * dx + dy * dy) <= 1.0) continue;
        cplx z(rs.uniform(0.55 * B, 1.45 * B), rs.uniform(-1.0, 1.0));
        if (dist_to_landau(z, B) < 0.02 * B) continue;
        cplx k = (order == 0) ? resolvent_kernel_cylinder(a, b, z, B, L)
                              : resolvent_kernel_cylinder_dx(a, b, z, B, L);
        double ratio = std::abs(k) * std::exp(B * dx * dx / 8.0) * dist_to_landau(z, B) /
                       std::pow(B, 1.0 + 0.5 * order);
        worst = std::max(worst, ratio);
        ++done;
    }
    return worst;
}

} // namespace qhc::sf
