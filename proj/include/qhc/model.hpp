#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qhc::model {

enum class Side { left, right };

// One-sided polynomial wall: zero on the passive side of +-L/2, strictly
// monotone c*|x -+ L/2|^m on the active side.
struct ConfiningPotential {
    Side side = Side::right;
    double coeff = 1.0;
    double exponent = 2.0;
    double L = 8.0;

    double operator()(double x) const;
};

struct BumpProfile {
    double amplitude = 0.2;                 // V(0,0) = V0
    static constexpr double radius = 0.25;  // supp V in B(0, 1/4)

    // V(r) = V0 (1 - 16 r^2)^3 inside the support disk; C^2 at the boundary
    double operator()(double x, double y) const;
};

struct ModelParams {
    double B = 1.0;
    double L = 8.0;
    double V0 = 0.2;
    double epsilon = 0.05;

    // envelope constants (c1 |d|^m1 <= U <= c2 |d|^m2)
    double c1 = 1.0, c2 = 1.3;
    double m1 = 2.0, m2 = 2.0;

    // concrete confinement; asymmetric by default so the left/right edge
    // spectra avoid coincidence
    double cl = 1.0, ml = 2.0;
    double cr = 1.3, mr = 2.0;

    double W_extra = 0.0;       // optional widening of the truncated domain
    std::uint64_t seed_base = 12345;

    double W() const;           // smallest W with c1 W^m1 >= B/2 + V0 + 10 B, plus W_extra
    double window_lo() const { return 0.5 * B + epsilon; }
    double window_hi() const { return 0.5 * B + V0; }
    ConfiningPotential left() const { return {Side::left, cl, ml, L}; }
    ConfiningPotential right() const { return {Side::right, cr, mr, L}; }
    BumpProfile bump() const { return {V0}; }

    // throws std::invalid_argument naming the violated inequality
    void validate() const;
};

struct DisorderRealization {
    std::uint64_t seed = 0;
    double L = 0.0;
    int n_min = 0, n_max = -1;   // impurity columns, [-L/2+logL, L/2-logL] rounded inward
    int m_min = 0, m_max = -1;   // impurity rows, [-L/2, L/2) (periodic identification)
    std::vector<std::pair<int, int>> sites;  // (n, m), n-major ascending
    std::vector<double> couplings;           // X_{n,m} in [-1, 1], aligned with sites

    int site_count() const { return static_cast<int>(sites.size()); }
    // innermost x still free of disorder on each side (lattice margin + bump radius)
    double support_lo() const { return n_min - BumpProfile::radius; }
    double support_hi() const { return n_max + BumpProfile::radius; }
};

// coupling density h(t) = (15/16)(1 - t^2)^2 on [-1, 1]
double coupling_density(double t);
inline double coupling_density_sup() { return 15.0 / 16.0; }

DisorderRealization sample_disorder(const ModelParams& p, std::uint64_t seed);

double eval_confinement(const ConfiningPotential& pot, double x);

// V_omega(x, y), y-periodic with period L; at most one bump covers any point
double eval_random_potential(const ModelParams& p, const DisorderRealization& r,
                             double x, double y);

} // namespace qhc::model
