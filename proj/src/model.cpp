#include "qhc/model.hpp"
#include "qhc/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qhc::model {

double ConfiningPotential::operator()(double x) const {
    const double half = 0.5 * L;
    if (side == Side::right) {
        if (x <= half) return 0.0;
        return coeff * std::pow(x - half, exponent);
    }
    if (x >= -half) return 0.0;
    return coeff * std::pow(-x - half, exponent);
}

double BumpProfile::operator()(double x, double y) const {
    const double r2 = x * x + y * y;
    const double s = 1.0 - 16.0 * r2;
    if (s <= 0.0) return 0.0;
    return amplitude * s * s * s;
}

double ModelParams::W() const {
    return std::pow((0.5 * B + V0 + 10.0 * B) / c1, 1.0 / m1) + W_extra;
}

void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (!(B > 0.0)) fail("model: B > 0 violated");
    if (!(L >= 4.0)) fail("model: L >= 4 violated");
    if (std::round(L) != L) fail("model: L must be an integer (periodic impurity rows)");
    if (!(B > 4.0 * V0)) fail("model: B > 4*V0 violated");
    if (!(epsilon > 0.0 && epsilon < V0)) fail("model: 0 < epsilon < V0 violated");
    if (!(c1 > 0.0 && c1 <= c2)) fail("model: 0 < c1 <= c2 violated");
    if (!(m1 >= 2.0 && m1 <= m2)) fail("model: 2 <= m1 <= m2 violated");
    if (!(W_extra >= 0.0)) fail("model: W_extra >= 0 violated");
    // concrete walls must live inside the envelopes on the truncated domain
    const double w = W();
    auto conf = {left(), right()};
    for (const auto& u : conf) {
        for (int i = 1; i <= 64; ++i) {
            const double d = w * i / 64.0;
            const double x = (u.side == Side::right) ? 0.5 * L + d : -0.5 * L - d;
            const double v = u(x);
            const double lo = c1 * std::pow(d, m1);
            const double hi = c2 * std::pow(d, m2);
            if (v < lo * (1.0 - 1e-12) || v > hi * (1.0 + 1e-12))
                fail("model: confinement outside c1|d|^m1 <= U <= c2|d|^m2 envelope");
        }
    }
    if (!(c1 * std::pow(w, m1) >= 0.5 * B + V0 + 10.0 * B - 1e-9))
        fail("model: truncation margin c1*W^m1 >= B/2 + V0 + 10B violated");
}

double coupling_density(double t) {
    if (t < -1.0 || t > 1.0) return 0.0;
    const double s = 1.0 - t * t;
    return (15.0 / 16.0) * s * s;
}

DisorderRealization sample_disorder(const ModelParams& p, std::uint64_t seed) {
    p.validate();
    const double logL = std::log(p.L);
    DisorderRealization r;
    r.seed = seed;
    r.L = p.L;
    // rounded inward so the disorder-free layer is never thinner than log L
    r.n_min = static_cast<int>(std::ceil(-0.5 * p.L + logL));
    r.n_max = static_cast<int>(std::floor(0.5 * p.L - logL));
    // y-rows cover one period [-L/2, L/2)
    r.m_min = static_cast<int>(std::ceil(-0.5 * p.L));
    r.m_max = static_cast<int>(std::ceil(0.5 * p.L)) - 1;
    if (r.n_min > r.n_max || r.m_min > r.m_max)
        throw std::invalid_argument("sample_disorder: L too small, impurity lattice empty");

    rng::Stream rs(rng::derive_seed(p.seed_base, seed));
    for (int n = r.n_min; n <= r.n_max; ++n) {
        for (int m = r.m_min; m <= r.m_max; ++m) {
            // rejection sampling from h: envelope is the uniform density on [-1,1]
            double t;
            for (;;) {
                t = rs.uniform(-1.0, 1.0);
                const double u = rs.uniform01();
                const double s = 1.0 - t * t;
                if (u < s * s) break;
            }
            r.sites.emplace_back(n, m);
            r.couplings.push_back(t);
        }
    }
    return r;
}

double eval_confinement(const ConfiningPotential& pot, double x) { return pot(x); }

double eval_random_potential(const ModelParams& p, const DisorderRealization& r,
                             double x, double y) {
    // reduce y to [-L/2, L/2)
    const double L = r.L;
    double yw = y - L * std::floor((y + 0.5 * L) / L);

    const int n = static_cast<int>(std::lround(x));
    if (n < r.n_min || n > r.n_max) return 0.0;
    const double dx = x - n;
    if (std::abs(dx) >= BumpProfile::radius) return 0.0;

    int m = static_cast<int>(std::lround(yw));
    double dy = yw - m;
    // wrap the row index back into one period
    int mw = m;
    while (mw > r.m_max) mw -= static_cast<int>(std::lround(L));
    while (mw < r.m_min) mw += static_cast<int>(std::lround(L));
    if (std::abs(dy) >= BumpProfile::radius) return 0.0;

    const int rows = r.m_max - r.m_min + 1;
    const int idx = (n - r.n_min) * rows + (mw - r.m_min);
    const double X = r.couplings[static_cast<size_t>(idx)];
    return X * p.bump()(dx, dy);
}

} // namespace qhc::model
