#include "qhc/edge.hpp"
#include "qhc/linalg.hpp"
#include "qhc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhc::edge {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

void fill_fiber(const model::ModelParams& p, const model::ConfiningPotential& u,
                const basis::Grid1D& g, double k, std::vector<double>& d,
                std::vector<double>& e) {
    const int n = g.Nx;
    d.resize(static_cast<size_t>(n));
    e.assign(static_cast<size_t>(n), -0.5 / (g.hx * g.hx));
    for (int j = 0; j < n; ++j) {
        const double w = k - p.B * g.x(j);
        d[static_cast<size_t>(j)] = 1.0 / (g.hx * g.hx) + 0.5 * w * w + u(g.x(j));
    }
}

double ground_energy(const std::vector<double>& d, const std::vector<double>& e) {
    return la::tridiag_eig_kth(d, e, 0, 1e-14);
}

} // namespace

SpectralBranch edge_branch(const model::ModelParams& p, model::Side side,
                           const std::vector<double>& k_list, const basis::Grid1D& grid) {
    p.validate();
    SpectralBranch br;
    br.side = side;
    br.grid = grid;
    br.B = p.B;
    br.L = p.L;
    br.points.resize(k_list.size());

    const model::ConfiningPotential u = (side == model::Side::left) ? p.left() : p.right();
    const double dk = 1e-3 * (kTwoPi / p.L);

    par::parallel_for(static_cast<std::int64_t>(k_list.size()), [&](std::int64_t i) {
        const double k = k_list[static_cast<size_t>(i)];
        std::vector<double> d, e;
        fill_fiber(p, u, grid, k, d, e);
        BranchPoint pt;
        pt.k = k;
        pt.energy = ground_energy(d, e);
        pt.phi = la::tridiag_eigvec(d, e, pt.energy);
        double J = 0.0;
        for (int j = 0; j < grid.Nx; ++j) {
            const double w = k - p.B * grid.x(j);
            J += pt.phi[static_cast<size_t>(j)] * pt.phi[static_cast<size_t>(j)] * w;
        }
        pt.J_integral = J;
        // independent route: centered difference of the branch energy
        std::vector<double> dp, ep;
        fill_fiber(p, u, grid, k + dk, dp, ep);
        const double Ep = ground_energy(dp, ep);
        fill_fiber(p, u, grid, k - dk, dp, ep);
        const double Em = ground_energy(dp, ep);
        pt.J_derivative = (Ep - Em) / (2.0 * dk);
        br.points[static_cast<size_t>(i)] = std::move(pt);
    });
    std::sort(br.points.begin(), br.points.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return a.k < b.k; });
    return br;
}

SpectralBranch edge_branch_window(const model::ModelParams& p, model::Side side,
                                  const basis::Grid1D& grid) {
    // momenta on the 2pi/L lattice whose guiding center lies in the covered
    // domain; the branch sweeps the whole window on the wall side
    std::vector<double> ks;
    const double pad = 3.0 / std::sqrt(p.B);
    const int n_lo = static_cast<int>(std::ceil(p.B * (grid.x_min - pad) * p.L / kTwoPi));
    const int n_hi = static_cast<int>(std::floor(p.B * (grid.x_max + pad) * p.L / kTwoPi));
    for (int n = n_lo; n <= n_hi; ++n) ks.push_back(kTwoPi * n / p.L);
    return edge_branch(p, side, ks, grid);
}

SpectralBranch edge_branch_window(const model::ModelParams& p, model::Side side,
                                  const basis::MixedBasis& mb) {
    return edge_branch(p, side, mb.kset, mb.grid);
}

double SpectralBranch::j_epsilon(double lo, double hi) const {
    double jmin = std::numeric_limits<double>::infinity();
    for (const auto& pt : points)
        if (pt.energy >= lo && pt.energy <= hi) jmin = std::min(jmin, std::abs(pt.J_integral));
    return std::isfinite(jmin) ? jmin : 0.0;
}

std::vector<double> SpectralBranch::energies_in(double lo, double hi) const {
    std::vector<double> out;
    for (const auto& pt : points)
        if (pt.energy >= lo && pt.energy <= hi) out.push_back(pt.energy);
    std::sort(out.begin(), out.end());
    return out;
}

SpacingReport branch_spacing(const SpectralBranch& b, double lo, double hi) {
    // the branch must actually sweep past the window on both sides
    double emin = std::numeric_limits<double>::infinity();
    double emax = -emin;
    for (const auto& pt : b.points) {
        emin = std::min(emin, pt.energy);
        emax = std::max(emax, pt.energy);
    }
    if (!(emin <= lo && emax >= hi))
        throw std::invalid_argument("branch_spacing: window not covered by k_list");

    SpacingReport rep;
    auto es = b.energies_in(lo, hi);
    rep.count = static_cast<int>(es.size());
    rep.j_epsilon = b.j_epsilon(lo, hi);
    if (es.size() < 2) return rep;  // empty spacing report
    rep.min_spacing = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < es.size(); ++i) {
        const double s = es[i] - es[i - 1];
        rep.min_spacing = std::min(rep.min_spacing, s);
        rep.max_spacing = std::max(rep.max_spacing, s);
    }
    rep.spacing_exceeds_j_over_L = rep.min_spacing > rep.j_epsilon / b.L;
    return rep;
}

H1Report check_h1(const SpectralBranch& left, const SpectralBranch& right, double lo,
                  double hi, double threshold) {
    H1Report rep;
    auto el = left.energies_in(lo, hi);
    auto er = right.energies_in(lo, hi);
    rep.left_count = static_cast<int>(el.size());
    rep.right_count = static_cast<int>(er.size());
    if (el.empty() || er.empty()) {
        rep.d_epsilon = std::numeric_limits<double>::infinity();  // vacuous pass
        rep.pass = true;
        return rep;
    }
    double dmin = std::numeric_limits<double>::infinity();
    for (double a : el)
        for (double b : er) dmin = std::min(dmin, std::abs(a - b));
    rep.d_epsilon = left.L * dmin;
    rep.pass = rep.d_epsilon > threshold;
    return rep;
}

} // namespace qhc::edge
