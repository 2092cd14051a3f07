#include "qhc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhc::classify {

std::string label_name(StateLabel l) {
    switch (l) {
        case StateLabel::LeftEdge: return "L-edge";
        case StateLabel::Bulk: return "bulk";
        case StateLabel::RightEdge: return "R-edge";
        case StateLabel::Ambiguous: return "ambiguous";
    }
    return "?";
}

namespace {

cplx quadratic_form(const std::vector<cplx>& a, const std::vector<cplx>& b,
                    const ops::BlockOperator& vy) {
    if (a.size() != b.size() || static_cast<std::int64_t>(a.size()) != vy.dim())
        throw std::invalid_argument("current: state/operator basis mismatch");
    std::vector<cplx> y(b.size());
    vy.matvec(b.data(), y.data());
    cplx s(0.0);
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * y[i];
    return s;
}

} // namespace

double state_current(const eig::EigenPair& pair, const ops::BlockOperator& vy) {
    return quadratic_form(pair.vec, pair.vec, vy).real();
}

double cluster_current(const std::vector<const eig::EigenPair*>& cluster,
                       const ops::BlockOperator& vy) {
    double tr = 0.0;
    for (const auto* p : cluster) tr += state_current(*p, vy);
    return tr / static_cast<double>(cluster.size());
}

cplx pairwise_current(const eig::EigenPair& a, const eig::EigenPair& b,
                      const ops::BlockOperator& vy) {
    return quadratic_form(a.vec, b.vec, vy);
}

Lemma2Certificate lemma2_certificate(const eig::EigenPair& a, const eig::EigenPair& b,
                                     const ops::BlockOperator& vy, double L, double slack) {
    Lemma2Certificate c;
    c.value = pairwise_current(a, b, vy);
    c.bound = 2.0 * std::abs(a.E - b.E) * L + slack;
    c.pass = std::abs(c.value) <= c.bound;
    return c;
}

ClassifiedSpectrum classify_window(const eig::SpectrumWindow& win,
                                   const edge::SpectralBranch& left,
                                   const edge::SpectralBranch& right, const Policy& policy,
                                   const ops::BlockOperator& vy) {
    ClassifiedSpectrum cs;
    cs.lo = win.lo;
    cs.hi = win.hi;
    const double J_edge = policy.edge_frac * policy.j_epsilon;
    const double J_bulk = policy.bulk_frac * policy.j_epsilon;

    // degenerate clusters share a trace current
    const size_t n = win.pairs.size();
    std::vector<double> J(n, 0.0);
    double scale = 0.0;
    for (const auto& p : win.pairs) scale = std::max(scale, std::abs(p.E));
    const double cluster_tol = 1e-10 * std::max(1.0, scale);
    size_t i = 0;
    while (i < n) {
        size_t j = i + 1;
        while (j < n && win.pairs[j].E - win.pairs[j - 1].E <= cluster_tol) ++j;
        std::vector<const eig::EigenPair*> cluster;
        for (size_t q = i; q < j; ++q) cluster.push_back(&win.pairs[q]);
        const double Jc = cluster_current(cluster, vy);
        for (size_t q = i; q < j; ++q) J[q] = Jc;
        i = j;
    }

    auto nearest = [](const edge::SpectralBranch& br, double E, double lo, double hi,
                      double& k_out) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pt : br.points) {
            if (pt.energy < lo || pt.energy > hi) continue;
            const double d = std::abs(pt.energy - E);
            if (d < best) {
                best = d;
                k_out = pt.k;
            }
        }
        return best;
    };

    cs.min_edge_absJ = std::numeric_limits<double>::infinity();
    cs.max_bulk_absJ = 0.0;
    for (size_t q = 0; q < n; ++q) {
        const auto& p = win.pairs[q];
        ClassifiedState st;
        st.E = p.E;
        st.J = J[q];
        st.residual = p.residual;

        StateLabel lab;
        if (st.J >= J_edge) lab = StateLabel::RightEdge;
        else if (st.J <= -J_edge) lab = StateLabel::LeftEdge;
        else if (std::abs(st.J) <= J_bulk) lab = StateLabel::Bulk;
        else {
            // dead zone: nearest edge level within the classification radius
            double kl = 0.0, kr = 0.0;
            const double dl = nearest(left, st.E, win.lo, win.hi, kl);
            const double dr = nearest(right, st.E, win.lo, win.hi, kr);
            if (std::min(dl, dr) <= policy.radius)
                lab = (dl <= dr) ? StateLabel::LeftEdge : StateLabel::RightEdge;
            else
                lab = StateLabel::Ambiguous;
        }
        if (lab == StateLabel::LeftEdge || lab == StateLabel::RightEdge) {
            double km = 0.0;
            const auto& br = (lab == StateLabel::LeftEdge) ? left : right;
            const double d = nearest(br, st.E, win.lo, win.hi, km);
            if (std::isfinite(d)) {
                st.matched_k = km;
                st.shift = d;
            }
            cs.min_edge_absJ = std::min(cs.min_edge_absJ, std::abs(st.J));
        }
        if (lab == StateLabel::Bulk) cs.max_bulk_absJ = std::max(cs.max_bulk_absJ, std::abs(st.J));
        st.label = lab;
        switch (lab) {
            case StateLabel::LeftEdge: ++cs.left_count; break;
            case StateLabel::Bulk: ++cs.bulk_count; break;
            case StateLabel::RightEdge: ++cs.right_count; break;
            case StateLabel::Ambiguous: ++cs.ambiguous_count; break;
        }
        cs.entries.push_back(st);
    }
    return cs;
}

double projector_distance(const std::vector<const std::vector<cplx>*>& A,
                          const std::vector<const std::vector<cplx>*>& B) {
    if (A.empty() && B.empty()) return 0.0;
    if (A.size() != B.size()) return 1.0;
    const int p = static_cast<int>(A.size());
    const size_t n = A[0]->size();

    auto check_orthonormal = [&](const std::vector<const std::vector<cplx>*>& S) {
        for (int i = 0; i < p; ++i) {
            for (int j = i; j < p; ++j) {
                cplx ov(0.0);
                for (size_t q = 0; q < n; ++q) ov += std::conj((*S[i])[q]) * (*S[j])[q];
                const double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(ov - want) > 1e-6)
                    throw std::invalid_argument("projector_distance: inputs not orthonormal");
            }
        }
    };
    check_orthonormal(A);
    check_orthonormal(B);

    la::Matrix G(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            cplx ov(0.0);
            for (size_t q = 0; q < n; ++q) ov += std::conj((*A[i])[q]) * (*B[j])[q];
            G(i, j) = ov;
        }
    la::Matrix GG = la::adjoint_times_self(G);
    auto pairs = eig::eig_dense(GG);
    double lmin = 1.0;
    for (const auto& e : pairs) lmin = std::min(lmin, e.E);
    lmin = std::max(0.0, std::min(1.0, lmin));
    return std::sqrt(1.0 - lmin);
}

DecayProfile decay_profile(const eig::EigenPair& pair, const basis::MixedBasis& mb, int Ny) {
    DecayProfile dp;
    const auto& g = mb.grid;
    const int Nk = mb.Nk();
    const double norm = 1.0 / std::sqrt(mb.L * g.hx);

    dp.x.resize(static_cast<size_t>(g.Nx));
    dp.envelope.assign(static_cast<size_t>(g.Nx), 0.0);
    std::vector<double> line_max(static_cast<size_t>(Ny), 0.0);

    std::vector<cplx> phases(static_cast<size_t>(Nk));
    for (int l = 0; l < Ny; ++l) {
        const double y = -0.5 * mb.L + mb.L * l / Ny;
        for (int ik = 0; ik < Nk; ++ik) phases[static_cast<size_t>(ik)] = std::polar(1.0, mb.k(ik) * y);
        for (int j = 0; j < g.Nx; ++j) {
            cplx s(0.0);
            const cplx* cj = pair.vec.data() + static_cast<std::int64_t>(j) * Nk;
            for (int ik = 0; ik < Nk; ++ik) s += cj[ik] * phases[static_cast<size_t>(ik)];
            const double a = std::abs(s) * norm;
            dp.envelope[static_cast<size_t>(j)] = std::max(dp.envelope[static_cast<size_t>(j)], a);
            line_max[static_cast<size_t>(l)] = std::max(line_max[static_cast<size_t>(l)], a);
        }
    }
    for (int j = 0; j < g.Nx; ++j) dp.x[static_cast<size_t>(j)] = g.x(j);
    dp.h2_proxy = *std::min_element(line_max.begin(), line_max.end());

    // exterior Gaussian fit on x > L/2 against u = (x - (L/2 - log L))^2
    const double x0 = 0.5 * mb.L - std::log(mb.L);
    double amax = *std::max_element(dp.envelope.begin(), dp.envelope.end());
    double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
    int m = 0;
    for (int j = 0; j < g.Nx; ++j) {
        const double x = g.x(j);
        if (x <= 0.5 * mb.L) continue;
        const double a = dp.envelope[static_cast<size_t>(j)];
        if (a < 1e-13 * amax || a <= 0.0) continue;
        const double u = (x - x0) * (x - x0);
        const double v = std::log(a);
        su += u; sv += v; suu += u * u; suv += u * v;
        ++m;
    }
    dp.fit_points = m;
    if (m >= 3) {
        const double det = m * suu - su * su;
        dp.exterior_slope = (m * suv - su * sv) / det;
        const double icpt = (sv * suu - su * suv) / det;
        double r2 = 0.0;
        for (int j = 0; j < g.Nx; ++j) {
            const double x = g.x(j);
            if (x <= 0.5 * mb.L) continue;
            const double a = dp.envelope[static_cast<size_t>(j)];
            if (a < 1e-13 * amax || a <= 0.0) continue;
            const double u = (x - x0) * (x - x0);
            const double e = std::log(a) - (icpt + dp.exterior_slope * u);
            r2 += e * e;
        }
        dp.fit_residual = std::sqrt(r2 / m);
    }
    return dp;
}

double x_mass_outside(const std::vector<cplx>& vec, const basis::MixedBasis& mb, double x_abs) {
    const auto& g = mb.grid;
    const int Nk = mb.Nk();
    double out = 0.0, total = 0.0;
    for (int j = 0; j < g.Nx; ++j) {
        double m = 0.0;
        const cplx* cj = vec.data() + static_cast<std::int64_t>(j) * Nk;
        for (int ik = 0; ik < Nk; ++ik) m += std::norm(cj[ik]);
        total += m;
        if (std::abs(g.x(j)) > x_abs) out += m;
    }
    return total > 0.0 ? out / total : 0.0;
}

double frozen_cB(double B) { return B / 128.0; }

TraceBound trace_bound_check(long count_in_window, const model::ModelParams& p) {
    TraceBound tb;
    tb.count = count_in_window;
    const double c = frozen_cB(p.B);
    tb.bound = 2.0 * std::pow(p.epsilon, -2.0) * c * c * p.V0 * p.V0 * std::pow(p.L, 4.0);
    tb.pass = static_cast<double>(tb.count) <= tb.bound;
    return tb;
}

} // namespace qhc::classify
