#include "qhc/decouple.hpp"
#include "qhc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qhc::decouple {

namespace {

// quintic smoothstep: s(0)=0, s(1)=1, C^2 with s'(0)=s'(1)=s''(0)=s''(1)=0
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// descending profile: 1 for x <= a, 0 for x >= a + w
inline double step_down(double x, double a, double w) {
    return 1.0 - smoothstep5((x - a) / w);
}

} // namespace

double PartitionSet::partition_identity_defect() const {
    double worst = 0.0;
    for (size_t j = 0; j < J[0].size(); ++j) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += J[static_cast<size_t>(i)][j] * Jsharp[static_cast<size_t>(i)][j];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

double PartitionSet::sharp_sum_defect() const {
    double worst = 0.0;
    for (size_t j = 0; j < Jsharp[0].size(); ++j) {
        double s = Jsharp[0][j] + Jsharp[1][j] + Jsharp[2][j];
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

PartitionSet build_partitions(const model::ModelParams& p, const basis::Grid1D& grid,
                              const model::DisorderRealization& r, double layer_scale) {
    PartitionSet ps;
    ps.D = layer_scale * std::log(p.L);
    ps.grid = grid;
    ps.L = p.L;
    const double D = ps.D;
    const double half = 0.5 * p.L;
    if (p.L < 4.0 * std::log(p.L) * layer_scale)
        throw std::invalid_argument("build_partitions: plateaus overlap, L too small");

    const double cut_l = -half + 0.5 * D;   // sharp cuts
    const double cut_r = half - 0.5 * D;
    const double guard = 1e-9;
    const double s_lo = r.support_lo() - guard;  // impurity support edges
    const double s_hi = r.support_hi() + guard;

    // left transition lives in [cut_l, s_lo]; prefer the 3D/4 start
    double avail_l = s_lo - cut_l;
    if (avail_l < 3.0 * grid.hx)
        throw std::invalid_argument("build_partitions: no room between layer cut and impurities");
    ps.wl = std::min(1.0, avail_l);
    ps.al = std::min(std::max(-half + 0.75 * D, cut_l), s_lo - ps.wl);

    double avail_r = cut_r - s_hi;
    if (avail_r < 3.0 * grid.hx)
        throw std::invalid_argument("build_partitions: no room between layer cut and impurities");
    ps.wr = std::min(1.0, avail_r);
    ps.ar = std::max(std::min(half - 0.75 * D, cut_r), s_hi + ps.wr);

    // bulk transition between the sharp cut and the wall
    ps.wb = std::min(1.0, 0.5 * D);
    ps.bp = half - ps.wb;
    if (ps.bp < cut_r)
        throw std::invalid_argument("build_partitions: bulk plateau cannot cover its cut");

    const int Nx = grid.Nx;
    for (auto& v : ps.J) v.assign(static_cast<size_t>(Nx), 0.0);
    for (auto& v : ps.Jsharp) v.assign(static_cast<size_t>(Nx), 0.0);
    for (int j = 0; j < Nx; ++j) {
        const double x = grid.x(j);
        ps.J[0][static_cast<size_t>(j)] = step_down(x, ps.al, ps.wl);
        ps.J[2][static_cast<size_t>(j)] = step_down(-x, -ps.ar, ps.wr);
        ps.J[1][static_cast<size_t>(j)] = step_down(std::abs(x), ps.bp, ps.wb);
        if (x <= cut_l) ps.Jsharp[0][static_cast<size_t>(j)] = 1.0;
        else if (x <= cut_r) ps.Jsharp[1][static_cast<size_t>(j)] = 1.0;
        else ps.Jsharp[2][static_cast<size_t>(j)] = 1.0;
    }
    const double wmin = std::min({ps.wl, ps.wr, ps.wb});
    ps.max_dJ = 1.875 / wmin;
    ps.max_d2J = (10.0 / std::sqrt(3.0)) / (wmin * wmin);
    return ps;
}

// ---------------- K operator ----------------

namespace {

// real tridiagonal PLU (partial pivoting) of (z - T), factor once / solve many
template <typename Fac>
Fac tri_factor(const std::vector<double>& diag, double off, double z) {
    const int n = static_cast<int>(diag.size());
    Fac f;
    f.a.resize(static_cast<size_t>(n));
    f.b.assign(static_cast<size_t>(n), 0.0);
    f.c.assign(static_cast<size_t>(n), 0.0);
    f.l.assign(static_cast<size_t>(n), 0.0);
    f.piv.assign(static_cast<size_t>(n), 0);
    // factor z - T: diagonal z - d_j, off-diagonals -off
    for (int i = 0; i < n; ++i) f.a[static_cast<size_t>(i)] = z - diag[static_cast<size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) f.b[static_cast<size_t>(i)] = -off;
    for (int i = 0; i + 1 < n; ++i) {
        double sub = -off;
        if (std::abs(f.a[static_cast<size_t>(i)]) < std::abs(sub)) {
            f.piv[static_cast<size_t>(i)] = 1;
            std::swap(f.a[static_cast<size_t>(i)], sub);
            const double t = f.b[static_cast<size_t>(i)];
            f.b[static_cast<size_t>(i)] = f.a[static_cast<size_t>(i + 1)];
            f.a[static_cast<size_t>(i + 1)] = t;
            f.c[static_cast<size_t>(i)] = (i + 2 < n) ? f.b[static_cast<size_t>(i + 1)] : 0.0;
            if (i + 2 < n) f.b[static_cast<size_t>(i + 1)] = 0.0;
        }
        double den = f.a[static_cast<size_t>(i)];
        if (den == 0.0) den = 1e-300;
        const double m = sub / den;
        f.l[static_cast<size_t>(i)] = m;
        f.a[static_cast<size_t>(i + 1)] -= m * f.b[static_cast<size_t>(i)];
        if (i + 2 < n) f.b[static_cast<size_t>(i + 1)] -= m * f.c[static_cast<size_t>(i)];
    }
    return f;
}

template <typename Fac>
void tri_solve(const Fac& f, cplx* x) {
    const int n = static_cast<int>(f.a.size());
    for (int i = 0; i + 1 < n; ++i) {
        if (f.piv[static_cast<size_t>(i)]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= f.l[static_cast<size_t>(i)] * x[i];
    }
    for (int i = n - 1; i >= 0; --i) {
        cplx s = x[i];
        if (i + 1 < n) s -= f.b[static_cast<size_t>(i)] * x[i + 1];
        if (i + 2 < n) s -= f.c[static_cast<size_t>(i)] * x[i + 2];
        double den = f.a[static_cast<size_t>(i)];
        if (den == 0.0) den = 1e-300;
        x[i] = s / den;
    }
}

} // namespace

KOperator::KOperator(std::shared_ptr<const basis::MixedBasis> mb, const model::ModelParams& p,
                     const ops::BlockOperator& hb, const PartitionSet& parts, double z)
    : mb_(std::move(mb)), parts_(&parts), z_(z) {
    const auto& g = mb_->grid;
    const int Nk = mb_->Nk();

    ops::BlockOperator hl = ops::assemble_edge(mb_, p, model::Side::left);
    ops::BlockOperator hr = ops::assemble_edge(mb_, p, model::Side::right);
    fac_l_.resize(static_cast<size_t>(Nk));
    fac_r_.resize(static_cast<size_t>(Nk));
    for (int ik = 0; ik < Nk; ++ik) {
        fac_l_[static_cast<size_t>(ik)] = tri_factor<Tri>(hl.diag[static_cast<size_t>(ik)], hl.offdiag, z);
        fac_r_[static_cast<size_t>(ik)] = tri_factor<Tri>(hr.diag[static_cast<size_t>(ik)], hr.offdiag, z);
    }
    // R_b via block factorization of (H_b - z); flip sign for (z - H_b)^{-1}
    fac_b_ = std::make_unique<eig::BlockFactor>(hb, z);

    // commutator couplings: ([p^2, J] u)_j = (1/hx^2) [(J_j - J_{j-1}) u_{j-1}
    //                                              + (J_j - J_{j+1}) u_{j+1}]
    const double ih2 = 1.0 / (g.hx * g.hx);
    for (int i = 0; i < 3; ++i) {
        com_lo_[static_cast<size_t>(i)].assign(static_cast<size_t>(g.Nx), 0.0);
        com_hi_[static_cast<size_t>(i)].assign(static_cast<size_t>(g.Nx), 0.0);
        for (int j = 0; j < g.Nx; ++j) {
            const auto& Ji = parts_->J[static_cast<size_t>(i)];
            if (j > 0)
                com_lo_[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    ih2 * (Ji[static_cast<size_t>(j)] - Ji[static_cast<size_t>(j - 1)]);
            if (j + 1 < g.Nx)
                com_hi_[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    ih2 * (Ji[static_cast<size_t>(j)] - Ji[static_cast<size_t>(j + 1)]);
        }
    }
}

void KOperator::apply_resolvent(int which, std::vector<cplx>& v) const {
    const int Nk = mb_->Nk();
    const int Nx = mb_->grid.Nx;
    if (which == 1) {
        // (z - H_b)^{-1} = -(H_b - z)^{-1}
        fac_b_->solve(v.data());
        for (auto& x : v) x = -x;
        return;
    }
    const auto& fac = (which == 0) ? fac_l_ : fac_r_;
    // j-major storage: gather each momentum fiber, solve, scatter
    std::vector<cplx> fiber(static_cast<size_t>(Nx));
    for (int ik = 0; ik < Nk; ++ik) {
        for (int j = 0; j < Nx; ++j) fiber[static_cast<size_t>(j)] = v[static_cast<size_t>(mb_->index(j, ik))];
        tri_solve(fac[static_cast<size_t>(ik)], fiber.data());
        for (int j = 0; j < Nx; ++j) v[static_cast<size_t>(mb_->index(j, ik))] = fiber[static_cast<size_t>(j)];
    }
}

void KOperator::apply(const cplx* x, cplx* y) const {
    const int Nk = mb_->Nk();
    const int Nx = mb_->grid.Nx;
    const std::int64_t n = dim();
    std::fill(y, y + n, cplx(0.0));
    std::vector<cplx> v(static_cast<size_t>(n));
    for (int i = 0; i < 3; ++i) {
        // v = Jsharp_i x
        for (int j = 0; j < Nx; ++j) {
            const double s = parts_->Jsharp[static_cast<size_t>(i)][static_cast<size_t>(j)];
            for (int ik = 0; ik < Nk; ++ik)
                v[static_cast<size_t>(mb_->index(j, ik))] = s * x[mb_->index(j, ik)];
        }
        apply_resolvent(i, v);
        // y += 1/2 [p^2, J_i] v
        for (int j = 0; j < Nx; ++j) {
            const double clo = com_lo_[static_cast<size_t>(i)][static_cast<size_t>(j)];
            const double chi = com_hi_[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (clo == 0.0 && chi == 0.0) continue;
            for (int ik = 0; ik < Nk; ++ik) {
                cplx s(0.0);
                if (j > 0 && clo != 0.0) s += clo * v[static_cast<size_t>(mb_->index(j - 1, ik))];
                if (j + 1 < Nx && chi != 0.0) s += chi * v[static_cast<size_t>(mb_->index(j + 1, ik))];
                y[mb_->index(j, ik)] += 0.5 * s;
            }
        }
    }
}

void KOperator::apply_adjoint(const cplx* x, cplx* y) const {
    const int Nk = mb_->Nk();
    const int Nx = mb_->grid.Nx;
    const std::int64_t n = dim();
    std::fill(y, y + n, cplx(0.0));
    std::vector<cplx> v(static_cast<size_t>(n));
    for (int i = 0; i < 3; ++i) {
        // v = ([p^2, J_i])^H x: transpose application,
        // v_{j-1} += clo_j x_j and v_{j+1} += chi_j x_j
        std::fill(v.begin(), v.end(), cplx(0.0));
        for (int j = 0; j < Nx; ++j) {
            const double clo = com_lo_[static_cast<size_t>(i)][static_cast<size_t>(j)];
            const double chi = com_hi_[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (clo == 0.0 && chi == 0.0) continue;
            for (int ik = 0; ik < Nk; ++ik) {
                const cplx xs = x[mb_->index(j, ik)];
                if (j > 0 && clo != 0.0) v[static_cast<size_t>(mb_->index(j - 1, ik))] += clo * xs;
                if (j + 1 < Nx && chi != 0.0) v[static_cast<size_t>(mb_->index(j + 1, ik))] += chi * xs;
            }
        }
        apply_resolvent(i, v);  // R_i(z) Hermitian at real z
        for (int j = 0; j < Nx; ++j) {
            const double s = parts_->Jsharp[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (s == 0.0) continue;
            for (int ik = 0; ik < Nk; ++ik)
                y[mb_->index(j, ik)] += 0.5 * s * v[static_cast<size_t>(mb_->index(j, ik))];
        }
    }
}

double KOperator::norm_estimate(double rel_tol, int max_iter) const {
    const std::int64_t n = dim();
    rng::Stream rs(rng::derive_seed(0xDECu, static_cast<std::uint64_t>(n)));
    std::vector<cplx> u(static_cast<size_t>(n)), t(static_cast<size_t>(n)), w(static_cast<size_t>(n));
    for (auto& x : u) x = cplx(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0));
    double nrm = 0.0;
    for (const auto& x : u) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    for (auto& x : u) x /= nrm;
    double lam = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        apply(u.data(), t.data());
        apply_adjoint(t.data(), w.data());
        double wn = 0.0;
        for (const auto& x : w) wn += std::norm(x);
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        const double lam_new = wn;  // |K^H K| eigenvalue estimate
        for (std::int64_t i = 0; i < n; ++i) u[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / wn;
        if (it > 4 && std::abs(lam_new - lam) <= rel_tol * lam_new) {
            lam = lam_new;
            break;
        }
        lam = lam_new;
    }
    return std::sqrt(lam);
}

void KOperator::apply_parametrix(const cplx* x, cplx* y) const {
    const int Nk = mb_->Nk();
    const int Nx = mb_->grid.Nx;
    const std::int64_t n = dim();
    std::fill(y, y + n, cplx(0.0));
    std::vector<cplx> v(static_cast<size_t>(n));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < Nx; ++j) {
            const double s = parts_->Jsharp[static_cast<size_t>(i)][static_cast<size_t>(j)];
            for (int ik = 0; ik < Nk; ++ik)
                v[static_cast<size_t>(mb_->index(j, ik))] = s * x[mb_->index(j, ik)];
        }
        apply_resolvent(i, v);
        for (int j = 0; j < Nx; ++j) {
            const double s = parts_->J[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (s == 0.0) continue;
            for (int ik = 0; ik < Nk; ++ik)
                y[mb_->index(j, ik)] += s * v[static_cast<size_t>(mb_->index(j, ik))];
        }
    }
}

DecouplingReport verify_decoupling(const ops::BlockOperator& h_full,
                                   const ops::BlockOperator& hb, const model::ModelParams& p,
                                   const PartitionSet& parts, double z, int probes) {
    DecouplingReport rep;
    rep.z = z;
    KOperator K(h_full.basis, p, hb, parts, z);
    rep.K_norm = K.norm_estimate();

    const std::int64_t n = h_full.dim();
    rng::Stream rs(rng::derive_seed(0xDEC0DEull, static_cast<std::uint64_t>(n)));

    eig::BlockFactor direct(h_full, z);  // (H - z); R(z) = -(H - z)^{-1}

    double num2 = 0.0, den2 = 0.0, rnum2 = 0.0, rden2 = 0.0;
    bool neumann_all = true;
    std::vector<cplx> v(static_cast<size_t>(n)), Sv(static_cast<size_t>(n)), t(static_cast<size_t>(n)),
        r(static_cast<size_t>(n)), acc(static_cast<size_t>(n)), pw(static_cast<size_t>(n));
    for (int pr = 0; pr < probes; ++pr) {
        for (auto& x : v) x = cplx(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0));
        double vn = 0.0;
        for (const auto& x : v) vn += std::norm(x);
        vn = std::sqrt(vn);
        for (auto& x : v) x /= vn;

        // identity residual: (z - H) S v - (1 - K) v
        K.apply_parametrix(v.data(), Sv.data());
        h_full.matvec(Sv.data(), t.data());
        K.apply(v.data(), r.data());
        double nn = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            const cplx lhs = z * Sv[static_cast<size_t>(i)] - t[static_cast<size_t>(i)];
            const cplx rhs = v[static_cast<size_t>(i)] - r[static_cast<size_t>(i)];
            nn += std::norm(lhs - rhs);
        }
        num2 += nn;
        den2 += 1.0;

        // reconstruction: R(z) v vs S (1-K)^{-1} v (Neumann series)
        std::vector<cplx> rz = v;
        direct.solve(rz.data());
        for (auto& x : rz) x = -x;
        acc = v;
        pw = v;
        bool ok = false;
        for (int term = 1; term <= 200; ++term) {
            K.apply(pw.data(), t.data());
            pw = t;
            double pn = 0.0;
            for (const auto& x : pw) pn += std::norm(x);
            for (std::int64_t i = 0; i < n; ++i) acc[static_cast<size_t>(i)] += pw[static_cast<size_t>(i)];
            if (std::sqrt(pn) < 1e-13) { ok = true; break; }
        }
        neumann_all = neumann_all && ok;
        K.apply_parametrix(acc.data(), Sv.data());
        double dn = 0.0, dd = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            dn += std::norm(Sv[static_cast<size_t>(i)] - rz[static_cast<size_t>(i)]);
            dd += std::norm(rz[static_cast<size_t>(i)]);
        }
        rnum2 += dn;
        rden2 += dd;
    }
    rep.identity_residual = std::sqrt(num2 / den2);
    rep.reconstruction_error = std::sqrt(rnum2 / rden2);
    rep.neumann_converged = neumann_all;
    return rep;
}

std::vector<double> certification_grid(const std::vector<double>& edge_levels,
                                       const std::vector<double>& bulk_levels, double lo,
                                       double hi, double floor_dist) {
    std::vector<double> anchors;
    for (double e : edge_levels)
        if (e > lo - 1.0 && e < hi + 1.0) anchors.push_back(e);
    anchors.push_back(lo);
    anchors.push_back(hi);
    std::sort(anchors.begin(), anchors.end());

    std::vector<double> avoid = edge_levels;
    avoid.insert(avoid.end(), bulk_levels.begin(), bulk_levels.end());
    std::sort(avoid.begin(), avoid.end());
    auto dist_to = [&](double z) {
        double best = 1e300;
        for (double a : avoid) best = std::min(best, std::abs(z - a));
        return best;
    };

    std::vector<double> grid;
    for (size_t i = 1; i < anchors.size(); ++i) {
        const double a = anchors[i - 1], b = anchors[i];
        if (b - a <= 0.0) continue;
        for (int q = 1; q <= 8; ++q) {
            const double z = a + (b - a) * q / 9.0;
            if (z <= lo || z >= hi) continue;
            if (dist_to(z) < floor_dist) continue;
            grid.push_back(z);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

} // namespace qhc::decouple
