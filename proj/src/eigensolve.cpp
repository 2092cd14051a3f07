#include "qhc/eigensolve.hpp"
#include "qhc/parallel.hpp"
#include "qhc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qhc::eig {

void eig_real_symmetric(const std::vector<double>& a, int n, std::vector<double>& evals,
                        std::vector<double>* vecs) {
    std::vector<double> work = a;
    std::vector<double> d, e;
    la::tred2(work, n, d, e);
    la::tqli(d, e, n, &work);
    // sort ascending, permuting columns of work
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[static_cast<size_t>(i)] < d[static_cast<size_t>(j)]; });
    evals.resize(static_cast<size_t>(n));
    if (vecs) vecs->assign(static_cast<size_t>(n) * n, 0.0);
    for (int c = 0; c < n; ++c) {
        evals[static_cast<size_t>(c)] = d[static_cast<size_t>(idx[static_cast<size_t>(c)])];
        if (vecs)
            for (int r = 0; r < n; ++r)
                (*vecs)[static_cast<size_t>(r) * n + c] =
                    work[static_cast<size_t>(r) * n + idx[static_cast<size_t>(c)]];
    }
}

std::vector<EigenPair> eig_dense(const la::Matrix& H, int dim_cap) {
    const int n = H.rows();
    if (n > dim_cap) throw std::length_error("eig_dense: dimension exceeds the dense cap");
    if (la::max_hermiticity_defect(H) > 0.0)
        throw std::invalid_argument("eig_dense: input is not exactly conjugate-symmetric");

    // doubling embedding
    const int N = 2 * n;
    std::vector<double> R(static_cast<size_t>(N) * N, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double re = H(i, j).real(), im = H(i, j).imag();
            R[static_cast<size_t>(i) * N + j] = re;
            R[static_cast<size_t>(i + n) * N + (j + n)] = re;
            R[static_cast<size_t>(i) * N + (j + n)] = -im;
            R[static_cast<size_t>(i + n) * N + j] = im;
        }
    }
    std::vector<double> evals, vecs;
    eig_real_symmetric(R, N, evals, &vecs);

    double scale = 0.0;
    for (double v : evals) scale = std::max(scale, std::abs(v));
    const double clus_tol = std::max(1e-300, 1e-10 * scale);

    std::vector<EigenPair> out;
    std::vector<std::vector<cplx>> cluster;  // accepted complex vectors of current cluster
    double cluster_E = 0.0;
    bool has_cluster = false;

    auto flush_allowed = [&](double E) {
        return !has_cluster || std::abs(E - cluster_E) > clus_tol;
    };

    for (int c = 0; c < N; ++c) {
        const double E = evals[static_cast<size_t>(c)];
        if (flush_allowed(E)) {
            cluster.clear();
            has_cluster = true;
        }
        cluster_E = E;
        std::vector<cplx> psi(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            psi[static_cast<size_t>(i)] = cplx(vecs[static_cast<size_t>(i) * N + c],
                                               vecs[static_cast<size_t>(i + n) * N + c]);
        // project out already-accepted vectors of this degenerate cluster;
        // the J-partner of an accepted vector projects to ~0 and is dropped
        for (const auto& phi : cluster) {
            cplx ov(0.0);
            for (int i = 0; i < n; ++i) ov += std::conj(phi[static_cast<size_t>(i)]) * psi[static_cast<size_t>(i)];
            for (int i = 0; i < n; ++i) psi[static_cast<size_t>(i)] -= ov * phi[static_cast<size_t>(i)];
        }
        double nrm = 0.0;
        for (const auto& v : psi) nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        if (nrm < 0.3) continue;  // J-partner duplicate
        for (auto& v : psi) v /= nrm;
        // canonical phase: first significant coefficient real positive
        double big = 0.0;
        for (const auto& v : psi) big = std::max(big, std::abs(v));
        for (int i = 0; i < n; ++i) {
            if (std::abs(psi[static_cast<size_t>(i)]) > 1e-8 * big) {
                cplx ph = psi[static_cast<size_t>(i)] / std::abs(psi[static_cast<size_t>(i)]);
                for (auto& v : psi) v /= ph;
                break;
            }
        }
        cluster.push_back(psi);
        EigenPair p;
        p.E = E;
        p.vec = std::move(psi);
        out.push_back(std::move(p));
    }

    // residuals
    for (auto& p : out) {
        std::vector<cplx> y(static_cast<size_t>(n));
        la::matvec(H, p.vec.data(), y.data());
        double r = 0.0;
        for (int i = 0; i < n; ++i) r += std::norm(y[static_cast<size_t>(i)] - p.E * p.vec[static_cast<size_t>(i)]);
        p.residual = std::sqrt(r);
    }
    return out;
}

// ---------------- block factorization ----------------

BlockFactor::BlockFactor(const ops::BlockOperator& op, double sigma) {
    const auto& mb = *op.basis;
    Nx_ = mb.grid.Nx;
    M_ = mb.Nk();
    beta_ = op.offdiag;
    sigma_ = sigma;
    neg_ = 0;
    inv_.resize(static_cast<size_t>(Nx_));

    la::Matrix S(M_, M_);
    for (int j = 0; j < Nx_; ++j) {
        // S_j = A_j - sigma - beta^2 * S_{j-1}^{-1}
        S.set_zero();
        for (int a = 0; a < M_; ++a)
            S(a, a) = op.diag[static_cast<size_t>(a)][static_cast<size_t>(j)] + op.shift - sigma;
        if (op.coupling && op.coupling->column_abs_sum(j) > 0.0) {
            for (int a = 0; a < M_; ++a)
                for (int b = 0; b < M_; ++b)
                    S(a, b) += op.coupling->c(a - b, j);
        }
        if (j > 0 && beta_ != 0.0) {
            const la::Matrix& G = inv_[static_cast<size_t>(j - 1)];
            const double b2 = beta_ * beta_;
            for (int a = 0; a < M_; ++a)
                for (int b = 0; b < M_; ++b) S(a, b) -= b2 * G(a, b);
        }
        la::HermitianLDL ldl;
        ldl.factor(S);
        neg_ += ldl.negative_count();
        if (ldl.nearly_singular()) nearly_singular_ = true;
        ldl.inverse(inv_[static_cast<size_t>(j)]);
    }
}

void BlockFactor::solve(cplx* b) const {
    const int M = M_;
    std::vector<cplx> t(static_cast<size_t>(M));
    // forward: z_j = b_j - beta * inv_{j-1} z_{j-1}
    for (int j = 1; j < Nx_; ++j) {
        la::matvec(inv_[static_cast<size_t>(j - 1)], b + static_cast<std::int64_t>(j - 1) * M, t.data());
        cplx* bj = b + static_cast<std::int64_t>(j) * M;
        for (int a = 0; a < M; ++a) bj[a] -= beta_ * t[a];
    }
    // backward: x_j = inv_j (z_j - beta x_{j+1})
    la::matvec(inv_[static_cast<size_t>(Nx_ - 1)], b + static_cast<std::int64_t>(Nx_ - 1) * M, t.data());
    std::copy(t.begin(), t.end(), b + static_cast<std::int64_t>(Nx_ - 1) * M);
    for (int j = Nx_ - 2; j >= 0; --j) {
        cplx* bj = b + static_cast<std::int64_t>(j) * M;
        const cplx* xj1 = b + static_cast<std::int64_t>(j + 1) * M;
        for (int a = 0; a < M; ++a) t[a] = bj[a] - beta_ * xj1[a];
        la::matvec(inv_[static_cast<size_t>(j)], t.data(), bj);
    }
}

long spectrum_count_below(const ops::BlockOperator& op, double sigma) {
    // k-diagonal operators: Sturm counts per momentum block
    if (op.k_diagonal()) {
        const auto& mb = *op.basis;
        long total = 0;
        const int Nk = mb.Nk();
        std::vector<long> counts(static_cast<size_t>(Nk), 0);
        par::parallel_for(Nk, [&](std::int64_t ik) {
            std::vector<double> d = op.diag[static_cast<size_t>(ik)];
            for (auto& v : d) v += op.shift;
            std::vector<double> e(d.size(), op.offdiag);
            counts[static_cast<size_t>(ik)] = la::sturm_count(d, e, sigma);
        });
        for (long c : counts) total += c;
        return total;
    }
    BlockFactor f(op, sigma);
    return f.negatives();
}

// ---------------- windowed solves ----------------

namespace {

// per-momentum path for operators with no inter-momentum coupling
SpectrumWindow window_kdiag(const ops::BlockOperator& op, double lo, double hi,
                            const WindowOptions& opt) {
    const auto& mb = *op.basis;
    const int Nk = mb.Nk();
    const int Nx = mb.grid.Nx;
    SpectrumWindow w;
    w.lo = lo;
    w.hi = hi;
    std::vector<std::vector<EigenPair>> per_k(static_cast<size_t>(Nk));
    std::vector<long> counts(static_cast<size_t>(Nk), 0);
    par::parallel_for(Nk, [&](std::int64_t iki) {
        const int ik = static_cast<int>(iki);
        std::vector<double> d = op.diag[static_cast<size_t>(ik)];
        for (auto& v : d) v += op.shift;
        std::vector<double> e(d.size(), op.offdiag);
        counts[static_cast<size_t>(iki)] =
            la::sturm_count(d, e, hi) - la::sturm_count(d, e, lo);
        auto evs = la::tridiag_eigs_window(d, e, lo, hi, 1e-13);
        for (double E : evs) {
            auto v = la::tridiag_eigvec(d, e, E);
            EigenPair p;
            p.E = E;
            p.vec.assign(static_cast<size_t>(op.dim()), cplx(0.0));
            double res = 0.0;
            for (int j = 0; j < Nx; ++j) p.vec[static_cast<size_t>(mb.index(j, ik))] = v[static_cast<size_t>(j)];
            // residual within the tridiagonal block
            for (int j = 0; j < Nx; ++j) {
                double s = (d[static_cast<size_t>(j)] - E) * v[static_cast<size_t>(j)];
                if (j > 0) s += op.offdiag * v[static_cast<size_t>(j - 1)];
                if (j + 1 < Nx) s += op.offdiag * v[static_cast<size_t>(j + 1)];
                res += s * s;
            }
            p.residual = std::sqrt(res);
            per_k[static_cast<size_t>(iki)].push_back(std::move(p));
        }
    });
    for (auto& v : per_k)
        for (auto& p : v) w.pairs.push_back(std::move(p));
    std::sort(w.pairs.begin(), w.pairs.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.E < b.E; });
    for (long c : counts) w.certified_count += c;
    (void)opt;
    return w;
}

struct LanczosResult {
    std::vector<EigenPair> pairs;
};

// shift-invert Lanczos with full reorthogonalization around sigma; the
// Krylov space is kept orthogonal to `deflate` so repeat visits can dig out
// degenerate partners
LanczosResult lanczos_at_shift(const ops::BlockOperator& op, const BlockFactor& fac,
                               double lo, double hi, int want, const WindowOptions& opt,
                               const std::vector<const std::vector<cplx>*>& deflate,
                               std::uint64_t salt) {
    const std::int64_t n = op.dim();
    const double sigma = fac.sigma();
    const double scale = op.norm_estimate();
    const int m_max = static_cast<int>(std::min<std::int64_t>(
        n, std::max(80, 4 * want + 40)));

    std::vector<std::vector<cplx>> V;
    V.reserve(static_cast<size_t>(m_max) + 1);
    std::vector<double> alpha, beta;

    auto project_out = [&](std::vector<cplx>& w) {
        for (const auto* qp : deflate) {
            const auto& q = *qp;
            cplx ov(0.0);
            for (std::int64_t i = 0; i < n; ++i) ov += std::conj(q[static_cast<size_t>(i)]) * w[static_cast<size_t>(i)];
            if (std::abs(ov) == 0.0) continue;
            for (std::int64_t i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= ov * q[static_cast<size_t>(i)];
        }
    };

    // deterministic start vector
    rng::Stream rs(rng::derive_seed(0x9E3779B97F4A7C15ull ^ salt,
                                    static_cast<std::uint64_t>(n) ^
                                        static_cast<std::uint64_t>(std::llround(sigma * 1e6))));
    std::vector<cplx> v(static_cast<size_t>(n));
    for (auto& x : v) x = cplx(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0));
    project_out(v);
    double nrm = 0.0;
    for (auto& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    for (auto& x : v) x /= nrm;
    V.push_back(v);

    std::vector<cplx> w(static_cast<size_t>(n));
    LanczosResult result;

    for (int it = 0; it < m_max; ++it) {
        w = V.back();
        fac.solve(w.data());
        // alpha_it = <v_it, w>
        cplx a(0.0);
        for (std::int64_t i = 0; i < n; ++i) a += std::conj(V.back()[static_cast<size_t>(i)]) * w[static_cast<size_t>(i)];
        alpha.push_back(a.real());
        // w -= alpha v_it + beta v_{it-1}; then full reorthogonalization
        for (std::int64_t i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= a.real() * V.back()[static_cast<size_t>(i)];
        if (it > 0)
            for (std::int64_t i = 0; i < n; ++i)
                w[static_cast<size_t>(i)] -= beta.back() * V[V.size() - 2][static_cast<size_t>(i)];
        for (int pass = 0; pass < 2; ++pass) {
            project_out(w);
            for (const auto& q : V) {
                cplx ov(0.0);
                for (std::int64_t i = 0; i < n; ++i) ov += std::conj(q[static_cast<size_t>(i)]) * w[static_cast<size_t>(i)];
                if (std::abs(ov) == 0.0) continue;
                for (std::int64_t i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= ov * q[static_cast<size_t>(i)];
            }
        }
        double b = 0.0;
        for (const auto& x : w) b += std::norm(x);
        b = std::sqrt(b);
        const bool breakdown = (b < 1e-13);
        const bool last = (it == m_max - 1) || breakdown;
        const bool check = last || ((it + 1) % 10 == 0 && it >= 2 * std::max(1, want) - 1);

        if (check) {
            const int m = static_cast<int>(alpha.size());
            std::vector<double> td(alpha.begin(), alpha.end());
            std::vector<double> te(static_cast<size_t>(m), 0.0);
            for (int i = 1; i < m; ++i) te[static_cast<size_t>(i)] = beta[static_cast<size_t>(i - 1)];
            std::vector<double> z(static_cast<size_t>(m) * m, 0.0);
            for (int i = 0; i < m; ++i) z[static_cast<size_t>(i) * m + i] = 1.0;
            std::vector<double> td2 = td, te2 = te;
            la::tqli(td2, te2, m, &z);

            // count converged Ritz values mapping into [lo, hi]
            int converged_in = 0;
            bool all_ok = true;
            for (int r = 0; r < m; ++r) {
                const double theta = td2[static_cast<size_t>(r)];
                if (std::abs(theta) < 1e-14) continue;
                const double E = sigma + 1.0 / theta;
                if (E < lo || E >= hi) continue;
                const double rr = b * std::abs(z[static_cast<size_t>(m - 1) * m + r]);
                const double eres = rr / (theta * theta);  // first-order E-space residual
                if (eres <= 0.25 * opt.tol * scale) ++converged_in;
                else all_ok = false;
            }
            if ((converged_in >= want && all_ok) || last) {
                // assemble Ritz vectors for window eigenvalues
                for (int r = 0; r < m; ++r) {
                    const double theta = td2[static_cast<size_t>(r)];
                    if (std::abs(theta) < 1e-14) continue;
                    const double E = sigma + 1.0 / theta;
                    if (E < lo || E >= hi) continue;
                    EigenPair p;
                    p.E = E;
                    p.vec.assign(static_cast<size_t>(n), cplx(0.0));
                    for (int q = 0; q < m; ++q) {
                        const double zq = z[static_cast<size_t>(q) * m + r];
                        if (zq == 0.0) continue;
                        const auto& col = V[static_cast<size_t>(q)];
                        for (std::int64_t i = 0; i < n; ++i)
                            p.vec[static_cast<size_t>(i)] += zq * col[static_cast<size_t>(i)];
                    }
                    double pn = 0.0;
                    for (const auto& x : p.vec) pn += std::norm(x);
                    pn = std::sqrt(pn);
                    for (auto& x : p.vec) x /= pn;
                    result.pairs.push_back(std::move(p));
                }
                return result;
            }
        }
        if (breakdown) break;
        beta.push_back(b);
        for (auto& x : w) x /= b;
        V.push_back(w);
    }
    return result;
}

void refine_and_filter(const ops::BlockOperator& op, std::vector<EigenPair>& pairs,
                       double lo, double hi, const WindowOptions& opt) {
    const std::int64_t n = op.dim();
    const double scale = op.norm_estimate();
    std::vector<EigenPair> keep;
    for (auto& p : pairs) {
        // Rayleigh quotient polish + true residual
        std::vector<cplx> y(static_cast<size_t>(n));
        op.matvec(p.vec.data(), y.data());
        cplx rq(0.0);
        for (std::int64_t i = 0; i < n; ++i) rq += std::conj(p.vec[static_cast<size_t>(i)]) * y[static_cast<size_t>(i)];
        p.E = rq.real();
        double r = 0.0;
        for (std::int64_t i = 0; i < n; ++i) r += std::norm(y[static_cast<size_t>(i)] - p.E * p.vec[static_cast<size_t>(i)]);
        p.residual = std::sqrt(r);
        if (p.E < lo || p.E >= hi) continue;
        if (p.residual > opt.tol * scale) continue;
        // duplicate check against kept pairs
        bool dup = false;
        for (const auto& q : keep) {
            if (std::abs(q.E - p.E) > 1e-8 * std::max(1.0, scale)) continue;
            cplx ov(0.0);
            for (std::int64_t i = 0; i < n; ++i) ov += std::conj(q.vec[static_cast<size_t>(i)]) * p.vec[static_cast<size_t>(i)];
            if (std::abs(ov) > 0.5) { dup = true; break; }
        }
        if (!dup) keep.push_back(std::move(p));
    }
    pairs = std::move(keep);
}

} // namespace

SpectrumWindow eig_window(const ops::BlockOperator& op, double lo, double hi,
                          const WindowOptions& opt) {
    if (!(hi > lo)) throw std::invalid_argument("eig_window: empty window");
    if (op.k_diagonal()) return window_kdiag(op, lo, hi, opt);

    SpectrumWindow w;
    w.lo = lo;
    w.hi = hi;

    const double scale = op.norm_estimate();
    auto make_factor = [&](double sigma) {
        double s = sigma;
        for (int t = 0; t <= opt.max_retries; ++t) {
            BlockFactor f(op, s);
            if (!f.nearly_singular()) return f;
            s += (t + 1) * 1e-7 * std::max(1.0, scale);  // nudge off the spectrum
        }
        throw std::runtime_error("eig_window: factorization singular after retries");
    };

    BlockFactor flo = make_factor(lo);
    BlockFactor fhi = make_factor(hi);
    const long total = fhi.negatives() - flo.negatives();
    w.certified_count = total;
    if (total == 0) return w;

    struct Task {
        double a, b;
        long na, nb;  // inertia at the endpoints
        int depth;
    };
    std::vector<Task> stack{{lo, hi, flo.negatives(), fhi.negatives(), 0}};
    std::vector<EigenPair> found;

    while (!stack.empty()) {
        Task t = stack.back();
        stack.pop_back();
        const long expect = t.nb - t.na;
        if (expect <= 0) continue;
        if (t.depth > opt.max_depth)
            throw std::runtime_error("eig_window: missed eigenvalues (bisection depth cap)");

        const double sigma = 0.5 * (t.a + t.b);
        BlockFactor f = make_factor(sigma);
        std::vector<const std::vector<cplx>*> deflate;
        for (const auto& q : found)
            if (q.E >= t.a && q.E < t.b) deflate.push_back(&q.vec);
        auto res = lanczos_at_shift(op, f, t.a, t.b, static_cast<int>(expect - deflate.size()),
                                    opt, deflate, static_cast<std::uint64_t>(t.depth));
        refine_and_filter(op, res.pairs, t.a, t.b, opt);

        // de-duplicate against the global list, then count per half
        for (auto& p : res.pairs) {
            bool dup = false;
            for (const auto& q : found) {
                if (std::abs(q.E - p.E) > 1e-8 * std::max(1.0, scale)) continue;
                cplx ov(0.0);
                for (size_t i = 0; i < q.vec.size(); ++i) ov += std::conj(q.vec[i]) * p.vec[i];
                if (std::abs(ov) > 0.5) { dup = true; break; }
            }
            if (!dup) found.push_back(std::move(p));
        }
        long have = 0;
        for (const auto& p : found)
            if (p.E >= t.a && p.E < t.b) ++have;
        if (have < expect) {
            const long nmid = f.negatives();
            stack.push_back({t.a, sigma, t.na, nmid, t.depth + 1});
            stack.push_back({sigma, t.b, nmid, t.nb, t.depth + 1});
        }
    }

    std::sort(found.begin(), found.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.E < b.E; });
    if (static_cast<long>(found.size()) != total)
        throw std::runtime_error("eig_window: certificate count mismatch after slicing");
    w.pairs = std::move(found);
    return w;
}

} // namespace qhc::eig
