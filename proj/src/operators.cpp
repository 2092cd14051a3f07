#include "qhc/operators.hpp"
#include "qhc/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qhc::ops {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

// 16-point Gauss-Legendre nodes/weights on [0, 1]
const double kGLx[16] = {
    0.0052995325041750337019, 0.0277124884633836999632, 0.0671843988060841224019,
    0.1222977958224984867952, 0.1910618777986781147149, 0.2709916111713862897776,
    0.3591982246103705422868, 0.4524937450811812866824, 0.5475062549188187133176,
    0.6408017753896294577132, 0.7290083888286137102224, 0.8089381222013218852851,
    0.8777022041775015132048, 0.9328156011939158775981, 0.9722875115366163000368,
    0.9947004674958249662981};
const double kGLw[16] = {
    0.0135762297058770482066, 0.0311267619693239468159, 0.0475792558412463928441,
    0.0623144856277669384470, 0.0747979944082883679845, 0.0845782596975012679330,
    0.0913017075224617918882, 0.0947253052275342510846, 0.0947253052275342510846,
    0.0913017075224617918882, 0.0845782596975012679330, 0.0747979944082883679845,
    0.0623144856277669384470, 0.0475792558412463928441, 0.0311267619693239468159,
    0.0135762297058770482066};

// bump column integral: 2 * int_0^{umax} V0 (1 - 16(d^2+u^2))^3 cos(q u) du
double bump_column_integral(double V0, double d, double q) {
    const double r2max = model::BumpProfile::radius * model::BumpProfile::radius;
    const double a2 = r2max - d * d;
    if (a2 <= 0.0) return 0.0;
    const double umax = std::sqrt(a2);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double u = umax * kGLx[i];
        const double w = 1.0 - 16.0 * (d * d + u * u);
        s += kGLw[i] * w * w * w * std::cos(q * u);
    }
    return 2.0 * V0 * umax * s;
}

} // namespace

std::string label_name(Label l) {
    switch (l) {
        case Label::H0: return "H0";
        case Label::Hb: return "Hb";
        case Label::Hl: return "Hl";
        case Label::Hr: return "Hr";
        case Label::Hfull: return "Hfull";
        case Label::Vy: return "Vy";
    }
    return "?";
}

std::shared_ptr<const PotentialFourier>
PotentialFourier::build(const model::ModelParams& p, const model::DisorderRealization& r,
                        const basis::MixedBasis& mb) {
    if (r.L != p.L) throw std::invalid_argument("PotentialFourier: realization/params L mismatch");
    auto pf = std::make_shared<PotentialFourier>();
    pf->Nk_ = mb.Nk();
    pf->Nx_ = mb.grid.Nx;
    pf->table_.assign(static_cast<size_t>(2 * pf->Nk_ - 1) * pf->Nx_, cplx(0.0));
    pf->colsum_.assign(static_cast<size_t>(pf->Nx_), 0.0);
    const auto& g = mb.grid;

    if (g.hx > 2.0 * model::BumpProfile::radius)
        throw std::invalid_argument("PotentialFourier: bump unresolved by the grid (radius < 2 hx)");

    // columns j touched by site column n: |x_j - n| < radius
    const int Nk = pf->Nk_;
    // dq >= 0 computed by quadrature; negative mirror by conjugation
    par::parallel_for(Nk, [&](std::int64_t dqi) {
        const int dq = static_cast<int>(dqi);
        const double q = kTwoPi * dq / p.L;
        for (size_t s = 0; s < r.sites.size(); ++s) {
            const auto [n, m] = r.sites[s];
            const double X = r.couplings[s];
            const int j_lo = std::max(0, static_cast<int>(std::ceil((n - model::BumpProfile::radius - g.x_min) / g.hx)));
            const int j_hi = std::min(g.Nx - 1, static_cast<int>(std::floor((n + model::BumpProfile::radius - g.x_min) / g.hx)));
            const cplx phase = std::polar(1.0, -q * m);
            for (int j = j_lo; j <= j_hi; ++j) {
                const double d = g.x(j) - n;
                const double I = bump_column_integral(p.V0, d, q);
                if (I == 0.0) continue;
                pf->table_[static_cast<size_t>(dq + Nk - 1) * pf->Nx_ + j] += (X / p.L) * I * phase;
            }
        }
    });
    for (int dq = 1; dq < Nk; ++dq)
        for (int j = 0; j < pf->Nx_; ++j)
            pf->table_[static_cast<size_t>(-dq + Nk - 1) * pf->Nx_ + j] =
                std::conj(pf->table_[static_cast<size_t>(dq + Nk - 1) * pf->Nx_ + j]);
    for (int j = 0; j < pf->Nx_; ++j) {
        double s = 0.0;
        for (int dq = -(Nk - 1); dq <= Nk - 1; ++dq)
            s += std::abs(pf->c(dq, j));
        pf->colsum_[static_cast<size_t>(j)] = s;
    }
    return pf;
}

namespace {

BlockOperator assemble_base(std::shared_ptr<const basis::MixedBasis> mb, Label label,
                            bool kinetic, const model::ModelParams* p, bool with_left,
                            bool with_right) {
    BlockOperator op;
    op.label = label;
    op.basis = mb;
    const auto& g = mb->grid;
    const int Nk = mb->Nk();
    op.offdiag = kinetic ? -0.5 / (g.hx * g.hx) : 0.0;
    op.diag.assign(static_cast<size_t>(Nk), std::vector<double>(static_cast<size_t>(g.Nx), 0.0));

    model::ConfiningPotential ul, ur;
    if (p) { ul = p->left(); ur = p->right(); }
    for (int ik = 0; ik < Nk; ++ik) {
        const double k = mb->k(ik);
        auto& d = op.diag[static_cast<size_t>(ik)];
        for (int j = 0; j < g.Nx; ++j) {
            const double x = g.x(j);
            double v = 0.0;
            if (kinetic) {
                const double w = k - mb->B * x;
                v = 1.0 / (g.hx * g.hx) + 0.5 * w * w;
            } else {
                v = k - mb->B * x;  // velocity observable
            }
            if (with_left) v += ul(x);
            if (with_right) v += ur(x);
            d[static_cast<size_t>(j)] = v;
        }
    }
    return op;
}

} // namespace

BlockOperator assemble_h0(std::shared_ptr<const basis::MixedBasis> mb) {
    return assemble_base(mb, Label::H0, true, nullptr, false, false);
}

BlockOperator assemble_edge(std::shared_ptr<const basis::MixedBasis> mb,
                            const model::ModelParams& p, model::Side side) {
    return assemble_base(mb, side == model::Side::left ? Label::Hl : Label::Hr, true, &p,
                         side == model::Side::left, side == model::Side::right);
}

BlockOperator assemble_hb(std::shared_ptr<const basis::MixedBasis> mb,
                          const model::ModelParams& p, const model::DisorderRealization& r) {
    BlockOperator op = assemble_base(mb, Label::Hb, true, nullptr, false, false);
    op.coupling = PotentialFourier::build(p, r, *mb);
    return op;
}

BlockOperator assemble_full(std::shared_ptr<const basis::MixedBasis> mb,
                            const model::ModelParams& p, const model::DisorderRealization& r) {
    BlockOperator op = assemble_base(mb, Label::Hfull, true, &p, true, true);
    op.coupling = PotentialFourier::build(p, r, *mb);
    return op;
}

BlockOperator assemble_vy(std::shared_ptr<const basis::MixedBasis> mb) {
    return assemble_base(mb, Label::Vy, false, nullptr, false, false);
}

cplx BlockOperator::entry(std::int64_t I, std::int64_t J) const {
    const int Nk = basis->Nk();
    const int jI = static_cast<int>(I / Nk), kI = static_cast<int>(I % Nk);
    const int jJ = static_cast<int>(J / Nk), kJ = static_cast<int>(J % Nk);
    cplx v(0.0);
    if (kI == kJ) {
        if (jI == jJ) v += diag[static_cast<size_t>(kI)][static_cast<size_t>(jI)] + shift;
        else if (std::abs(jI - jJ) == 1) v += offdiag;
    }
    if (coupling && jI == jJ) v += coupling->c(kI - kJ, jI);
    return v;
}

void BlockOperator::matvec(const cplx* x, cplx* y) const {
    const int Nk = basis->Nk();
    const int Nx = basis->grid.Nx;
    par::parallel_for(Nx, [&](std::int64_t jj) {
        const int j = static_cast<int>(jj);
        const cplx* xj = x + static_cast<std::int64_t>(j) * Nk;
        cplx* yj = y + static_cast<std::int64_t>(j) * Nk;
        for (int a = 0; a < Nk; ++a) {
            cplx s = (diag[static_cast<size_t>(a)][static_cast<size_t>(j)] + shift) * xj[a];
            if (offdiag != 0.0) {
                if (j > 0) s += offdiag * x[static_cast<std::int64_t>(j - 1) * Nk + a];
                if (j + 1 < Nx) s += offdiag * x[static_cast<std::int64_t>(j + 1) * Nk + a];
            }
            yj[a] = s;
        }
        if (coupling && coupling->column_abs_sum(j) > 0.0) {
            for (int a = 0; a < Nk; ++a) {
                cplx s(0.0);
                for (int b = 0; b < Nk; ++b) s += coupling->c(a - b, j) * xj[b];
                yj[a] += s;
            }
        }
    });
}

double BlockOperator::norm_estimate() const {
    const int Nk = basis->Nk();
    const int Nx = basis->grid.Nx;
    double worst = 0.0;
    for (int j = 0; j < Nx; ++j) {
        double col = coupling ? coupling->column_abs_sum(j) : 0.0;
        for (int a = 0; a < Nk; ++a) {
            double row = std::abs(diag[static_cast<size_t>(a)][static_cast<size_t>(j)] + shift) +
                         2.0 * std::abs(offdiag) + col;
            worst = std::max(worst, row);
        }
    }
    return worst;
}

la::Matrix BlockOperator::dense() const {
    const std::int64_t n = dim();
    if (n > 20000) throw std::length_error("BlockOperator::dense: dimension too large");
    la::Matrix H(static_cast<int>(n), static_cast<int>(n));
    H.set_zero();
    const int Nk = basis->Nk();
    const int Nx = basis->grid.Nx;
    for (int j = 0; j < Nx; ++j) {
        for (int a = 0; a < Nk; ++a) {
            const std::int64_t I = static_cast<std::int64_t>(j) * Nk + a;
            H(static_cast<int>(I), static_cast<int>(I)) =
                diag[static_cast<size_t>(a)][static_cast<size_t>(j)] + shift;
            if (offdiag != 0.0 && j + 1 < Nx) {
                const std::int64_t J = static_cast<std::int64_t>(j + 1) * Nk + a;
                H(static_cast<int>(I), static_cast<int>(J)) = offdiag;
                H(static_cast<int>(J), static_cast<int>(I)) = offdiag;
            }
            if (coupling) {
                for (int b = 0; b < Nk; ++b) {
                    if (a == b) continue;
                    const std::int64_t J = static_cast<std::int64_t>(j) * Nk + b;
                    H(static_cast<int>(I), static_cast<int>(J)) += coupling->c(a - b, j);
                }
                H(static_cast<int>(I), static_cast<int>(I)) += coupling->c(0, j);
            }
        }
    }
    return H;
}

la::Matrix project_to_band(const BlockOperator& op, const basis::BandBasis& band) {
    if (band.mixed.get() != op.basis.get())
        throw std::invalid_argument("project_to_band: operator and band basis disagree");
    const int nb = band.size();
    const int Nx = op.basis->grid.Nx;
    la::Matrix P(nb, nb);
    P.set_zero();
    par::parallel_for(nb, [&](std::int64_t ii) {
        const int i = static_cast<int>(ii);
        const int ka = band.k_index[static_cast<size_t>(i)];
        const auto& pa = band.orbital[static_cast<size_t>(i)];
        // diagonal: tridiagonal quadratic form in x
        double dsum = 0.0;
        const auto& dk = op.diag[static_cast<size_t>(ka)];
        for (int j = 0; j < Nx; ++j) {
            dsum += (dk[static_cast<size_t>(j)] + op.shift) * pa[static_cast<size_t>(j)] * pa[static_cast<size_t>(j)];
            if (op.offdiag != 0.0 && j + 1 < Nx)
                dsum += 2.0 * op.offdiag * pa[static_cast<size_t>(j)] * pa[static_cast<size_t>(j + 1)];
        }
        P(i, i) += dsum;
        if (op.coupling) {
            for (int l = 0; l < nb; ++l) {
                const int kb = band.k_index[static_cast<size_t>(l)];
                const auto& pb = band.orbital[static_cast<size_t>(l)];
                cplx s(0.0);
                for (int j = 0; j < Nx; ++j) {
                    if (op.coupling->column_abs_sum(j) == 0.0) continue;
                    s += pa[static_cast<size_t>(j)] * op.coupling->c(ka - kb, j) * pb[static_cast<size_t>(j)];
                }
                P(i, l) += s;
            }
        }
    });
    return P;
}

void export_binary(const BlockOperator& op, const std::string& path) {
    la::Matrix H = op.dense();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("export_binary: cannot open " + path);
    const std::int64_t n = H.rows();
    std::fwrite(&n, sizeof(n), 1, f);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double re = H(i, j).real(), im = H(i, j).imag();
            std::fwrite(&re, sizeof(double), 1, f);
            std::fwrite(&im, sizeof(double), 1, f);
        }
    }
    std::fclose(f);
}

} // namespace qhc::ops
