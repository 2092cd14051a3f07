#pragma once

#include "qhc/basis.hpp"
#include "qhc/linalg.hpp"
#include "qhc/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qhc::ops {

using la::cplx;

enum class Label { H0, Hb, Hl, Hr, Hfull, Vy };

std::string label_name(Label l);

// y-Fourier coefficients of the random potential, sampled on the x-grid:
// block(k, k') of the multiplication operator is diag_j c_{k-k'}(x_j).
// Hermiticity (c_{-q} = conj c_q) is enforced exactly at build time.
class PotentialFourier {
public:
    static std::shared_ptr<const PotentialFourier>
    build(const model::ModelParams& p, const model::DisorderRealization& r,
          const basis::MixedBasis& mb);

    const cplx& c(int dq, int j) const {
        return table_[static_cast<size_t>(dq + Nk_ - 1) * Nx_ + j];
    }
    int nk() const { return Nk_; }
    double column_abs_sum(int j) const { return colsum_[static_cast<size_t>(j)]; }

private:
    int Nk_ = 0, Nx_ = 0;
    std::vector<cplx> table_;     // (2 Nk - 1) x Nx
    std::vector<double> colsum_;  // sum_q |c_q(x_j)| per grid column
};

// Hermitian operator on the mixed basis, stored structurally: per-momentum
// real diagonals, a constant kinetic off-diagonal scalar, and (optionally)
// the inter-momentum coupling table from the random potential.
struct BlockOperator {
    Label label = Label::H0;
    std::shared_ptr<const basis::MixedBasis> basis;
    std::vector<std::vector<double>> diag;  // [Nk][Nx]
    double offdiag = 0.0;                   // x-neighbor coupling (0 for Vy)
    std::shared_ptr<const PotentialFourier> coupling;  // null if block-diagonal in k
    double shift = 0.0;                     // scalar multiple of the identity

    std::int64_t dim() const { return basis->dim(); }
    bool k_diagonal() const { return coupling == nullptr; }

    cplx entry(std::int64_t I, std::int64_t J) const;  // j-major indices
    void matvec(const cplx* x, cplx* y) const;
    double norm_estimate() const;  // Gershgorin upper bound
    la::Matrix dense() const;

    BlockOperator shifted(double c) const {
        BlockOperator r = *this;
        r.shift += c;
        return r;
    }
};

BlockOperator assemble_h0(std::shared_ptr<const basis::MixedBasis> mb);
BlockOperator assemble_edge(std::shared_ptr<const basis::MixedBasis> mb,
                            const model::ModelParams& p, model::Side side);
BlockOperator assemble_hb(std::shared_ptr<const basis::MixedBasis> mb,
                          const model::ModelParams& p, const model::DisorderRealization& r);
BlockOperator assemble_full(std::shared_ptr<const basis::MixedBasis> mb,
                            const model::ModelParams& p, const model::DisorderRealization& r);
BlockOperator assemble_vy(std::shared_ptr<const basis::MixedBasis> mb);

// <phi_k | op | phi_k'> on the lowest-Landau family (fast mode)
la::Matrix project_to_band(const BlockOperator& op, const basis::BandBasis& band);

// documented binary layout: int64 dim, then row-major upper triangle
// (re, im) doubles of the dense operator
void export_binary(const BlockOperator& op, const std::string& path);

} // namespace qhc::ops
