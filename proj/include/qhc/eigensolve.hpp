#pragma once

#include "qhc/linalg.hpp"
#include "qhc/operators.hpp"

#include <vector>

namespace qhc::eig {

using la::cplx;

struct EigenPair {
    double E = 0.0;
    std::vector<cplx> vec;   // unit l2 norm on the operator's basis
    double residual = 0.0;   // ||H psi - E psi||
};

struct SpectrumWindow {
    double lo = 0.0, hi = 0.0;
    std::vector<EigenPair> pairs;   // ascending in E
    long certified_count = 0;       // inertia(hi) - inertia(lo)
    bool complete() const { return certified_count == static_cast<long>(pairs.size()); }
};

// ---- dense Hermitian path ----
//
// Complex Hermitian input is solved through the real-symmetric doubling
// embedding [[Re, -Im], [Im, Re]] (Householder tridiagonalization + implicit
// shift QL); the exactly doubled spectrum is reduced by discarding the
// J(u) = (-Im u, Re u) partner of each accepted vector, and the survivor's
// phase is fixed by making its first significant coefficient real positive.
std::vector<EigenPair> eig_dense(const la::Matrix& H, int dim_cap = 6000);

// real-symmetric dense helper used by the embedding (eigenvalues ascending,
// eigenvectors in columns of `vecs` when vecs != nullptr)
void eig_real_symmetric(const std::vector<double>& a, int n, std::vector<double>& evals,
                        std::vector<double>* vecs);

// ---- block-tridiagonal factorization of (H - sigma) with inertia ----
class BlockFactor {
public:
    BlockFactor(const ops::BlockOperator& op, double sigma);
    long negatives() const { return neg_; }   // # eigenvalues of H below sigma
    bool nearly_singular() const { return nearly_singular_; }
    void solve(cplx* b) const;                 // b := (H - sigma)^{-1} b
    double sigma() const { return sigma_; }

private:
    std::vector<la::Matrix> inv_;  // Schur complement inverses, one per grid column
    double beta_ = 0.0;            // off-block scalar
    double sigma_ = 0.0;
    int Nx_ = 0, M_ = 0;
    long neg_ = 0;
    bool nearly_singular_ = false;
};

struct WindowOptions {
    double tol = 1e-9;          // residual tolerance relative to the norm estimate
    int max_lanczos = 420;
    int max_retries = 5;        // shift perturbations on singular factorization
    int max_depth = 12;         // interval bisection depth
};

// Shift-invert Lanczos with full reorthogonalization and spectrum-slicing
// completeness certificates. Works for any BlockOperator; k-block-diagonal
// operators take the cheap per-momentum Sturm path.
SpectrumWindow eig_window(const ops::BlockOperator& op, double lo, double hi,
                          const WindowOptions& opt = {});

// inertia of (op - sigma): number of eigenvalues strictly below sigma
long spectrum_count_below(const ops::BlockOperator& op, double sigma);

} // namespace qhc::eig
