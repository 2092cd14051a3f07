#pragma once

#include <complex>
#include <vector>
#include <cstdint>
#include <stdexcept>

namespace qhc::la {

using cplx = std::complex<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }
    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }
    cplx* row(int i) { return a_.data() + static_cast<size_t>(i) * c_; }
    const cplx* row(int i) const { return a_.data() + static_cast<size_t>(i) * c_; }

    void set_zero() { std::fill(a_.begin(), a_.end(), cplx(0.0)); }

private:
    int r_ = 0, c_ = 0;
    std::vector<cplx> a_;
};

// y = A x
void matvec(const Matrix& A, const cplx* x, cplx* y);
// C = A^H A  (A is m x n, C is n x n)
Matrix adjoint_times_self(const Matrix& A);

double max_hermiticity_defect(const Matrix& A);

// Hermitian indefinite factorization P A P^T = L D L^H with Bunch-Kaufman
// partial pivoting. D has 1x1 and 2x2 blocks; each 2x2 block is indefinite,
// so the inertia of A is read off the blocks (Sylvester).
class HermitianLDL {
public:
    void factor(const Matrix& A);
    void solve(cplx* b) const;            // in-place, one RHS
    void solve_many(Matrix& B) const;     // in-place, B is n x m (columns = RHS)
    // inverse of A written into `out` (n x n), Hermitian
    void inverse(Matrix& out) const;

    int n() const { return n_; }
    int negative_count() const { return neg_; }
    int zero_count() const { return zero_; }
    bool nearly_singular() const { return nearly_singular_; }
    double min_pivot_magnitude() const { return min_pivot_; }

private:
    Matrix f_;                 // factors, lower triangle of permuted matrix
    std::vector<int> ipiv_;    // LAPACK-style pivot record
    int n_ = 0;
    int neg_ = 0, zero_ = 0;
    bool nearly_singular_ = false;
    double min_pivot_ = 0.0;
};

// ---- real symmetric dense/tridiagonal kernels ----

// Householder reduction of a real symmetric matrix (row-major, n x n in `a`)
// to tridiagonal form; `a` is overwritten with the accumulated orthogonal
// transform Q (columns are the basis change), d/e receive the tridiagonal.
void tred2(std::vector<double>& a, int n, std::vector<double>& d, std::vector<double>& e);

// Implicit-shift QL for a symmetric tridiagonal matrix. d = diagonal,
// e = subdiagonal (e[0] unused). If z != nullptr it must hold the n x n
// transform from tred2 (or identity) and is updated so its columns become
// eigenvectors. Eigenvalues land in d, unsorted.
void tqli(std::vector<double>& d, std::vector<double>& e, int n, std::vector<double>* z);

// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x);

// All eigenvalues of (d, e) in [lo, hi] by bisection, ascending.
std::vector<double> tridiag_eigs_window(const std::vector<double>& d,
                                        const std::vector<double>& e,
                                        double lo, double hi, double tol);

// k-th smallest eigenvalue (k is 0-based) by bisection.
double tridiag_eig_kth(const std::vector<double>& d, const std::vector<double>& e,
                       int k, double tol);

// Eigenvector of the tridiagonal for an isolated eigenvalue lambda, by inverse
// iteration with a partially pivoted tridiagonal solve. Returns unit vector.
std::vector<double> tridiag_eigvec(const std::vector<double>& d, const std::vector<double>& e,
                                   double lambda);

} // namespace qhc::la
