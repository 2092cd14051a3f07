#include <doctest.h>

#include "qhc/eigensolve.hpp"
#include "qhc/linalg.hpp"
#include "qhc/rng.hpp"

#include <cmath>

using namespace qhc;
using la::cplx;

namespace {

la::Matrix random_hermitian(int n, unsigned seed) {
    rng::Stream rs(seed);
    la::Matrix A(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = rs.uniform(-2.0, 2.0);
        for (int j = 0; j < i; ++j) {
            cplx v(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0));
            A(i, j) = v;
            A(j, i) = std::conj(v);
        }
    }
    return A;
}

} // namespace

TEST_CASE("tred2/tqli reproduce a symmetric eigendecomposition") {
    const int n = 60;
    rng::Stream rs(7);
    std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = rs.uniform(-1.0, 1.0);
            A[static_cast<size_t>(i) * n + j] = v;
            A[static_cast<size_t>(j) * n + i] = v;
        }
    std::vector<double> evals, vecs;
    eig::eig_real_symmetric(A, n, evals, &vecs);

    double trace = 0.0, esum = 0.0;
    for (int i = 0; i < n; ++i) {
        trace += A[static_cast<size_t>(i) * n + i];
        esum += evals[static_cast<size_t>(i)];
    }
    CHECK(std::abs(trace - esum) < 1e-10 * n);

    // residual ||A v - lambda v|| for a few columns
    for (int c = 0; c < n; c += 13) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                s += A[static_cast<size_t>(i) * n + j] * vecs[static_cast<size_t>(j) * n + c];
            s -= evals[static_cast<size_t>(c)] * vecs[static_cast<size_t>(i) * n + c];
            r2 += s * s;
        }
        CHECK(std::sqrt(r2) < 1e-10 * n);
    }
    for (int i = 1; i < n; ++i) CHECK(evals[static_cast<size_t>(i)] >= evals[static_cast<size_t>(i - 1)]);
}

TEST_CASE("Sturm counts and bisection match the discrete Laplacian spectrum") {
    const int n = 40;
    std::vector<double> d(static_cast<size_t>(n), 2.0), e(static_cast<size_t>(n), -1.0);
    // eigenvalues 2 - 2 cos(k pi / (n+1))
    std::vector<double> exact;
    for (int k = 1; k <= n; ++k)
        exact.push_back(2.0 - 2.0 * std::cos(k * 3.14159265358979323846 / (n + 1)));
    CHECK(la::sturm_count(d, e, 2.0) == n / 2);
    for (int k = 0; k < n; k += 7) {
        const double lam = la::tridiag_eig_kth(d, e, k, 1e-13);
        CHECK(lam == doctest::Approx(exact[static_cast<size_t>(k)]).epsilon(1e-11));
        auto v = la::tridiag_eigvec(d, e, lam);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = (d[static_cast<size_t>(i)] - lam) * v[static_cast<size_t>(i)];
            if (i > 0) s += e[static_cast<size_t>(i)] * v[static_cast<size_t>(i - 1)];
            if (i + 1 < n) s += e[static_cast<size_t>(i + 1)] * v[static_cast<size_t>(i + 1)];
            r2 += s * s;
        }
        CHECK(std::sqrt(r2) < 1e-10);
    }
    auto window = la::tridiag_eigs_window(d, e, 1.0, 3.0, 1e-12);
    int expect = 0;
    for (double x : exact)
        if (x >= 1.0 && x <= 3.0) ++expect;
    CHECK(static_cast<int>(window.size()) == expect);
}

TEST_CASE("Bunch-Kaufman LDL^H solves and counts inertia") {
    for (unsigned seed : {11u, 12u, 13u}) {
        const int n = 50;
        la::Matrix A = random_hermitian(n, seed);
        la::HermitianLDL f;
        f.factor(A);

        // solve residual
        rng::Stream rs(seed + 100);
        std::vector<cplx> b(static_cast<size_t>(n)), x;
        for (auto& v : b) v = cplx(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0));
        x = b;
        f.solve(x.data());
        std::vector<cplx> Ax(static_cast<size_t>(n));
        la::matvec(A, x.data(), Ax.data());
        double r2 = 0.0, b2 = 0.0;
        for (int i = 0; i < n; ++i) {
            r2 += std::norm(Ax[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]);
            b2 += std::norm(b[static_cast<size_t>(i)]);
        }
        CHECK(std::sqrt(r2 / b2) < 1e-11);

        // inertia against the dense eigenvalues
        auto pairs = eig::eig_dense(A);
        int neg = 0;
        for (const auto& p : pairs)
            if (p.E < 0.0) ++neg;
        CHECK(f.negative_count() == neg);

        // inverse really inverts
        la::Matrix inv;
        f.inverse(inv);
        std::vector<cplx> y(static_cast<size_t>(n));
        la::matvec(inv, b.data(), y.data());
        la::matvec(A, y.data(), Ax.data());
        r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += std::norm(Ax[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]);
        CHECK(std::sqrt(r2 / b2) < 1e-10);
    }
}

TEST_CASE("LDL^H flags near-singular input") {
    la::Matrix A(2, 2);
    A(0, 0) = 1.0;
    A(0, 1) = 1.0;
    A(1, 0) = 1.0;
    A(1, 1) = 1.0;  // rank deficient
    la::HermitianLDL f;
    f.factor(A);
    CHECK(f.nearly_singular());
}
