#include <doctest.h>

#include "qhc/eigensolve.hpp"
#include "qhc/operators.hpp"

#include <cmath>
#include <cstdio>

using namespace qhc;
using la::cplx;

namespace {

model::ModelParams cfgA() {
    model::ModelParams p;
    p.B = 1.0;
    p.L = 8.0;
    p.V0 = 0.2;
    p.epsilon = 0.05;
    return p;
}

model::ModelParams cfgB() {
    model::ModelParams p;
    p.B = 2.56;
    p.L = 9.0;
    p.V0 = 0.6;
    p.epsilon = 0.004;
    p.cl = p.c1 = 1.0 * p.B * p.B;
    p.cr = p.c2 = 1.3 * p.B * p.B;
    return p;
}

} // namespace

TEST_CASE("H0 reproduces the lowest Landau levels") {
    auto p = cfgA();
    auto mb = basis::build_mixed_basis(p, 16);
    auto h0 = ops::assemble_h0(mb);
    // per-momentum ground/first-excited energies via the Sturm path
    auto win = eig::eig_window(h0, 0.3 * p.B, 1.7 * p.B);
    REQUIRE(win.pairs.size() > 0);
    double e0 = win.pairs.front().E;
    CHECK(std::abs(e0 - 0.5 * p.B) < 1e-4 * p.B);
    double e1 = 0.0;
    for (const auto& pr : win.pairs)
        if (pr.E > 0.5 * p.B + 0.5) { e1 = pr.E; break; }
    CHECK(std::abs(e1 - 1.5 * p.B) < 1e-3 * p.B);
}

TEST_CASE("interior momenta give a flat lowest band") {
    auto p = cfgA();
    p.L = 12.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto h0 = ops::assemble_h0(mb);
    // ten most interior momenta
    std::vector<double> energies;
    for (int i = 0; i < mb->Nk(); ++i) {
        if (std::abs(mb->k(i) / p.B) > 2.7) continue;
        std::vector<double> d = h0.diag[static_cast<size_t>(i)];
        std::vector<double> e(d.size(), h0.offdiag);
        energies.push_back(la::tridiag_eig_kth(d, e, 0, 1e-14));
    }
    REQUIRE(energies.size() >= 10);
    double lo = energies[0], hi = energies[0];
    for (double x : energies) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(hi - lo < 1e-8 * p.B);
}

TEST_CASE("assembled operators are exactly conjugate-symmetric") {
    auto p = cfgB();
    p.L = 4.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 5);
    auto h = ops::assemble_full(mb, p, r);
    auto H = h.dense();
    CHECK(la::max_hermiticity_defect(H) == 0.0);
    // entry accessor agrees with the dense materialization
    for (std::int64_t i = 0; i < h.dim(); i += 97)
        for (std::int64_t j = 0; j < h.dim(); j += 101)
            CHECK(std::abs(h.entry(i, j) - H(static_cast<int>(i), static_cast<int>(j))) == 0.0);
}

TEST_CASE("matvec agrees with the dense operator") {
    auto p = cfgB();
    p.L = 4.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 6);
    auto h = ops::assemble_full(mb, p, r);
    auto H = h.dense();
    const std::int64_t n = h.dim();
    std::vector<cplx> x(static_cast<size_t>(n)), y1(static_cast<size_t>(n)), y2(static_cast<size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        x[static_cast<size_t>(i)] = cplx(std::sin(0.1 * static_cast<double>(i)), std::cos(0.2 * static_cast<double>(i)));
    h.matvec(x.data(), y1.data());
    la::matvec(H, x.data(), y2.data());
    double worst = 0.0;
    for (std::int64_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y1[static_cast<size_t>(i)] - y2[static_cast<size_t>(i)]));
    CHECK(worst < 1e-12 * h.norm_estimate());
}

TEST_CASE("clean full operator accumulates just above the Landau levels") {
    auto p = cfgA();
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 1);
    for (auto& c : r.couplings) c = 0.0;
    auto h = ops::assemble_full(mb, p, r);
    auto win = eig::eig_window(h, 0.5 * p.B - 0.05, 0.5 * p.B + 0.2);
    REQUIRE(win.complete());
    REQUIRE(win.pairs.size() > 4);
    for (const auto& pr : win.pairs) CHECK(pr.E >= 0.5 * p.B - 1e-6);
}

TEST_CASE("constant shift moves every eigenvalue exactly") {
    auto p = cfgB();
    p.L = 4.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 7);
    auto h = ops::assemble_full(mb, p, r);
    const double c = 0.37;
    auto win1 = eig::eig_window(h, p.window_lo(), p.window_hi());
    auto win2 = eig::eig_window(h.shifted(c), p.window_lo() + c, p.window_hi() + c);
    REQUIRE(win1.pairs.size() == win2.pairs.size());
    for (size_t i = 0; i < win1.pairs.size(); ++i)
        CHECK(std::abs(win2.pairs[i].E - win1.pairs[i].E - c) < 1e-9);
}

TEST_CASE("bulk spectrum stays in the fattened Landau bands") {
    auto p = cfgB();
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 8);
    auto hb = ops::assemble_hb(mb, p, r);
    const double tau = 10.0 * mb->grid.hx * mb->grid.hx * p.B * p.B;
    // census around the first band; drop truncation-wall artifacts
    auto win = eig::eig_window(hb, 0.5 * p.B - p.V0 - tau, 0.5 * p.B + p.V0 + tau);
    int physical = 0;
    for (const auto& pr : win.pairs) {
        if (classify::x_mass_outside(pr.vec, *mb, 0.5 * p.L + 1.0) > 0.5) continue;
        ++physical;
        CHECK(pr.E >= 0.5 * p.B - p.V0 - tau);
        CHECK(pr.E <= 0.5 * p.B + p.V0 + tau);
    }
    CHECK(physical > 0);
}

TEST_CASE("translating the impurities by one lattice unit preserves the spectrum") {
    auto p = cfgB();
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 9);
    auto rt = r;
    // shift every site by one unit in y (periodic wrap)
    const int rows = r.m_max - r.m_min + 1;
    for (auto& [n, m] : rt.sites) {
        int mm = m + 1;
        if (mm > rt.m_max) mm -= rows;
        m = mm;
    }
    auto h1 = ops::assemble_full(mb, p, r);
    auto h2 = ops::assemble_full(mb, p, rt);
    auto w1 = eig::eig_window(h1, p.window_lo(), p.window_hi());
    auto w2 = eig::eig_window(h2, p.window_lo(), p.window_hi());
    REQUIRE(w1.pairs.size() == w2.pairs.size());
    for (size_t i = 0; i < w1.pairs.size(); ++i)
        CHECK(std::abs(w1.pairs[i].E - w2.pairs[i].E) < 1e-8);
}

TEST_CASE("velocity observable on free ground states") {
    auto p = cfgA();
    p.L = 12.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto h0 = ops::assemble_h0(mb);
    for (int i = mb->Nk() / 2 - 1; i <= mb->Nk() / 2 + 1; ++i) {
        std::vector<double> d = h0.diag[static_cast<size_t>(i)];
        std::vector<double> e(d.size(), h0.offdiag);
        const double E0 = la::tridiag_eig_kth(d, e, 0, 1e-14);
        auto v = la::tridiag_eigvec(d, e, E0);
        double J = 0.0;
        for (int j = 0; j < mb->grid.Nx; ++j)
            J += v[static_cast<size_t>(j)] * v[static_cast<size_t>(j)] * (mb->k(i) - p.B * mb->grid.x(j));
        CHECK(std::abs(J) < 1e-6);
    }
}

TEST_CASE("band projection") {
    model::ModelParams p;
    p.B = 4.0;
    p.L = 8.0;
    p.V0 = 0.5;
    p.epsilon = 0.005;
    p.cl = p.c1 = 16.0;
    p.cr = p.c2 = 20.8;
    auto mb = basis::build_mixed_basis(p, 8);
    auto band = basis::build_band_basis(p, mb);

    // H0 projects to approximately B/2 per orbital
    auto h0 = ops::assemble_h0(mb);
    auto P0 = ops::project_to_band(h0, band);
    for (int i = 0; i < band.size(); ++i)
        CHECK(std::abs(P0(i, i).real() - 0.5 * p.B) < 1e-3 * p.B);

    // scalar shift projects to the exact scalar
    auto r = model::sample_disorder(p, 11);
    auto hb = ops::assemble_hb(mb, p, r);
    auto A = ops::project_to_band(hb, band);
    auto B2 = ops::project_to_band(hb.shifted(0.7), band);
    for (int i = 0; i < band.size(); ++i)
        for (int j = 0; j < band.size(); ++j) {
            const cplx want = A(i, j) + (i == j ? cplx(0.7) : cplx(0.0));
            CHECK(std::abs(B2(i, j) - want) < 1e-10);
        }

    // projected window eigenvalues track the full solve within 0.05 V0
    auto full = eig::eig_window(hb, p.window_lo(), p.window_hi());
    std::vector<double> full_phys;
    for (const auto& pr : full.pairs)
        if (classify::x_mass_outside(pr.vec, *mb, 0.5 * p.L + 1.0) <= 0.5)
            full_phys.push_back(pr.E);
    auto pairs = eig::eig_dense(A);
    std::vector<double> fast_phys;
    for (const auto& e : pairs) {
        if (e.E < p.window_lo() || e.E >= p.window_hi()) continue;
        double wall = 0.0;
        for (int i = 0; i < band.size(); ++i)
            if (std::abs(band.center(i)) > 0.5 * p.L + 1.0) wall += std::norm(e.vec[static_cast<size_t>(i)]);
        if (wall <= 0.5) fast_phys.push_back(e.E);
    }
    REQUIRE(!full_phys.empty());
    REQUIRE(full_phys.size() == fast_phys.size());
    for (size_t i = 0; i < full_phys.size(); ++i)
        CHECK(std::abs(full_phys[i] - fast_phys[i]) < 0.05 * p.V0);
}

TEST_CASE("binary export round trip") {
    auto p = cfgB();
    p.L = 4.0;
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 12);
    auto h = ops::assemble_full(mb, p, r);
    const std::string path = "/tmp/qhc_test_export.bin";
    ops::export_binary(h, path);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f);
    std::int64_t n = 0;
    REQUIRE(std::fread(&n, sizeof(n), 1, f) == 1);
    CHECK(n == h.dim());
    // first stored entry is (0,0)
    double re = 0.0, im = 0.0;
    REQUIRE(std::fread(&re, sizeof(double), 1, f) == 1);
    REQUIRE(std::fread(&im, sizeof(double), 1, f) == 1);
    CHECK(re == h.entry(0, 0).real());
    CHECK(im == h.entry(0, 0).imag());
    std::fclose(f);
    std::remove(path.c_str());
}

TEST_CASE("unresolved bump raises a quadrature error") {
    auto p = cfgA();
    // a coarse-enough grid cannot resolve the bump radius
    basis::MixedBasis mb;
    mb.B = p.B;
    mb.L = p.L;
    mb.grid = {-5.0, 5.0, 0.7, 15};
    mb.kset = {0.0};
    auto r = model::sample_disorder(p, 1);
    CHECK_THROWS_AS((void)ops::PotentialFourier::build(p, r, mb), std::invalid_argument);
}
