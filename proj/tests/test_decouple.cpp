#include <doctest.h>

#include "qhc/decouple.hpp"
#include "qhc/experiments.hpp"

#include <cmath>

using namespace qhc;
using la::cplx;

namespace {

model::ModelParams cfgB(double L = 9.0) {
    model::ModelParams p;
    p.B = 2.56;
    p.L = L;
    p.V0 = 0.6;
    p.epsilon = 0.004;
    p.cl = p.c1 = 1.0 * p.B * p.B;
    p.cr = p.c2 = 1.3 * p.B * p.B;
    return p;
}

} // namespace

TEST_CASE("partition algebra") {
    auto p = cfgB();
    auto grid = basis::build_grid(p, 8);
    auto r = model::sample_disorder(p, 0);
    auto ps = decouple::build_partitions(p, grid, r);

    CHECK(ps.partition_identity_defect() <= 1e-12);
    CHECK(ps.sharp_sum_defect() == 0.0);
    CHECK(ps.max_dJ <= 2.0);

    // sharp cuts sit at +-(L/2 - D/2)
    const double cut = 0.5 * p.L - 0.5 * ps.D;
    for (int j = 0; j < grid.Nx; ++j) {
        const double x = grid.x(j);
        const double sl = ps.Jsharp[0][static_cast<size_t>(j)];
        const double sr = ps.Jsharp[2][static_cast<size_t>(j)];
        CHECK((sl == 0.0 || sl == 1.0));
        if (x < -cut - 1e-9) CHECK(sl == 1.0);
        if (x > -cut + 1e-9) CHECK(sl == 0.0);
        if (x > cut + 1e-9) CHECK(sr == 1.0);
    }

    // smooth transitions clear the impurity support
    CHECK(ps.al + ps.wl <= r.support_lo() + 1e-12);
    CHECK(ps.ar - ps.wr >= r.support_hi() - 1e-12);
    // bulk partition vanishes where the confinement lives
    for (int j = 0; j < grid.Nx; ++j)
        if (std::abs(grid.x(j)) > 0.5 * p.L)
            CHECK(ps.J[1][static_cast<size_t>(j)] == 0.0);

    // sampled first-derivative bound (paper's |dJ| <= 2)
    for (int i = 0; i < 3; ++i)
        for (int j = 1; j < grid.Nx; ++j) {
            const double fd = (ps.J[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                               ps.J[static_cast<size_t>(i)][static_cast<size_t>(j - 1)]) /
                              grid.hx;
            CHECK(std::abs(fd) <= 2.0 + 1e-9);
        }
}

TEST_CASE("partitions reject an impossible layer") {
    auto p = cfgB();
    p.L = 4.0;  // log(4)*4 > 4: plateaus overlap
    auto grid = basis::build_grid(p, 8);
    auto r = model::sample_disorder(p, 0);
    CHECK_THROWS_AS((void)decouple::build_partitions(p, grid, r), std::invalid_argument);
}

TEST_CASE("decoupling identity is exact on the discrete model") {
    auto p = cfgB();
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 3);
    auto parts = decouple::build_partitions(p, mb->grid, r);
    auto h = ops::assemble_full(mb, p, r);
    auto hb = ops::assemble_hb(mb, p, r);

    // a z in the window, away from all three spectra
    auto left = edge::edge_branch_window(p, model::Side::left, *mb);
    auto right = edge::edge_branch_window(p, model::Side::right, *mb);
    std::vector<double> edges;
    for (const auto* br : {&left, &right})
        for (const auto& pt : br->points) edges.push_back(pt.energy);
    auto hb_all = eig::eig_window(hb, p.window_lo() - 0.1, p.window_hi());
    std::vector<double> bulk;
    for (const auto& pr : hb_all.pairs) bulk.push_back(pr.E);
    auto grid = decouple::certification_grid(edges, bulk, p.window_lo(), p.window_hi(), 0.01);
    REQUIRE(!grid.empty());

    const double z = grid[grid.size() / 2];
    auto rep = decouple::verify_decoupling(h, hb, p, parts, z, 8);
    CHECK(rep.identity_residual <= 1e-8);
    CHECK(rep.K_norm > 0.0);
    if (rep.K_norm < 1.0) {
        CHECK(rep.neumann_converged);
        CHECK(rep.reconstruction_error <= 1e-8);
    }

    // grid respects the distance floor
    for (double zz : grid) {
        double d = 1e300;
        for (double e : edges) d = std::min(d, std::abs(zz - e));
        for (double e : bulk) d = std::min(d, std::abs(zz - e));
        CHECK(d >= 0.01);
    }
}

TEST_CASE("an impurity inside a transition region breaks the identity") {
    auto p = cfgB();
    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 3);
    auto parts = decouple::build_partitions(p, mb->grid, r);

    // synthetic bump centered in the right transition
    auto rbad = r;
    const double xbad = parts.ar - 0.5 * parts.wr;
    rbad.sites.emplace_back(static_cast<int>(std::lround(xbad)), 0);
    rbad.couplings.push_back(1.0);

    auto h = ops::assemble_full(mb, p, rbad);
    auto hb = ops::assemble_hb(mb, p, rbad);
    auto hb_all = eig::eig_window(hb, p.window_lo() - 0.1, p.window_hi());
    double z = 0.5 * (p.window_lo() + p.window_hi());
    // nudge z away from the perturbed spectra
    for (const auto& pr : hb_all.pairs)
        if (std::abs(pr.E - z) < 5e-3) z += 1e-2;
    auto rep = decouple::verify_decoupling(h, hb, p, parts, z, 8);
    CHECK(rep.identity_residual > 1e-4);
}

TEST_CASE("certification grid geometry") {
    std::vector<double> edges{1.0, 2.0};
    std::vector<double> bulk{1.52};
    auto grid = decouple::certification_grid(edges, bulk, 0.9, 2.1, 0.05);
    REQUIRE(!grid.empty());
    for (double z : grid) {
        CHECK(z > 0.9);
        CHECK(z < 2.1);
        CHECK(std::abs(z - 1.52) >= 0.05);
        CHECK(std::abs(z - 1.0) >= 0.05);
        CHECK(std::abs(z - 2.0) >= 0.05);
    }
    // 8 interior candidates per gap minus the floor casualties
    CHECK(grid.size() <= 16);
    CHECK(grid.size() >= 8);
}
