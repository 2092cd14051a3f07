#pragma once

#include "qhc/model.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace qhc::basis {

struct Grid1D {
    double x_min = 0.0, x_max = 0.0, hx = 0.0;
    int Nx = 0;
    double x(int j) const { return x_min + j * hx; }
};

// Fourier(y) x uniform-grid(x) discretization. Indexing is j-major:
// idx = j * Nk + ik, which makes every Hamiltonian block-tridiagonal with
// constant scalar off-blocks.
struct MixedBasis {
    Grid1D grid;
    double B = 0.0, L = 0.0;
    int n_lo = 0, n_hi = -1;      // k = 2 pi n / L
    std::vector<double> kset;

    int Nk() const { return static_cast<int>(kset.size()); }
    std::int64_t dim() const { return static_cast<std::int64_t>(grid.Nx) * Nk(); }
    double k(int i) const { return kset[static_cast<size_t>(i)]; }
    std::int64_t index(int j, int ik) const { return static_cast<std::int64_t>(j) * Nk() + ik; }
};

// resolution = grid points per magnetic length (>= 8)
std::shared_ptr<MixedBasis> build_mixed_basis(const model::ModelParams& p, int resolution,
                                              std::int64_t dim_cap = 2000000);

// Grid with the same span but an arbitrary resolution (for 1D edge solves).
Grid1D build_grid(const model::ModelParams& p, int resolution);

// One normalized lowest-Landau orbital per momentum whose guiding center k/B
// lies in [-L/2 - 3/sqrt(B), L/2 + 3/sqrt(B)]; distinct momenta live in
// distinct Fourier sectors so the family is exactly orthonormal.
struct BandBasis {
    std::shared_ptr<const MixedBasis> mixed;
    std::vector<int> k_index;                  // into mixed->kset
    std::vector<std::vector<double>> orbital;  // [orbital][j], unit discrete norm

    int size() const { return static_cast<int>(k_index.size()); }
    double center(int i) const { return mixed->k(k_index[static_cast<size_t>(i)]) / mixed->B; }
};

BandBasis build_band_basis(const model::ModelParams& p, std::shared_ptr<const MixedBasis> mixed);

} // namespace qhc::basis
