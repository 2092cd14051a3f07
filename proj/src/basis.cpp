#include "qhc/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace qhc::basis {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

Grid1D build_grid(const model::ModelParams& p, int resolution) {
    if (resolution < 8) throw std::invalid_argument("basis: resolution >= 8 required");
    Grid1D g;
    const double W = p.W();
    g.x_min = -0.5 * p.L - W;
    g.x_max = 0.5 * p.L + W;
    const double span = g.x_max - g.x_min;
    // cells = resolution * (ceil(span*sqrt(B)) + 2): at least `resolution`
    // points per magnetic length, and doubling the resolution doubles Nx-1
    const std::int64_t cells =
        static_cast<std::int64_t>(resolution) *
        (static_cast<std::int64_t>(std::ceil(span * std::sqrt(p.B))) + 2);
    g.Nx = static_cast<int>(cells) + 1;
    g.hx = span / static_cast<double>(cells);
    return g;
}

std::shared_ptr<MixedBasis> build_mixed_basis(const model::ModelParams& p, int resolution,
                                              std::int64_t dim_cap) {
    p.validate();
    auto mb = std::make_shared<MixedBasis>();
    mb->B = p.B;
    mb->L = p.L;
    mb->grid = build_grid(p, resolution);

    const double pad = 3.0 / std::sqrt(p.B);
    mb->n_lo = static_cast<int>(std::ceil(p.B * (mb->grid.x_min - pad) * p.L / kTwoPi));
    mb->n_hi = static_cast<int>(std::floor(p.B * (mb->grid.x_max + pad) * p.L / kTwoPi));
    for (int n = mb->n_lo; n <= mb->n_hi; ++n) mb->kset.push_back(kTwoPi * n / p.L);

    if (mb->dim() > dim_cap)
        throw std::length_error("build_mixed_basis: dimension exceeds configured cap");
    return mb;
}

BandBasis build_band_basis(const model::ModelParams& p, std::shared_ptr<const MixedBasis> mixed) {
    BandBasis bb;
    bb.mixed = mixed;
    const double pad = 3.0 / std::sqrt(p.B);
    const auto& g = mixed->grid;
    for (int i = 0; i < mixed->Nk(); ++i) {
        const double c = mixed->k(i) / p.B;
        if (c < -0.5 * p.L - pad || c > 0.5 * p.L + pad) continue;
        std::vector<double> phi(static_cast<size_t>(g.Nx));
        double nrm2 = 0.0;
        for (int j = 0; j < g.Nx; ++j) {
            const double d = g.x(j) - c;
            phi[static_cast<size_t>(j)] = std::exp(-0.5 * p.B * d * d);
            nrm2 += phi[static_cast<size_t>(j)] * phi[static_cast<size_t>(j)];
        }
        const double inv = 1.0 / std::sqrt(nrm2);
        for (auto& v : phi) v *= inv;
        bb.k_index.push_back(i);
        bb.orbital.push_back(std::move(phi));
    }
    return bb;
}

} // namespace qhc::basis
