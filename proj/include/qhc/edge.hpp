#pragma once

#include "qhc/basis.hpp"
#include "qhc/model.hpp"

#include <vector>

namespace qhc::edge {

struct BranchPoint {
    double k = 0.0;
    double energy = 0.0;
    double J_integral = 0.0;    // sum |phi_j|^2 (k - B x_j)
    double J_derivative = 0.0;  // centered difference of energy in k
    std::vector<double> phi;    // 1D eigenvector on the grid, unit l2 norm
};

struct SpectralBranch {
    model::Side side = model::Side::right;
    basis::Grid1D grid;
    double B = 0.0, L = 0.0;
    std::vector<BranchPoint> points;  // ascending in k

    // min |J| over branch points with energy in [lo, hi]; 0 points -> 0
    double j_epsilon(double lo, double hi) const;
    std::vector<double> energies_in(double lo, double hi) const;
};

struct SpacingReport {
    int count = 0;                  // branch energies in the window
    double min_spacing = 0.0;
    double max_spacing = 0.0;
    double j_epsilon = 0.0;
    bool spacing_exceeds_j_over_L = true;  // min spacing > j_epsilon / L
};

struct H1Report {
    double d_epsilon = 0.0;  // L * min_{pairs} |E_l - E_r|, +inf sentinel when vacuous
    bool pass = false;
    int left_count = 0, right_count = 0;
};

// lowest (nu = 0) eigenpair of (1/2)p_x^2 + (1/2)(k - Bx)^2 + U_side per k.
// Currents by both routes of the Feynman-Hellman identity: the velocity
// quadratic form, and a centered difference of the branch energy with step
// dk = 1e-3 * (2pi/L).
SpectralBranch edge_branch(const model::ModelParams& p, model::Side side,
                           const std::vector<double>& k_list, const basis::Grid1D& grid);

// convenience: all momenta of the mixed basis whose branch can reach the
// window, solved on the given grid
SpectralBranch edge_branch_window(const model::ModelParams& p, model::Side side,
                                  const basis::MixedBasis& mb);
SpectralBranch edge_branch_window(const model::ModelParams& p, model::Side side,
                                  const basis::Grid1D& grid);

SpacingReport branch_spacing(const SpectralBranch& b, double lo, double hi);

H1Report check_h1(const SpectralBranch& left, const SpectralBranch& right, double lo,
                  double hi, double threshold);

} // namespace qhc::edge
