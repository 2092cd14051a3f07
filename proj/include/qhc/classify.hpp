#pragma once

#include "qhc/edge.hpp"
#include "qhc/eigensolve.hpp"

#include <string>
#include <vector>

namespace qhc::classify {

using la::cplx;

enum class StateLabel { LeftEdge, Bulk, RightEdge, Ambiguous };

std::string label_name(StateLabel l);

struct ClassifiedState {
    double E = 0.0;
    double J = 0.0;
    double residual = 0.0;
    StateLabel label = StateLabel::Ambiguous;
    double matched_k = 0.0;   // momentum of the matched branch level (edge labels)
    double shift = -1.0;      // |E - matched branch energy|, negative when unmatched
};

struct ClassifiedSpectrum {
    double lo = 0.0, hi = 0.0;
    std::vector<ClassifiedState> entries;  // ascending in E
    int left_count = 0, bulk_count = 0, right_count = 0, ambiguous_count = 0;
    double min_edge_absJ = 0.0;  // over edge labels; +inf sentinel when none
    double max_bulk_absJ = 0.0;  // over bulk labels; 0 when none

    bool partitions() const {
        return left_count + bulk_count + right_count + ambiguous_count ==
               static_cast<int>(entries.size());
    }
};

struct Policy {
    double j_epsilon = 0.0;   // measured branch scale
    double edge_frac = 0.5;   // J_edge = edge_frac * j_epsilon
    double bulk_frac = 0.1;   // J_bulk = bulk_frac * j_epsilon
    double radius = 0.0;      // dead-zone proximity radius (energy)
};

// <psi| v_y |psi>; Hermiticity makes it real (the imaginary part is checked)
double state_current(const eig::EigenPair& pair, const ops::BlockOperator& vy);

// trace current of a degenerate cluster divided by its size
double cluster_current(const std::vector<const eig::EigenPair*>& cluster,
                       const ops::BlockOperator& vy);

ClassifiedSpectrum classify_window(const eig::SpectrumWindow& win,
                                   const edge::SpectralBranch& left,
                                   const edge::SpectralBranch& right, const Policy& policy,
                                   const ops::BlockOperator& vy);

// <psi1| v_y |psi2> and the Lemma-2 style certificate
cplx pairwise_current(const eig::EigenPair& a, const eig::EigenPair& b,
                      const ops::BlockOperator& vy);

struct Lemma2Certificate {
    cplx value;
    double bound = 0.0;  // 2 |E1 - E2| L + slack
    bool pass = false;
};

Lemma2Certificate lemma2_certificate(const eig::EigenPair& a, const eig::EigenPair& b,
                                     const ops::BlockOperator& vy, double L, double slack);

// operator norm of the difference of orthogonal projectors onto the spans;
// 1 when the dimensions differ, else max principal-angle sine
double projector_distance(const std::vector<const std::vector<cplx>*>& A,
                          const std::vector<const std::vector<cplx>*>& B);

struct DecayProfile {
    std::vector<double> x;
    std::vector<double> envelope;     // max over y samples of |psi(x, y)|
    double exterior_slope = 0.0;      // log-envelope slope vs (x - (L/2 - logL))^2, x > L/2
    double fit_residual = 0.0;
    int fit_points = 0;
    double h2_proxy = 0.0;            // min over y lines of max over x |psi|
};

DecayProfile decay_profile(const eig::EigenPair& pair, const basis::MixedBasis& mb, int Ny = 128);

// fraction of |psi|^2 at |x| > x_abs; used to flag truncation-wall artifacts
// of the unconfined bulk operator
double x_mass_outside(const std::vector<cplx>& vec, const basis::MixedBasis& mb, double x_abs);

// frozen Wegner/Lemma-4 constant: c(B) = sup ||V^{1/2} P0 V^{1/2}||_1 / V0
// = B/128 for the (1-16 r^2)^3 bump (exact first-moment quadrature)
double frozen_cB(double B);

struct TraceBound {
    long count = 0;
    double bound = 0.0;
    bool pass = false;
};

// Tr P_b(I) <= 2 eps^-2 c(B)^2 V0^2 L^4 with the frozen constant
TraceBound trace_bound_check(long count_in_window, const model::ModelParams& p);

} // namespace qhc::classify
