#pragma once

#include "qhc/classify.hpp"
#include "qhc/decouple.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qhc::experiments {

// Wilson score interval for a binomial frequency
struct Interval {
    double lo = 0.0, hi = 0.0;
};
Interval wilson_interval(long successes, long trials);

// least-squares slope of log y against log x (points with y > 0 only)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- windowed census of the bulk operator with the truncation-wall filter ----
//
// The unconfined H_b on the truncated grid carries spurious states pinned at
// the numerical Dirichlet walls; states with more than half their weight at
// |x| > L/2 + 1 are flagged and excluded from physical counts.
struct BulkCensus {
    std::vector<double> energies;       // physical window eigenvalues, ascending
    std::vector<eig::EigenPair> pairs;  // physical eigenpairs (full mode only)
    int wall_artifacts = 0;
};

BulkCensus bulk_census_full(const model::ModelParams& p, const basis::MixedBasis& mb,
                            const model::DisorderRealization& r, double lo, double hi);
// fast mode: lowest-Landau band projection, dense solve
BulkCensus bulk_census_fast(const model::ModelParams& p,
                            std::shared_ptr<const basis::MixedBasis> mb,
                            const basis::BandBasis& band,
                            const model::DisorderRealization& r, double lo, double hi);

// ---- Wegner ----
struct WegnerReport {
    double E = 0.0;
    int n_seeds = 0;
    std::vector<double> deltas;
    std::vector<double> freq;
    std::vector<Interval> ci;
    std::vector<double> bound;     // 4 c(B) ||h||_inf delta eps^-2 V0 L^4
    double fit_exponent = 0.0;     // small-delta log-log slope
    bool below_bound = true;
    bool nondecreasing = true;
    std::vector<double> dists;     // per-seed distance of sigma(H_b) to E
};

WegnerReport run_wegner(const model::ModelParams& p, double E,
                        const std::vector<double>& deltas, int n_seeds, int resolution);

// ---- Theorem 1 ensemble ----
struct TheoremSeedRow {
    std::uint64_t seed = 0;
    int left = 0, bulk = 0, right = 0, ambiguous = 0;
    double min_edge_J = 0.0;       // min |J| over edge labels
    double max_bulk_J = 0.0;       // max |J| over bulk labels
    double median_shift = 0.0;     // median |E - E_branch| over edge labels
    double median_dJ = 0.0;        // median |J - J_branch| over edge labels
    double min_label_dist = 0.0;   // dist(Sigma_b, Sigma_l u Sigma_r)
    double ratio = 0.0;            // min_edge_J / max_bulk_J (inf if no bulk)
    bool partitions = true;
};

struct TheoremLReport {
    double L = 0.0;
    int branch_left_count = 0, branch_right_count = 0;  // clean edge levels in the window
    double j_epsilon = 0.0;
    std::vector<TheoremSeedRow> rows;
    double mean_edge_count = 0.0, mean_bulk_count = 0.0;
    double median_max_bulk_J = 0.0;
    double ratio_pass_fraction = 0.0;  // fraction of seeds with ratio >= ratio_threshold
};

struct Theorem1Report {
    std::vector<TheoremLReport> per_L;
    double ratio_threshold = 100.0;
    double edge_fit_exponent = 0.0;   // mean edge count vs L
    double bulk_fit_exponent = 0.0;   // mean bulk count vs L
    double gamma_slope = 0.0;         // ln(median max bulk J) vs B (log L)^2
    int p = 7;
    double s_bookkeeping = 0.0;       // min(theta_fit, p - 6); theta from ratio freq
};

Theorem1Report run_theorem1(const model::ModelParams& base, const std::vector<double>& L_list,
                            int n_seeds, int resolution, double ratio_threshold = 100.0);

// ---- Hall current ----
struct HallResult {
    double mu_l = 0.0, mu_r = 0.0, E_F = 0.0;
    double I = 0.0;
    double predicted = 0.0;        // (mu_r - mu_l) / 2 pi
    double normalized = 0.0;       // I * 2 pi / (mu_r - mu_l)
    int filled_left = 0, filled_right = 0, filled_bulk = 0, skipped_ambiguous = 0;
    double bulk_budget = 0.0;      // filled_bulk * max bulk |J| / L
    std::vector<std::pair<double, double>> plateau;  // (E_F, I) sweep
    double plateau_spread = 0.0;   // max |I - I0| / |I0| over the sweep
};

HallResult hall_current(const classify::ClassifiedSpectrum& cs, double mu_l, double mu_r,
                        double E_F, double L, double plateau_frac = 0.2, int plateau_points = 11);

// ---- H1 / H2 diagnostics ----
struct H1H2Report {
    double d_epsilon = 0.0;
    bool h1_pass = false;
    int n_seeds = 0;
    std::vector<double> h2_proxies;       // per seed: worst (max) proxy over bulk states
    double h2_median = 0.0;
    double pass_fraction = 0.0;           // proxies below the threshold
    double theta_fit = 0.0;               // from 1 - f = L^-theta (0 when f == 1)
    double proxy_threshold = 0.0;
};

H1H2Report run_h1_h2_diagnostics(const model::ModelParams& p, int n_seeds, int resolution,
                                 double proxy_threshold);

} // namespace qhc::experiments
