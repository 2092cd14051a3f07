#pragma once

#include "qhc/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qhc::config {

struct BasisConfig {
    int resolution = 8;
    std::int64_t dim_cap = 2000000;
    int dense_cap = 6000;
};

struct SolverConfig {
    double tol = 1e-9;
    int max_lanczos = 420;
};

struct ClassifyConfig {
    double edge_frac = 0.5;
    double bulk_frac = 0.1;
};

struct ExperimentConfig {
    int seeds = 50;
    std::vector<double> L_list = {8.0, 12.0, 16.0};
    double E = 0.0;                  // 0 = window midpoint
    std::vector<double> deltas;      // empty = log grid
    double mu_l = 0.0, mu_r = 0.0, E_F = 0.0;  // 0 = automatic placement
    double z_floor = 0.02;
    double layer_scale = 1.0;
    double proxy_threshold = 1e-3;
    double ratio_threshold = 100.0;
    bool fast = false;
};

struct RunConfig {
    model::ModelParams model;
    BasisConfig basis;
    SolverConfig solver;
    ClassifyConfig classify;
    ExperimentConfig experiment;
    std::string out_dir = "runs";
};

// Parses a UTF-8 JSON document; unknown keys are rejected with a
// path-precise message, physical constraints are checked, and every default
// is materialized. Model keys may appear at the top level as a shorthand.
RunConfig parse_config(const std::string& json_text);

// canonical serialization (sorted keys, full defaults) used for provenance
std::string canonical_json(const RunConfig& c);

std::uint64_t fnv1a64(const std::string& s);
std::string config_hash(const RunConfig& c);  // 16 hex digits

} // namespace qhc::config
