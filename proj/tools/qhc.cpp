#include "qhc/classify.hpp"
#include "qhc/config.hpp"
#include "qhc/csvio.hpp"
#include "qhc/decouple.hpp"
#include "qhc/experiments.hpp"
#include "qhc/parallel.hpp"
#include "qhc/rng.hpp"
#include "qhc/specfun.hpp"
#include "qhc/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qhc;

namespace {

struct Cli {
    std::string config_path;
    int seeds = -1;
    long long seed_base = -1;
    std::string out_dir;
    int threads = 1;
    bool fast = false;
    bool clean = false;
};

config::RunConfig load_config(const Cli& cli) {
    std::string text = "{}";
    if (!cli.config_path.empty()) {
        std::ifstream f(cli.config_path);
        if (!f) throw std::runtime_error("cannot open config " + cli.config_path);
        text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    auto c = config::parse_config(text);
    if (cli.seeds > 0) c.experiment.seeds = cli.seeds;
    if (cli.seed_base >= 0) c.model.seed_base = static_cast<std::uint64_t>(cli.seed_base);
    if (!cli.out_dir.empty()) c.out_dir = cli.out_dir;
    if (cli.fast) c.experiment.fast = true;
    return c;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

fs::path prepare_run_dir(const config::RunConfig& c, const std::string& sub) {
    fs::path dir = fs::path(c.out_dir) / sub;
    fs::create_directories(dir);
    write_text(dir / "config.json", config::canonical_json(c));
    return dir;
}

json report_header(const config::RunConfig& c) {
    json j;
    j["version"] = kVersion;
    j["config_hash"] = config::config_hash(c);
    return j;
}

model::DisorderRealization realization_for(const config::RunConfig& c, std::uint64_t seed,
                                           bool clean) {
    auto r = model::sample_disorder(c.model, seed);
    if (clean)
        for (auto& x : r.couplings) x = 0.0;
    return r;
}

struct Pipeline {
    std::shared_ptr<basis::MixedBasis> mb;
    edge::SpectralBranch left, right;
    ops::BlockOperator vy;
    classify::Policy policy;
};

Pipeline make_pipeline(const config::RunConfig& c) {
    Pipeline pl;
    pl.mb = basis::build_mixed_basis(c.model, c.basis.resolution, c.basis.dim_cap);
    pl.left = edge::edge_branch_window(c.model, model::Side::left, *pl.mb);
    pl.right = edge::edge_branch_window(c.model, model::Side::right, *pl.mb);
    pl.vy = ops::assemble_vy(pl.mb);
    const double lo = c.model.window_lo(), hi = c.model.window_hi();
    pl.policy.j_epsilon = std::min(pl.left.j_epsilon(lo, hi), pl.right.j_epsilon(lo, hi));
    pl.policy.edge_frac = c.classify.edge_frac;
    pl.policy.bulk_frac = c.classify.bulk_frac;
    double min_sp = std::numeric_limits<double>::infinity();
    for (const auto* br : {&pl.left, &pl.right}) {
        auto es = br->energies_in(lo, hi);
        for (size_t i = 1; i < es.size(); ++i) min_sp = std::min(min_sp, es[i] - es[i - 1]);
    }
    pl.policy.radius = std::isfinite(min_sp) ? 0.25 * min_sp : 0.25 * (hi - lo);
    return pl;
}

classify::ClassifiedSpectrum classify_one(const config::RunConfig& c, const Pipeline& pl,
                                          std::uint64_t seed, bool clean) {
    auto r = realization_for(c, seed, clean);
    ops::BlockOperator h = ops::assemble_full(pl.mb, c.model, r);
    eig::WindowOptions wo;
    wo.tol = c.solver.tol;
    wo.max_lanczos = c.solver.max_lanczos;
    auto win = eig::eig_window(h, c.model.window_lo(), c.model.window_hi(), wo);
    return classify::classify_window(win, pl.left, pl.right, pl.policy, pl.vy);
}

int cmd_spectrum(const config::RunConfig& c, bool clean, bool fast) {
    auto dir = prepare_run_dir(c, "spectrum");
    const std::string hash = config::config_hash(c);
    const double lo = c.model.window_lo(), hi = c.model.window_hi();
    csvio::Writer w((dir / "spectrum.csv").string(), {"index", "E", "residual"}, hash);
    if (fast) {
        auto mb = basis::build_mixed_basis(c.model, c.basis.resolution, c.basis.dim_cap);
        auto band = basis::build_band_basis(c.model, mb);
        auto r = realization_for(c, 0, clean);
        auto hb = ops::assemble_full(mb, c.model, r);
        auto P = ops::project_to_band(hb, band);
        auto pairs = eig::eig_dense(P, c.basis.dense_cap);
        int idx = 0;
        for (const auto& e : pairs)
            if (e.E >= lo && e.E < hi)
                w.row({std::to_string(idx++), csvio::fmt(e.E), csvio::fmt(e.residual)});
    } else {
        auto mb = basis::build_mixed_basis(c.model, c.basis.resolution, c.basis.dim_cap);
        auto r = realization_for(c, 0, clean);
        auto h = ops::assemble_full(mb, c.model, r);
        auto win = eig::eig_window(h, lo, hi);
        int idx = 0;
        for (const auto& e : win.pairs)
            w.row({std::to_string(idx++), csvio::fmt(e.E), csvio::fmt(e.residual)});
    }
    std::cout << "spectrum: wrote " << (dir / "spectrum.csv") << "\n";
    return 0;
}

int cmd_classify(const config::RunConfig& c, bool clean, bool fast) {
    if (fast)
        throw std::runtime_error(
            "classify: band-projected mode cannot measure currents; run without --fast");
    auto dir = prepare_run_dir(c, "classify");
    const std::string hash = config::config_hash(c);
    Pipeline pl = make_pipeline(c);
    auto cs = classify_one(c, pl, 0, clean);
    csvio::Writer w((dir / "classify.csv").string(),
                    {"index", "E", "J", "residual", "label", "matched_k", "shift"}, hash);
    int idx = 0;
    for (const auto& st : cs.entries)
        w.row({std::to_string(idx++), csvio::fmt(st.E), csvio::fmt(st.J),
               csvio::fmt(st.residual), classify::label_name(st.label),
               csvio::fmt(st.matched_k), csvio::fmt(st.shift)});
    json rep = report_header(c);
    rep["left"] = cs.left_count;
    rep["bulk"] = cs.bulk_count;
    rep["right"] = cs.right_count;
    rep["ambiguous"] = cs.ambiguous_count;
    rep["partitions"] = cs.partitions();
    write_text(dir / "report.json", rep.dump(2));
    std::cout << "classify: " << cs.left_count << " left, " << cs.bulk_count << " bulk, "
              << cs.right_count << " right, " << cs.ambiguous_count << " ambiguous\n";
    return cs.partitions() ? 0 : 2;
}

int cmd_edge_branches(const config::RunConfig& c) {
    auto dir = prepare_run_dir(c, "edge-branches");
    const std::string hash = config::config_hash(c);
    auto mb = basis::build_mixed_basis(c.model, c.basis.resolution, c.basis.dim_cap);
    csvio::Writer w((dir / "branches.csv").string(),
                    {"side", "k", "energy", "J_integral", "J_derivative"}, hash);
    for (auto side : {model::Side::left, model::Side::right}) {
        auto br = edge::edge_branch_window(c.model, side, *mb);
        for (const auto& pt : br.points)
            w.row({side == model::Side::left ? "left" : "right", csvio::fmt(pt.k),
                   csvio::fmt(pt.energy), csvio::fmt(pt.J_integral),
                   csvio::fmt(pt.J_derivative)});
    }
    std::cout << "edge-branches: wrote " << (dir / "branches.csv") << "\n";
    return 0;
}

int cmd_kernel_check(const config::RunConfig& c) {
    auto dir = prepare_run_dir(c, "kernel-check");
    const std::string hash = config::config_hash(c);
    const double B = c.model.B, L = c.model.L;
    csvio::Writer w((dir / "certificates.csv").string(),
                    {"order", "x", "y", "xp", "yp", "re_z", "im_z", "abs_kernel", "bound",
                     "pass"},
                    hash);
    rng::Stream rs(rng::derive_seed(c.model.seed_base, 0xCE21));
    int fails = 0, done = 0;
    while (done < 2000) {
        sf::Point a{rs.uniform(-L, L), rs.uniform(-L / 2.0, L / 2.0)};
        sf::Point b{rs.uniform(-L, L), rs.uniform(-L / 2.0, L / 2.0)};
        const double dx = a.x - b.x, dy = a.y - b.y;
        if (0.5 * B * (dx * dx + dy * dy) <= 1.0) continue;
        la::cplx z(rs.uniform(0.55 * B, 1.45 * B), rs.uniform(-1.0, 1.0));
        if (sf::dist_to_landau(z, B) < 0.02 * B) continue;
        for (int order = 0; order <= 1; ++order) {
            auto cert = sf::certify_lemma3_point(a, b, z, B, L, order);
            if (!cert.pass) ++fails;
            w.row({std::to_string(order), csvio::fmt(a.x), csvio::fmt(a.y), csvio::fmt(b.x),
                   csvio::fmt(b.y), csvio::fmt(z.real()), csvio::fmt(z.imag()),
                   csvio::fmt(std::abs(cert.kernel)), csvio::fmt(cert.bound),
                   cert.pass ? "1" : "0"});
        }
        ++done;
    }
    std::cout << "kernel-check: " << fails << " failures over " << 2 * done
              << " certificates\n";
    return fails == 0 ? 0 : 2;
}

int cmd_decoupling(const config::RunConfig& c, bool clean) {
    auto dir = prepare_run_dir(c, "decoupling");
    const std::string hash = config::config_hash(c);
    const double lo = c.model.window_lo(), hi = c.model.window_hi();

    auto mb = basis::build_mixed_basis(c.model, c.basis.resolution, c.basis.dim_cap);
    auto r = realization_for(c, 0, clean);
    auto parts = decouple::build_partitions(c.model, mb->grid, r, c.experiment.layer_scale);
    auto h = ops::assemble_full(mb, c.model, r);
    auto hb = ops::assemble_hb(mb, c.model, r);

    auto bl = edge::edge_branch_window(c.model, model::Side::left, *mb);
    auto brr = edge::edge_branch_window(c.model, model::Side::right, *mb);
    std::vector<double> edge_levels;
    for (const auto* br : {&bl, &brr})
        for (const auto& pt : br->points) edge_levels.push_back(pt.energy);
    auto census = experiments::bulk_census_full(c.model, *mb, r, lo - 0.2 * (hi - lo), hi);
    // avoid every numerical pole of R_b, wall artifacts included
    auto hb_all = eig::eig_window(hb, lo - 0.2 * (hi - lo), hi);
    std::vector<double> bulk_levels;
    for (const auto& pr : hb_all.pairs) bulk_levels.push_back(pr.E);
    auto grid = decouple::certification_grid(edge_levels, bulk_levels, lo, hi,
                                             c.experiment.z_floor);

    csvio::Writer w((dir / "decoupling.csv").string(), {"z", "K_norm", "residual"}, hash);
    int bad = 0;
    for (double z : grid) {
        auto repd = decouple::verify_decoupling(h, hb, c.model, parts, z);
        w.row({csvio::fmt(z), csvio::fmt(repd.K_norm), csvio::fmt(repd.identity_residual)});
        if (repd.identity_residual > 1e-8 || repd.K_norm >= 1.0) ++bad;
        std::cout << "z=" << z << "  |K|=" << repd.K_norm
                  << "  residual=" << repd.identity_residual << "\n";
    }
    json rep = report_header(c);
    rep["grid_points"] = grid.size();
    rep["failures"] = bad;
    rep["bulk_census"] = census.energies.size();
    write_text(dir / "report.json", rep.dump(2));
    return bad == 0 ? 0 : 2;
}

int cmd_wegner(const config::RunConfig& c) {
    auto dir = prepare_run_dir(c, "wegner");
    const std::string hash = config::config_hash(c);
    const double lo = c.model.window_lo(), hi = c.model.window_hi();
    const double E = (c.experiment.E != 0.0) ? c.experiment.E : 0.5 * (lo + hi);
    std::vector<double> deltas = c.experiment.deltas;
    if (deltas.empty()) {
        deltas.push_back(0.0);
        for (double d = 1e-4 * c.model.B; d <= 0.03 * c.model.B; d *= 1.7782794100389228)
            deltas.push_back(d);
    }
    auto rep = experiments::run_wegner(c.model, E, deltas, c.experiment.seeds,
                                       c.basis.resolution);
    csvio::Writer w((dir / "wegner.csv").string(),
                    {"delta", "freq", "ci_lo", "ci_hi", "bound"}, hash);
    for (size_t i = 0; i < rep.deltas.size(); ++i)
        w.row({csvio::fmt(rep.deltas[i]), csvio::fmt(rep.freq[i]), csvio::fmt(rep.ci[i].lo),
               csvio::fmt(rep.ci[i].hi), csvio::fmt(rep.bound[i])});
    fs::create_directories(dir / "seeds");
    for (int s = 0; s < rep.n_seeds; ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "%03d.csv", s);
        csvio::Writer ws((dir / "seeds" / name).string(), {"seed", "dist"}, hash);
        ws.row({std::to_string(s), csvio::fmt(rep.dists[static_cast<size_t>(s)])});
    }
    json jr = report_header(c);
    jr["E"] = rep.E;
    jr["fit_exponent"] = rep.fit_exponent;
    jr["below_bound"] = rep.below_bound;
    jr["nondecreasing"] = rep.nondecreasing;
    write_text(dir / "report.json", jr.dump(2));
    std::cout << "wegner: fit exponent " << rep.fit_exponent << ", below bound "
              << rep.below_bound << "\n";
    const bool ok = rep.below_bound && rep.nondecreasing && (rep.freq.empty() || rep.freq[0] == 0.0);
    return ok ? 0 : 2;
}

int cmd_theorem1(const config::RunConfig& c) {
    auto dir = prepare_run_dir(c, "theorem1");
    const std::string hash = config::config_hash(c);
    auto rep = experiments::run_theorem1(c.model, c.experiment.L_list, c.experiment.seeds,
                                         c.basis.resolution, c.experiment.ratio_threshold);
    fs::create_directories(dir / "seeds");
    for (int s = 0; s < c.experiment.seeds; ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "%03d.csv", s);
        csvio::Writer ws((dir / "seeds" / name).string(),
                         {"L", "seed", "left", "bulk", "right", "ambiguous", "min_edge_J",
                          "max_bulk_J", "median_shift", "median_dJ", "min_label_dist",
                          "ratio"},
                         hash);
        for (const auto& lr : rep.per_L) {
            const auto& row = lr.rows[static_cast<size_t>(s)];
            ws.row({csvio::fmt(lr.L), std::to_string(s), std::to_string(row.left),
                    std::to_string(row.bulk), std::to_string(row.right),
                    std::to_string(row.ambiguous), csvio::fmt(row.min_edge_J),
                    csvio::fmt(row.max_bulk_J), csvio::fmt(row.median_shift),
                    csvio::fmt(row.median_dJ), csvio::fmt(row.min_label_dist),
                    csvio::fmt(row.ratio)});
        }
    }
    json jr = report_header(c);
    jr["edge_fit_exponent"] = rep.edge_fit_exponent;
    jr["bulk_fit_exponent"] = rep.bulk_fit_exponent;
    jr["gamma_slope"] = rep.gamma_slope;
    jr["p"] = rep.p;
    jr["s_bookkeeping"] = rep.s_bookkeeping;
    for (const auto& lr : rep.per_L) {
        json jl;
        jl["L"] = lr.L;
        jl["j_epsilon"] = lr.j_epsilon;
        jl["branch_left"] = lr.branch_left_count;
        jl["branch_right"] = lr.branch_right_count;
        jl["mean_edge_count"] = lr.mean_edge_count;
        jl["mean_bulk_count"] = lr.mean_bulk_count;
        jl["median_max_bulk_J"] = lr.median_max_bulk_J;
        jl["ratio_pass_fraction"] = lr.ratio_pass_fraction;
        jr["per_L"].push_back(jl);
    }
    write_text(dir / "report.json", jr.dump(2));
    std::cout << "theorem1: edge exponent " << rep.edge_fit_exponent << ", bulk exponent "
              << rep.bulk_fit_exponent << "\n";
    bool partitions_ok = true;
    for (const auto& lr : rep.per_L)
        for (const auto& row : lr.rows) partitions_ok = partitions_ok && row.partitions;
    return partitions_ok ? 0 : 2;
}

int cmd_hall(const config::RunConfig& c, bool clean) {
    auto dir = prepare_run_dir(c, "hall");
    const std::string hash = config::config_hash(c);
    const double lo = c.model.window_lo(), hi = c.model.window_hi();
    const double mu_l = (c.experiment.mu_l != 0.0) ? c.experiment.mu_l : lo + 0.30 * (hi - lo);
    const double E_F = (c.experiment.E_F != 0.0) ? c.experiment.E_F : lo + 0.50 * (hi - lo);
    const double mu_r = (c.experiment.mu_r != 0.0) ? c.experiment.mu_r : lo + 0.70 * (hi - lo);

    Pipeline pl = make_pipeline(c);
    auto cs = classify_one(c, pl, 0, clean);
    auto h = experiments::hall_current(cs, mu_l, mu_r, E_F, c.model.L);

    csvio::Writer w((dir / "plateau.csv").string(), {"E_F", "I"}, hash);
    for (const auto& [ef, I] : h.plateau) w.row({csvio::fmt(ef), csvio::fmt(I)});
    json jr = report_header(c);
    jr["mu_l"] = h.mu_l;
    jr["mu_r"] = h.mu_r;
    jr["E_F"] = h.E_F;
    jr["I"] = h.I;
    jr["predicted"] = h.predicted;
    jr["normalized"] = h.normalized;
    jr["bulk_budget"] = h.bulk_budget;
    jr["plateau_spread"] = h.plateau_spread;
    write_text(dir / "report.json", jr.dump(2));
    std::cout << "hall: I*2pi/(mu_r-mu_l) = " << h.normalized << ", plateau spread "
              << h.plateau_spread << "\n";
    const double budget = 0.1 + h.bulk_budget / std::abs(h.predicted);
    return (std::abs(h.normalized - 1.0) <= budget && h.plateau_spread <= 0.01) ? 0 : 2;
}

int cmd_diagnostics(const config::RunConfig& c) {
    auto dir = prepare_run_dir(c, "diagnostics");
    auto rep = experiments::run_h1_h2_diagnostics(c.model, c.experiment.seeds,
                                                  c.basis.resolution,
                                                  c.experiment.proxy_threshold);
    json jr = report_header(c);
    jr["d_epsilon"] = rep.d_epsilon;
    jr["h1_pass"] = rep.h1_pass;
    jr["h2_median"] = rep.h2_median;
    jr["pass_fraction"] = rep.pass_fraction;
    jr["theta_fit"] = rep.theta_fit;
    auto ci = experiments::wilson_interval(
        static_cast<long>(std::lround(rep.pass_fraction * rep.n_seeds)), rep.n_seeds);
    jr["pass_ci_lo"] = ci.lo;
    jr["pass_ci_hi"] = ci.hi;
    write_text(dir / "report.json", jr.dump(2));
    std::cout << "diagnostics: d_epsilon=" << rep.d_epsilon
              << " h2_median=" << rep.h2_median << "\n";
    return rep.h1_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Hall cylinder simulator"};
    app.set_version_flag("--version", kVersion);
    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--seeds", cli.seeds, "number of disorder seeds");
    app.add_option("--seed-base", cli.seed_base, "RNG seed root");
    app.add_option("--out", cli.out_dir, "output directory");
    app.add_option("--threads", cli.threads, "worker threads (1 = reference path)");
    app.add_flag("--fast", cli.fast, "lowest-Landau band projected mode where supported");
    app.add_flag("--clean", cli.clean, "zero all impurity couplings");

    std::string sub;
    app.add_option("subcommand", sub,
                   "spectrum|classify|edge-branches|kernel-check|decoupling|wegner|theorem1|"
                   "hall|diagnostics")
        ->required();

    CLI11_PARSE(app, argc, argv);
    par::set_threads(cli.threads);

    try {
        auto c = load_config(cli);
        if (sub == "spectrum") return cmd_spectrum(c, cli.clean, c.experiment.fast);
        if (sub == "classify") return cmd_classify(c, cli.clean, c.experiment.fast);
        if (sub == "edge-branches") return cmd_edge_branches(c);
        if (sub == "kernel-check") return cmd_kernel_check(c);
        if (sub == "decoupling") return cmd_decoupling(c, cli.clean);
        if (sub == "wegner") return cmd_wegner(c);
        if (sub == "theorem1") return cmd_theorem1(c);
        if (sub == "hall") return cmd_hall(c, cli.clean);
        if (sub == "diagnostics") return cmd_diagnostics(c);
        std::cerr << "unknown subcommand: " << sub << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
