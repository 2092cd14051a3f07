#include "qhc/experiments.hpp"
#include "qhc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhc::experiments {

Interval wilson_interval(long successes, long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 95%
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
    int m = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double u = std::log(x[i]);
        const double v = std::log(y[i]);
        su += u; sv += v; suu += u * u; suv += u * v;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    return (m * suv - su * sv) / (m * suu - su * su);
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

constexpr double kWallMargin = 1.0;   // |x| > L/2 + 1 counts as wall weight
constexpr double kWallFraction = 0.5;

} // namespace

BulkCensus bulk_census_full(const model::ModelParams& p, const basis::MixedBasis& mb,
                            const model::DisorderRealization& r, double lo, double hi) {
    auto mbp = std::make_shared<basis::MixedBasis>(mb);
    ops::BlockOperator hb = ops::assemble_hb(mbp, p, r);
    eig::SpectrumWindow win = eig::eig_window(hb, lo, hi);
    BulkCensus out;
    for (auto& pair : win.pairs) {
        if (classify::x_mass_outside(pair.vec, mb, 0.5 * p.L + kWallMargin) > kWallFraction) {
            ++out.wall_artifacts;
            continue;
        }
        out.energies.push_back(pair.E);
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

BulkCensus bulk_census_fast(const model::ModelParams& p,
                            std::shared_ptr<const basis::MixedBasis> mb,
                            const basis::BandBasis& band,
                            const model::DisorderRealization& r, double lo, double hi) {
    ops::BlockOperator hb = ops::assemble_hb(mb, p, r);
    la::Matrix P = ops::project_to_band(hb, band);
    auto pairs = eig::eig_dense(P);
    BulkCensus out;
    for (const auto& e : pairs) {
        if (e.E < lo || e.E >= hi) continue;
        double wall = 0.0;
        for (int i = 0; i < band.size(); ++i)
            if (std::abs(band.center(i)) > 0.5 * p.L + kWallMargin)
                wall += std::norm(e.vec[static_cast<size_t>(i)]);
        if (wall > kWallFraction) {
            ++out.wall_artifacts;
            continue;
        }
        out.energies.push_back(e.E);
    }
    return out;
}

WegnerReport run_wegner(const model::ModelParams& p, double E,
                        const std::vector<double>& deltas, int n_seeds, int resolution) {
    p.validate();
    if (!(E >= p.window_lo() && E <= p.window_hi()))
        throw std::invalid_argument("run_wegner: E outside the spectral window");
    for (double d : deltas)
        if (d < 0.0) throw std::invalid_argument("run_wegner: deltas must be nonnegative");

    auto mb = basis::build_mixed_basis(p, resolution);
    auto band = basis::build_band_basis(p, mb);

    WegnerReport rep;
    rep.E = E;
    rep.n_seeds = n_seeds;
    rep.deltas = deltas;
    rep.dists.assign(static_cast<size_t>(n_seeds), 0.0);

    par::parallel_for(n_seeds, [&](std::int64_t s) {
        auto r = model::sample_disorder(p, static_cast<std::uint64_t>(s));
        // census over a fattened window so distances near the edges are exact
        const double pad = *std::max_element(deltas.begin(), deltas.end()) + 1e-6;
        auto census = bulk_census_fast(p, mb, band, r, E - 2.0 * pad, E + 2.0 * pad);
        double dist = std::numeric_limits<double>::infinity();
        for (double e : census.energies) dist = std::min(dist, std::abs(e - E));
        rep.dists[static_cast<size_t>(s)] = dist;
    });

    const double hsup = model::coupling_density_sup();
    const double cB = classify::frozen_cB(p.B);
    rep.freq.resize(deltas.size());
    rep.ci.resize(deltas.size());
    rep.bound.resize(deltas.size());
    for (size_t i = 0; i < deltas.size(); ++i) {
        long k = 0;
        for (double d : rep.dists)
            if (d < deltas[i]) ++k;
        rep.freq[i] = static_cast<double>(k) / n_seeds;
        rep.ci[i] = wilson_interval(k, n_seeds);
        rep.bound[i] = 4.0 * cB * hsup * deltas[i] * std::pow(p.epsilon, -2.0) * p.V0 *
                       std::pow(p.L, 4.0);
        if (rep.freq[i] > rep.bound[i]) rep.below_bound = false;
        if (i > 0 && rep.freq[i] < rep.freq[i - 1] - 1e-15) rep.nondecreasing = false;
    }
    // small-delta exponent over the lower half of the nonzero-frequency points
    std::vector<double> xs, ys;
    for (size_t i = 0; i < deltas.size(); ++i)
        if (rep.freq[i] > 0.0 && rep.freq[i] < 1.0) {
            xs.push_back(deltas[i]);
            ys.push_back(rep.freq[i]);
        }
    if (xs.size() > 4) {
        xs.resize((xs.size() + 1) / 2 + 1);
        ys.resize(xs.size());
    }
    rep.fit_exponent = loglog_slope(xs, ys);
    return rep;
}

namespace {

struct LContext {
    std::shared_ptr<basis::MixedBasis> mb;
    edge::SpectralBranch left, right;
    ops::BlockOperator vy;
    classify::Policy policy;
};

LContext make_context(const model::ModelParams& p, int resolution) {
    LContext ctx;
    ctx.mb = basis::build_mixed_basis(p, resolution);
    ctx.left = edge::edge_branch_window(p, model::Side::left, *ctx.mb);
    ctx.right = edge::edge_branch_window(p, model::Side::right, *ctx.mb);
    ctx.vy = ops::assemble_vy(ctx.mb);
    const double lo = p.window_lo(), hi = p.window_hi();
    ctx.policy.j_epsilon =
        std::min(ctx.left.j_epsilon(lo, hi), ctx.right.j_epsilon(lo, hi));
    // dead-zone radius: a quarter of the tightest branch spacing in the window
    double min_sp = std::numeric_limits<double>::infinity();
    for (const auto* br : {&ctx.left, &ctx.right}) {
        auto es = br->energies_in(lo, hi);
        for (size_t i = 1; i < es.size(); ++i) min_sp = std::min(min_sp, es[i] - es[i - 1]);
    }
    ctx.policy.radius = std::isfinite(min_sp) ? 0.25 * min_sp : 0.25 * (hi - lo);
    return ctx;
}

} // namespace

Theorem1Report run_theorem1(const model::ModelParams& base, const std::vector<double>& L_list,
                            int n_seeds, int resolution, double ratio_threshold) {
    Theorem1Report rep;
    rep.ratio_threshold = ratio_threshold;

    for (double L : L_list) {
        model::ModelParams p = base;
        p.L = L;
        p.validate();
        const double lo = p.window_lo(), hi = p.window_hi();
        LContext ctx = make_context(p, resolution);

        TheoremLReport lr;
        lr.L = L;
        lr.j_epsilon = ctx.policy.j_epsilon;
        lr.branch_left_count = static_cast<int>(ctx.left.energies_in(lo, hi).size());
        lr.branch_right_count = static_cast<int>(ctx.right.energies_in(lo, hi).size());
        lr.rows.resize(static_cast<size_t>(n_seeds));

        par::parallel_for(n_seeds, [&](std::int64_t s) {
            auto r = model::sample_disorder(p, static_cast<std::uint64_t>(s));
            ops::BlockOperator h = ops::assemble_full(ctx.mb, p, r);
            eig::SpectrumWindow win = eig::eig_window(h, lo, hi);
            auto cs = classify::classify_window(win, ctx.left, ctx.right, ctx.policy, ctx.vy);

            TheoremSeedRow row;
            row.seed = static_cast<std::uint64_t>(s);
            row.left = cs.left_count;
            row.bulk = cs.bulk_count;
            row.right = cs.right_count;
            row.ambiguous = cs.ambiguous_count;
            row.partitions = cs.partitions();
            row.min_edge_J = cs.min_edge_absJ;
            row.max_bulk_J = cs.max_bulk_absJ;
            std::vector<double> shifts, dJs;
            double min_dist = std::numeric_limits<double>::infinity();
            for (const auto& st : cs.entries) {
                if (st.label == classify::StateLabel::LeftEdge ||
                    st.label == classify::StateLabel::RightEdge) {
                    if (st.shift >= 0.0) shifts.push_back(st.shift);
                    // branch current at the matched momentum
                    const auto& br =
                        (st.label == classify::StateLabel::LeftEdge) ? ctx.left : ctx.right;
                    for (const auto& pt : br.points)
                        if (pt.k == st.matched_k) {
                            dJs.push_back(std::abs(st.J - pt.J_integral));
                            break;
                        }
                }
            }
            for (const auto& sb : cs.entries) {
                if (sb.label != classify::StateLabel::Bulk) continue;
                for (const auto& se : cs.entries) {
                    if (se.label == classify::StateLabel::LeftEdge ||
                        se.label == classify::StateLabel::RightEdge)
                        min_dist = std::min(min_dist, std::abs(sb.E - se.E));
                }
            }
            row.median_shift = median_of(shifts);
            row.median_dJ = median_of(dJs);
            row.min_label_dist = std::isfinite(min_dist) ? min_dist : -1.0;
            row.ratio = (row.bulk > 0 && row.max_bulk_J > 0.0)
                            ? row.min_edge_J / row.max_bulk_J
                            : std::numeric_limits<double>::infinity();
            lr.rows[static_cast<size_t>(s)] = std::move(row);
        });

        double se = 0.0, sb = 0.0;
        std::vector<double> maxJ;
        long pass = 0;
        for (const auto& row : lr.rows) {
            se += row.left + row.right;
            sb += row.bulk;
            maxJ.push_back(row.max_bulk_J);
            if (row.ratio >= ratio_threshold) ++pass;
        }
        lr.mean_edge_count = se / n_seeds;
        lr.mean_bulk_count = sb / n_seeds;
        lr.median_max_bulk_J = median_of(maxJ);
        lr.ratio_pass_fraction = static_cast<double>(pass) / n_seeds;
        rep.per_L.push_back(std::move(lr));
    }

    std::vector<double> Ls, ecounts, bcounts;
    for (const auto& lr : rep.per_L) {
        Ls.push_back(lr.L);
        ecounts.push_back(lr.mean_edge_count);
        bcounts.push_back(lr.mean_bulk_count);
    }
    rep.edge_fit_exponent = loglog_slope(Ls, ecounts);
    rep.bulk_fit_exponent = loglog_slope(Ls, bcounts);

    // gamma surrogate: ln(median max bulk J) against B (log L)^2
    {
        double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
        int m = 0;
        for (const auto& lr : rep.per_L) {
            if (!(lr.median_max_bulk_J > 0.0)) continue;
            const double u = base.B * std::log(lr.L) * std::log(lr.L);
            const double v = std::log(lr.median_max_bulk_J);
            su += u; sv += v; suu += u * u; suv += u * v;
            ++m;
        }
        rep.gamma_slope = (m >= 2) ? (m * suv - su * sv) / (m * suu - su * su)
                                   : std::numeric_limits<double>::quiet_NaN();
    }
    // probability bookkeeping: fit theta from the failure frequency of the
    // ratio criterion, s = min(theta, p - 6)
    {
        double theta = std::numeric_limits<double>::infinity();
        for (const auto& lr : rep.per_L) {
            const double fail = 1.0 - lr.ratio_pass_fraction;
            if (fail > 0.0 && fail < 1.0)
                theta = std::min(theta, -std::log(fail) / std::log(lr.L));
        }
        const double pm6 = static_cast<double>(rep.p - 6);
        rep.s_bookkeeping = std::isfinite(theta) ? std::min(theta, pm6) : pm6;
    }
    return rep;
}

HallResult hall_current(const classify::ClassifiedSpectrum& cs, double mu_l, double mu_r,
                        double E_F, double L, double plateau_frac, int plateau_points) {
    if (!(cs.lo < mu_l && mu_l < E_F && E_F < mu_r && mu_r < cs.hi))
        throw std::invalid_argument(
            "hall_current: ordering B/2+eps < mu_l < E_F < mu_r < B/2+V0 violated");
    HallResult h;
    h.mu_l = mu_l;
    h.mu_r = mu_r;
    h.E_F = E_F;

    auto total_current = [&](double ef) {
        double I = 0.0;
        int fl = 0, fr = 0, fb = 0, amb = 0;
        for (const auto& st : cs.entries) {
            switch (st.label) {
                case classify::StateLabel::LeftEdge:
                    if (st.E <= mu_l) { I += st.J / L; ++fl; }
                    break;
                case classify::StateLabel::RightEdge:
                    if (st.E <= mu_r) { I += st.J / L; ++fr; }
                    break;
                case classify::StateLabel::Bulk:
                    if (st.E <= ef) { I += st.J / L; ++fb; }
                    break;
                case classify::StateLabel::Ambiguous:
                    ++amb;
                    break;
            }
        }
        h.filled_left = fl;
        h.filled_right = fr;
        h.filled_bulk = fb;
        h.skipped_ambiguous = amb;
        return I;
    };

    h.I = total_current(E_F);
    h.predicted = (mu_r - mu_l) / (2.0 * 3.14159265358979323846);
    h.normalized = h.I / h.predicted;
    h.bulk_budget = h.filled_bulk * cs.max_bulk_absJ / L;

    const double span = plateau_frac * (cs.hi - cs.lo);
    for (int i = 0; i < plateau_points; ++i) {
        const double ef = std::min(mu_r * (1.0 - 1e-12),
                                   std::max(mu_l * (1.0 + 1e-12),
                                            E_F - 0.5 * span + span * i / (plateau_points - 1)));
        h.plateau.emplace_back(ef, total_current(ef));
    }
    double spread = 0.0;
    for (const auto& [ef, I] : h.plateau)
        spread = std::max(spread, std::abs(I - h.I));
    h.plateau_spread = (h.I != 0.0) ? spread / std::abs(h.I) : spread;
    // restore headline fill counters
    h.I = total_current(E_F);
    return h;
}

H1H2Report run_h1_h2_diagnostics(const model::ModelParams& p, int n_seeds, int resolution,
                                 double proxy_threshold) {
    p.validate();
    H1H2Report rep;
    rep.n_seeds = n_seeds;
    rep.proxy_threshold = proxy_threshold;
    const double lo = p.window_lo(), hi = p.window_hi();

    auto mb = basis::build_mixed_basis(p, resolution);
    auto left = edge::edge_branch_window(p, model::Side::left, *mb);
    auto right = edge::edge_branch_window(p, model::Side::right, *mb);
    auto h1 = edge::check_h1(left, right, lo, hi, 1e-6);
    rep.d_epsilon = h1.d_epsilon;
    rep.h1_pass = h1.pass;

    rep.h2_proxies.assign(static_cast<size_t>(n_seeds), 0.0);
    par::parallel_for(n_seeds, [&](std::int64_t s) {
        auto r = model::sample_disorder(p, static_cast<std::uint64_t>(s));
        auto census = bulk_census_full(p, *mb, r, lo, hi);
        double worst = 0.0;
        for (const auto& pair : census.pairs) {
            auto dp = classify::decay_profile(pair, *mb);
            worst = std::max(worst, dp.h2_proxy);
        }
        rep.h2_proxies[static_cast<size_t>(s)] = worst;
    });
    rep.h2_median = median_of(rep.h2_proxies);
    long pass = 0;
    for (double v : rep.h2_proxies)
        if (v <= proxy_threshold) ++pass;
    rep.pass_fraction = static_cast<double>(pass) / n_seeds;
    const double fail = 1.0 - rep.pass_fraction;
    rep.theta_fit = (fail > 0.0 && fail < 1.0) ? -std::log(fail) / std::log(p.L) : 0.0;
    return rep;
}

} // namespace qhc::experiments
