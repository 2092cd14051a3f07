// Timing harness for the OpenMP kernels against the single-threaded
// reference path. Every kernel assigns each output element to exactly one
// task, so the comparison also asserts bit-identical results.

#include "qhc/edge.hpp"
#include "qhc/eigensolve.hpp"
#include "qhc/operators.hpp"
#include "qhc/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <thread>
#include <vector>

using namespace qhc;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Row {
    const char* name;
    double t_serial;
    double t_parallel;
    double max_diff;
};

void print(const Row& r) {
    std::printf("%-28s %10.3fs %10.3fs   x%-5.2f max|diff|=%.3g\n", r.name, r.t_serial,
                r.t_parallel, r.t_serial / std::max(1e-9, r.t_parallel), r.max_diff);
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (!std::strcmp(argv[i], "--quick")) quick = true;

    model::ModelParams p;
    p.B = 2.56;
    p.V0 = 0.6;
    p.epsilon = 0.004;
    p.L = quick ? 8.0 : 12.0;
    p.cl = p.c1 = 1.0 * p.B * p.B;
    p.cr = p.c2 = 1.3 * p.B * p.B;

    const int nthreads = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
    std::printf("benchmark at B=%g V0=%g L=%g, parallel path with %d threads\n", p.B, p.V0,
                p.L, nthreads);

    auto mb = basis::build_mixed_basis(p, 8);
    auto r = model::sample_disorder(p, 1);

    // 1) potential Fourier table + assembly
    Row rows[4];
    ops::BlockOperator h_serial, h_par;
    {
        par::set_threads(1);
        auto t0 = Clock::now();
        h_serial = ops::assemble_full(mb, p, r);
        rows[0].t_serial = seconds_since(t0);
        par::set_threads(nthreads);
        t0 = Clock::now();
        h_par = ops::assemble_full(mb, p, r);
        rows[0].t_parallel = seconds_since(t0);
        double d = 0.0;
        for (int ik = 0; ik < mb->Nk(); ++ik)
            for (int j = 0; j < mb->grid.Nx; ++j)
                d = std::max(d, std::abs(h_serial.diag[ik][j] - h_par.diag[ik][j]));
        for (int j = 0; j < mb->grid.Nx; ++j)
            for (int dq = -(mb->Nk() - 1); dq <= mb->Nk() - 1; ++dq)
                d = std::max(d, std::abs(h_serial.coupling->c(dq, j) - h_par.coupling->c(dq, j)));
        rows[0].name = "assemble_full";
        rows[0].max_diff = d;
        print(rows[0]);
    }

    // 2) shifted block factorization + solve
    {
        const double sigma = p.window_lo();
        std::vector<la::cplx> b(static_cast<size_t>(h_serial.dim()));
        for (size_t i = 0; i < b.size(); ++i)
            b[i] = la::cplx(std::sin(0.01 * static_cast<double>(i)), std::cos(0.02 * static_cast<double>(i)));
        par::set_threads(1);
        auto t0 = Clock::now();
        eig::BlockFactor f1(h_serial, sigma);
        auto x1 = b;
        f1.solve(x1.data());
        rows[1].t_serial = seconds_since(t0);
        par::set_threads(nthreads);
        t0 = Clock::now();
        eig::BlockFactor f2(h_par, sigma);
        auto x2 = b;
        f2.solve(x2.data());
        rows[1].t_parallel = seconds_since(t0);
        double d = 0.0;
        for (size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(x1[i] - x2[i]));
        rows[1].name = "block factor + solve";
        rows[1].max_diff = d;
        print(rows[1]);
    }

    // 3) edge branches over all momenta
    {
        par::set_threads(1);
        auto t0 = Clock::now();
        auto b1 = edge::edge_branch_window(p, model::Side::right, *mb);
        rows[2].t_serial = seconds_since(t0);
        par::set_threads(nthreads);
        t0 = Clock::now();
        auto b2 = edge::edge_branch_window(p, model::Side::right, *mb);
        rows[2].t_parallel = seconds_since(t0);
        double d = 0.0;
        for (size_t i = 0; i < b1.points.size(); ++i) {
            d = std::max(d, std::abs(b1.points[i].energy - b2.points[i].energy));
            d = std::max(d, std::abs(b1.points[i].J_integral - b2.points[i].J_integral));
        }
        rows[2].name = "edge branches";
        rows[2].max_diff = d;
        print(rows[2]);
    }

    // 4) operator application batch
    {
        const int reps = quick ? 40 : 200;
        std::vector<la::cplx> x(static_cast<size_t>(h_serial.dim())), y1(x.size()), y2(x.size());
        for (size_t i = 0; i < x.size(); ++i)
            x[i] = la::cplx(std::cos(0.03 * static_cast<double>(i)), std::sin(0.05 * static_cast<double>(i)));
        par::set_threads(1);
        auto t0 = Clock::now();
        for (int t = 0; t < reps; ++t) h_serial.matvec(x.data(), y1.data());
        rows[3].t_serial = seconds_since(t0);
        par::set_threads(nthreads);
        t0 = Clock::now();
        for (int t = 0; t < reps; ++t) h_par.matvec(x.data(), y2.data());
        rows[3].t_parallel = seconds_since(t0);
        double d = 0.0;
        for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(y1[i] - y2[i]));
        rows[3].name = "matvec batch";
        rows[3].max_diff = d;
        print(rows[3]);
    }

    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, row.max_diff);
    if (worst != 0.0) {
        std::printf("FAIL: parallel path deviates from the serial reference (%.3g)\n", worst);
        return 1;
    }
    std::printf("parallel results identical to the serial reference\n");
    return 0;
}
