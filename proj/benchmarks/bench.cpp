#include <benchmark/benchmark.h>

#include "rbslip/multiplier.hpp"
#include "rbslip/stepper.hpp"
#include "rbslip/stokes.hpp"

using namespace rbslip;

namespace {

GridPtr production_grid() {
    static GridPtr g = Grid::create(rescale(1.0e6, 2.0, SlipLength::noslip()), 256, 64);
    return g;
}

void bm_fft_roundtrip(benchmark::State& state) {
    GridPtr g = production_grid();
    SimState s = init_state(g->params(), g, 1, 0.05);
    Eigen::MatrixXcd phys(g->nlevels(), g->nmodes()), spec(g->nlevels(), g->nmodes());
    for (auto _ : state) {
        g->to_physical(s.tau.coeffs(), phys);
        g->to_spectral(phys, spec);
        benchmark::DoNotOptimize(spec.data());
    }
}
BENCHMARK(bm_fft_roundtrip);

void bm_stokes_solve(benchmark::State& state) {
    GridPtr g = production_grid();
    SimState s = init_state(g->params(), g, 1, 0.05);
    BiharmonicSolver solver(g, g->params().slip);
    (void)solve_stokes(s.tau, solver);  // warm the factorization cache
    for (auto _ : state) {
        VelocityField u = solve_stokes(s.tau, solver);
        benchmark::DoNotOptimize(u.w.coeffs().data());
    }
}
BENCHMARK(bm_stokes_solve);

void bm_time_step(benchmark::State& state) {
    GridPtr g = production_grid();
    SimState s = init_state(g->params(), g, 1, 0.05);
    StepperConfig cfg;
    cfg.dt = 1e-4;
    Stepper st(g, cfg);
    st.advance(s);  // warm factorizations and multistep memory
    for (auto _ : state) {
        st.advance(s);
        benchmark::DoNotOptimize(s.tau.coeffs().data());
    }
}
BENCHMARK(bm_time_step);

void bm_multiplier_profile(benchmark::State& state) {
    const double k = 2.0;
    SlabParams par;
    par.height = 10.0;
    par.length = 12.0;
    par.buoyancy = 1.0;
    par.slip = SlipLength::finite(3.0);
    Cheb cheb(64, par.height);
    for (auto _ : state) {
        for (int j = 0; j <= 64; ++j)
            benchmark::DoNotOptimize(m_sigma(k, cheb.z(j), par));
    }
}
BENCHMARK(bm_multiplier_profile);

}  // namespace

BENCHMARK_MAIN();
