#include <cmath>
#include <cstdio>
#include <limits>

#include "doctest.h"
#include "rbslip/diagnostics.hpp"
#include "rbslip/stability.hpp"
#include "rbslip/stepper.hpp"

using namespace rbslip;

namespace {

GridPtr small_grid(double ra, SlipLength slip, double aspect = 2.0, int nx = 32, int nz = 32) {
    SlabParams p = original_params(ra, aspect, slip);
    return Grid::create(p, nx, nz);
}

bool identical(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

}  // namespace

TEST_CASE("conduction is an exact fixed point") {
    GridPtr g = small_grid(1.0e4, SlipLength::noslip());
    SimState s = init_state(g->params(), g, 1, 0.0);  // zero amplitude
    Stepper st(g, {});
    for (int i = 0; i < 5; ++i) st.advance(s);
    CHECK(s.tau.coeffs().cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.step_count == 5);
}

TEST_CASE("serial reruns are bit-identical") {
    auto run = [] {
        GridPtr g = small_grid(5.0e4, SlipLength::finite(0.02));
        SimState s = init_state(g->params(), g, 42, 0.05);
        Stepper st(g, {});
        for (int i = 0; i < 20; ++i) st.advance(s);
        return s;
    };
    SimState a = run(), b = run();
    CHECK(identical(a.tau.coeffs(), b.tau.coeffs()));
    CHECK(a.time == b.time);
}

TEST_CASE("walls stay pinned and the spectrum stays Hermitian") {
    GridPtr g = small_grid(8.0e4, SlipLength::free_slip());
    SimState s = init_state(g->params(), g, 3, 0.08);
    Stepper st(g, {});
    for (int i = 0; i < 25; ++i) st.advance(s);
    const int bottom = g->nlevels() - 1;
    CHECK(s.tau.coeffs().row(0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.tau.coeffs().row(bottom).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.tau.hermitian_error() < 1e-13);
    CHECK(maximum_principle_overshoot(s.tau) < 0.05);
}

TEST_CASE("stepping commutes with horizontal translation") {
    GridPtr g = small_grid(5.0e4, SlipLength::noslip());
    SimState a = init_state(g->params(), g, 11, 0.05);
    SimState b = a;
    b.tau = a.tau.translate(5);

    StepperConfig cfg;
    cfg.dt = 1e-4;
    Stepper sta(g, cfg), stb(g, cfg);
    for (int i = 0; i < 10; ++i) {
        sta.advance(a);
        stb.advance(b);
    }
    ScalarField moved = a.tau.translate(5);
    double scale = moved.coeffs().cwiseAbs().maxCoeff();
    CHECK((moved.coeffs() - b.tau.coeffs()).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("second-order self-convergence in dt") {
    GridPtr g = small_grid(5.0e3, SlipLength::free_slip(), 2.0, 16, 24);
    const double t_end = 0.04;

    auto integrate = [&](double dt) {
        SimState s = init_state(g->params(), g, 9, 0.05);
        StepperConfig cfg;
        cfg.dt = dt;
        Stepper st(g, cfg);
        int n = int(std::round(t_end / dt));
        for (int i = 0; i < n; ++i) st.advance(s);
        return s.tau;
    };

    ScalarField c1 = integrate(4.0e-4);
    ScalarField c2 = integrate(2.0e-4);
    ScalarField c3 = integrate(1.0e-4);
    double e12 = (c1.coeffs() - c2.coeffs()).cwiseAbs().maxCoeff();
    double e23 = (c2.coeffs() - c3.coeffs()).cwiseAbs().maxCoeff();
    CHECK(e23 > 0.0);
    double order = std::log2(e12 / e23);
    CHECK(order > 1.8);
    CHECK(order < 2.6);
}

TEST_CASE("growth of a tiny perturbation matches the linear eigenvalue") {
    const double k = 3.1, ra = 2500.0;
    SlipLength slip = SlipLength::noslip();
    const double aspect = 2.0 * M_PI / k;  // mode 1 carries wavenumber k
    GridPtr g = small_grid(ra, slip, aspect, 16, 48);

    SimState s;
    s.grid = g;
    s.tau = ScalarField(g);
    const double amp = 1e-8;
    for (int j = 0; j < g->nlevels(); ++j) {
        double prof = amp * std::sin(M_PI * g->cheb().z(j));
        s.tau.coeffs()(j, 1) = 0.5 * prof;
        s.tau.coeffs()(j, g->conj_index(1)) = 0.5 * prof;
    }

    StepperConfig cfg;
    cfg.dt = 5e-4;
    Stepper st(g, cfg);
    auto mode_norm = [&] { return s.tau.coeffs().col(1).norm(); };

    // discard startup, then fit the exponential rate over a clean window
    while (s.time < 0.1 - 1e-12) st.advance(s);
    double n1 = mode_norm(), t1 = s.time;
    while (s.time < 0.3 - 1e-12) st.advance(s);
    double rate = std::log(mode_norm() / n1) / (s.time - t1);

    double lambda = linear_growth_rate(k, ra, slip, 48);
    CHECK(rate == doctest::Approx(lambda).epsilon(2e-3));
}

TEST_CASE("subcritical dynamics relax to pure conduction") {
    for (auto slip : {SlipLength::noslip(), SlipLength::free_slip()}) {
        GridPtr g = small_grid(500.0, slip, 2.0, 16, 24);
        SimState s = init_state(g->params(), g, 5, 0.05);
        Stepper st(g, {});
        RunOptions opt;
        opt.t_end = 20.0;  // the mean mode drains on the slow diffusive scale
        RunResult res = run_until(s, st, opt);
        NusseltReport rep = nusselt_snapshot(s.tau, st.velocity_for(s));
        CHECK(std::abs(rep.flux - 1.0) < 1e-6);
        CHECK(std::abs(rep.boundary - 1.0) < 1e-6);
        CHECK(std::abs(rep.dissipation - 1.0) < 1e-6);
        CHECK(res.series.size() > 10);
    }
}

TEST_CASE("steadiness criterion stops a settled run early") {
    GridPtr g = small_grid(100.0, SlipLength::noslip(), 2.0, 16, 24);
    SimState s = init_state(g->params(), g, 5, 0.05);
    Stepper st(g, {});
    RunOptions opt;
    opt.t_end = 25.0;
    opt.steady_tol = 1e-8;
    opt.steady_window = 4.0;
    RunResult res = run_until(s, st, opt);
    CHECK(res.reached_steady);
    CHECK(s.time < 20.0);
}

TEST_CASE("fixed steps beyond the advective limit are rejected with advice") {
    GridPtr g = small_grid(1.0e6, SlipLength::noslip());
    SimState s = init_state(g->params(), g, 2, 0.05);
    StepperConfig cfg;
    cfg.dt = 1.0e9;
    Stepper st(g, cfg);
    bool rejected = false;
    try {
        st.advance(s);
    } catch (const StepRejected& e) {
        rejected = true;
        CHECK(e.admissible_dt > 0.0);
        CHECK(e.admissible_dt < 1.0e9);
    }
    CHECK(rejected);
    CHECK(s.step_count == 0);  // state untouched
}

TEST_CASE("non-finite fields abort with the last valid time") {
    GridPtr g = small_grid(1.0e4, SlipLength::noslip());
    SimState s = init_state(g->params(), g, 2, 0.05);
    Stepper st(g, {});
    st.advance(s);
    double t_ok = s.time;
    s.tau.coeffs()(3, 1) = std::numeric_limits<double>::quiet_NaN();
    bool blew = false;
    try {
        st.advance(s);
    } catch (const BlowUpError& e) {
        blew = true;
        CHECK(e.last_valid_time == t_ok);
    }
    CHECK(blew);
}

TEST_CASE("checkpoints restore runs bit-exactly") {
    const char* path = "stepper_ckpt_roundtrip.bin";
    GridPtr g = small_grid(5.0e4, SlipLength::finite(0.01));
    SimState s = init_state(g->params(), g, 77, 0.06);
    Stepper st(g, {});
    for (int i = 0; i < 7; ++i) st.advance(s);
    save_checkpoint(s, path);

    SimState r = load_checkpoint(path);
    CHECK(identical(r.tau.coeffs(), s.tau.coeffs()));
    CHECK(r.time == s.time);
    CHECK(r.step_count == s.step_count);
    CHECK(r.have_prev == s.have_prev);
    CHECK(identical(r.explicit_prev.coeffs(), s.explicit_prev.coeffs()));
    CHECK(r.grid->params().slip == s.grid->params().slip);

    // both continuations stay in lockstep
    Stepper str(r.grid, {});
    for (int i = 0; i < 5; ++i) {
        st.advance(s);
        str.advance(r);
    }
    CHECK(identical(r.tau.coeffs(), s.tau.coeffs()));
    std::remove(path);

    CHECK_THROWS_AS((void)load_checkpoint("no_such_checkpoint.bin"), IoError);
}

TEST_CASE("guards on configuration") {
    GridPtr g = small_grid(1.0e4, SlipLength::noslip());
    CHECK_THROWS_AS((void)init_state(g->params(), g, 1, 0.5), ParamError);
    StepperConfig bad;
    bad.cfl = 0.0;
    CHECK_THROWS_AS(Stepper(g, bad), ParamError);
    bad = {};
    bad.dt = -1.0;
    CHECK_THROWS_AS(Stepper(g, bad), ParamError);
}
