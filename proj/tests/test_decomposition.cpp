#include <cmath>

#include "doctest.h"
#include "rbslip/decomposition.hpp"

using namespace rbslip;

namespace {

GridPtr make_grid(double sigma_or_neg_for_free) {
    SlabParams p;
    p.height = 10.0;
    p.length = 12.0;
    p.buoyancy = 1.0;
    p.slip = sigma_or_neg_for_free < 0 ? SlipLength::free_slip()
                                       : SlipLength::finite(sigma_or_neg_for_free);
    p.hdim = 1;
    return Grid::create(p, 32, 48);
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("correction split closes to roundoff") {
    for (double sig : {0.1, 1.0, 10.0}) {
        GridPtr g = make_grid(sig);
        for (unsigned long long seed : {11ull, 12ull, 13ull}) {
            ScalarField theta = random_smooth_field(g, seed, 0.05);
            Decomposition d = decomposition_suite(theta, g->params());
            CAPTURE(sig);
            CAPTURE(seed);
            CHECK(d.residual < 1e-8);
        }
    }
}

TEST_CASE("pieces are genuine: neither half is the whole correction") {
    GridPtr g = make_grid(1.0);
    ScalarField theta = random_smooth_field(g, 5, 0.05);
    Decomposition d = decomposition_suite(theta, g->params());
    double corr = max_abs(d.w_slip.coeffs() - d.w_noslip.coeffs());
    CHECK(corr > 0.0);
    CHECK(max_abs(d.h_sigma.coeffs()) > 1e-3 * corr);
    CHECK(max_abs(d.g_sigma.coeffs()) > 1e-3 * corr);
}

TEST_CASE("reflection symmetry ties the two halves together") {
    // g[theta] = reflect(h[reflect(theta)]): reflecting the temperature swaps
    // the lower- and upper-half sources, and the no-slip problem is mirror
    // symmetric.
    for (double sig : {0.5, 4.0}) {
        GridPtr g = make_grid(sig);
        ScalarField theta = random_smooth_field(g, 21, 0.05);
        Decomposition direct = decomposition_suite(theta, g->params());
        Decomposition mirrored = decomposition_suite(theta.reflect_z(), g->params());
        ScalarField back = mirrored.h_sigma.reflect_z();
        double scale = std::max(max_abs(direct.g_sigma.coeffs()), 1e-30);
        double dev = max_abs(direct.g_sigma.coeffs() - back.coeffs());
        CAPTURE(sig);
        CHECK(dev < 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("no slip means no correction") {
    GridPtr g = make_grid(0.0);
    ScalarField theta = random_smooth_field(g, 3, 0.05);
    Decomposition d = decomposition_suite(theta, g->params());
    CHECK(d.residual == 0.0);
    CHECK(max_abs(d.h_sigma.coeffs()) == 0.0);
    CHECK(max_abs(d.g_sigma.coeffs()) == 0.0);
    CHECK(max_abs(d.w_slip.coeffs() - d.w_noslip.coeffs()) < 1e-14);
}

TEST_CASE("free slip has no finite slip length to split with") {
    GridPtr g = make_grid(-1.0);
    ScalarField theta = random_smooth_field(g, 3, 0.05);
    CHECK_THROWS_AS((void)decomposition_suite(theta, g->params()), ParamError);
}

TEST_CASE("halves keep the Hermitian pairing") {
    GridPtr g = make_grid(2.0);
    ScalarField theta = random_smooth_field(g, 33, 0.05);
    Decomposition d = decomposition_suite(theta, g->params());
    CHECK(d.h_sigma.hermitian_error() < 1e-13);
    CHECK(d.g_sigma.hermitian_error() < 1e-13);
}
