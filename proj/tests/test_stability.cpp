#include <cmath>

#include "doctest.h"
#include "rbslip/stability.hpp"
#include "support/shooting.hpp"

using namespace rbslip;

TEST_CASE("free-slip onset hits the classical closed form") {
    // Ra(k) = (pi^2 + k^2)^3 / k^2, minimized at k = pi/sqrt(2).
    const double ra_exact = 27.0 * std::pow(M_PI, 4) / 4.0;  // 657.5114...
    const double k_exact = M_PI / std::sqrt(2.0);

    Onset o = critical_rayleigh(SlipLength::free_slip());
    CHECK(std::abs(o.ra_c - ra_exact) / ra_exact < 1e-9);
    CHECK(std::abs(o.k_c - k_exact) < 1e-5);  // section tolerance, not physics

    shooting::Onset s = shooting::critical({0.0, true});
    CHECK(std::abs(s.ra_c - ra_exact) / ra_exact < 1e-8);
    CHECK(std::abs(s.k_c - k_exact) < 1e-4);
}

TEST_CASE("no-slip onset matches the shooting oracle and the known constant") {
    Onset o = critical_rayleigh(SlipLength::noslip());
    CHECK(std::abs(o.ra_c - 1707.7618) / 1707.7618 < 1e-3);
    CHECK(std::abs(o.k_c - 3.1163) < 5e-3);

    shooting::Onset s = shooting::critical({0.0, false});
    CHECK(std::abs(o.ra_c - s.ra_c) / s.ra_c < 1e-8);
    CHECK(std::abs(o.k_c - s.k_c) < 5e-5);
}

TEST_CASE("finite-slip neutral curve agrees with shooting pointwise") {
    for (double sig : {0.1, 0.7, 3.0}) {
        for (double k : {2.0, 3.0, 4.5}) {
            double lib = neutral_rayleigh(k, SlipLength::finite(sig));
            double ora = shooting::neutral_ra(k, {sig, false});
            CAPTURE(sig);
            CAPTURE(k);
            CHECK(std::abs(lib - ora) / ora < 1e-8);
        }
    }
    // free slip pointwise too
    double lib = neutral_rayleigh(2.0, SlipLength::free_slip());
    double exact = std::pow(M_PI * M_PI + 4.0, 3) / 4.0;
    CHECK(std::abs(lib - exact) / exact < 1e-9);
}

TEST_CASE("critical Rayleigh number decreases with slip") {
    double prev = critical_rayleigh(SlipLength::noslip()).ra_c;
    for (double sig : {0.1, 1.0, 10.0}) {
        double cur = critical_rayleigh(SlipLength::finite(sig)).ra_c;
        CHECK(cur < prev);
        prev = cur;
    }
    double free_ra = critical_rayleigh(SlipLength::free_slip()).ra_c;
    CHECK(free_ra < prev);
}

TEST_CASE("growth rate changes sign across the neutral curve") {
    const double k = 3.1;
    double ra_n = neutral_rayleigh(k, SlipLength::noslip());
    CHECK(linear_growth_rate(k, 0.95 * ra_n, SlipLength::noslip()) < 0.0);
    CHECK(linear_growth_rate(k, 1.05 * ra_n, SlipLength::noslip()) > 0.0);
    CHECK(std::abs(linear_growth_rate(k, ra_n, SlipLength::noslip())) < 1e-6 * ra_n);

    // deep subcritical: decay rate approaches the conduction spectrum
    double g = linear_growth_rate(2.0, 10.0, SlipLength::noslip());
    CHECK(g < 0.0);
}

TEST_CASE("parameter guards") {
    CHECK_THROWS_AS((void)linear_growth_rate(-1.0, 100.0, SlipLength::noslip()), ParamError);
    CHECK_THROWS_AS((void)linear_growth_rate(1.0, 100.0, SlipLength::noslip(), 4), ParamError);
    CHECK_THROWS_AS((void)neutral_rayleigh(0.0, SlipLength::noslip()), ParamError);
}
