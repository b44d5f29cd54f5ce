#include <doctest.h>

#include <rbslip/stokes.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "support/trig_poly.hpp"

using namespace rbslip;
using testsupport::TrigPoly;
using testsupport::biharmonic_apply;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

GridPtr make_grid(int nx, int nz, double height, double length, SlipLength slip,
                  double buoyancy = 1.0) {
  SlabParams p{height, length, buoyancy, slip, 1};
  return Grid::create(p, nx, nz);
}

// theta(y,z) = profile(z) cos(2 pi s y / L); the exact response of mode s.
ScalarField cosine_theta(GridPtr g, int s, const std::vector<double>& profile) {
  ScalarField th(g);
  Eigen::MatrixXd phys(g->nlevels(), g->nmodes());
  for (int m = 0; m < g->nmodes(); ++m)
    for (int j = 0; j < g->nlevels(); ++j)
      phys(j, m) = profile[j] * std::cos(2.0 * kPi * s * g->ypoint(m) / g->params().length);
  th.set_physical(phys);
  return th;
}

}  // namespace

TEST_CASE("mode problem reproduces a polynomial with inhomogeneous wall data") {
  const double h = 1.7, k2 = 3.3, sigma = 0.4;
  Cheb cheb(16, h);
  TrigPoly w = TrigPoly::poly({0.2, -1.0, 0.8, 0.5, -0.3, 0.1, 0.07, -0.02});
  TrigPoly rhs = biharmonic_apply(w, k2);
  TrigPoly dw = w.deriv(), d2w = dw.deriv();

  ModeBvp bvp(cheb, k2, SlipLength::finite(sigma));
  Eigen::VectorXd b(17);
  for (int j = 0; j <= 16; ++j) b[j] = rhs.eval(cheb.z[j]);
  b[bvp.row_top_value()] = w.eval(h);
  b[bvp.row_top_tangential()] = dw.eval(h) + sigma * d2w.eval(h);
  b[bvp.row_bottom_tangential()] = dw.eval(0.0) - sigma * d2w.eval(0.0);
  b[bvp.row_bottom_value()] = w.eval(0.0);

  Eigen::VectorXd x = bvp.solve(b);
  for (int j = 0; j <= 16; ++j) CHECK(x[j] == doctest::Approx(w.eval(cheb.z[j])).epsilon(1e-11));
}

TEST_CASE("free-slip response of a single sine profile is closed form") {
  const double h = 2.0, length = 3.0, big_r = 40.0;
  auto g = make_grid(16, 24, h, length, SlipLength::free_slip(), big_r);
  const int s = 2;
  const double k = 2.0 * kPi * s / length, mu = 3.0 * kPi / h;

  std::vector<double> prof(g->nlevels());
  for (int j = 0; j < g->nlevels(); ++j) prof[j] = std::sin(mu * g->cheb().z[j]);
  ScalarField theta = cosine_theta(g, s, prof);
  VelocityField u = solve_stokes(theta, g->params());

  const double gain = big_r * k * k / std::pow(mu * mu + k * k, 2);
  Eigen::MatrixXd w = u.w.physical();
  double err = 0.0;
  for (int m = 0; m < g->nmodes(); ++m)
    for (int j = 0; j < g->nlevels(); ++j) {
      double exact = gain * std::sin(mu * g->cheb().z[j]) *
                     std::cos(2.0 * kPi * s * g->ypoint(m) / length);
      err = std::max(err, std::abs(w(j, m) - exact));
    }
  CHECK(err / gain < 1e-11);
  CHECK(u.incompressibility_residual() < 1e-10);
}

TEST_CASE("navier-slip response matches a manufactured wall-flat solution") {
  // z^3 (h-z)^3 vanishes with two derivatives at both walls, so the same
  // profile solves every wall family; the right-hand side is exact calculus.
  const double h = 1.3, length = 2.0;
  for (double sig : {0.0, 0.5, 3.0}) {
    auto slip = SlipLength::finite(sig);
    auto g = make_grid(8, 20, h, length, slip);
    const int s = 1;
    const double k = 2.0 * kPi * s / length, k2 = k * k;

    const double h2 = h * h;
    TrigPoly w = TrigPoly::poly({0.0, 0.0, 0.0, h2 * h, -3.0 * h2, 3.0 * h, -1.0});
    TrigPoly rhs = biharmonic_apply(w, k2);
    std::vector<double> prof(g->nlevels());
    for (int j = 0; j < g->nlevels(); ++j) prof[j] = rhs.eval(g->cheb().z[j]) / k2;
    ScalarField theta = cosine_theta(g, s, prof);

    VelocityField u = solve_stokes(theta, g->params());
    Eigen::MatrixXd wp = u.w.physical();
    Eigen::MatrixXd vp = u.v[0].physical();
    TrigPoly dw = w.deriv();
    double errw = 0.0, errv = 0.0, scale = 0.0;
    for (int m = 0; m < g->nmodes(); ++m)
      for (int j = 0; j < g->nlevels(); ++j) {
        double y = g->ypoint(m), z = g->cheb().z[j];
        double cw = std::cos(2.0 * kPi * s * y / length);
        double sw = std::sin(2.0 * kPi * s * y / length);
        errw = std::max(errw, std::abs(wp(j, m) - w.eval(z) * cw));
        errv = std::max(errv, std::abs(vp(j, m) + dw.eval(z) * sw / k));
        scale = std::max(scale, std::abs(w.eval(z)));
      }
    CHECK(errw / scale < 1e-11);
    CHECK(errv / scale < 1e-10);
    CHECK(u.incompressibility_residual() < 1e-10);
  }
}

TEST_CASE("vertical velocity converges spectrally for a smooth source") {
  const double h = 1.0, length = 2.0, sigma = 0.5;
  const int s = 2;
  const double k = 2.0 * kPi * s / length, k2 = k * k;
  TrigPoly w = TrigPoly::sin_part(3.0 * kPi / h, {0.0, 0.0, h * h, -2.0 * h, 1.0});
  TrigPoly rhs = biharmonic_apply(w, k2);

  auto run = [&](int nz) {
    auto g = make_grid(8, nz, h, length, SlipLength::finite(sigma));
    std::vector<double> prof(g->nlevels());
    for (int j = 0; j < g->nlevels(); ++j) prof[j] = rhs.eval(g->cheb().z[j]) / k2;
    ScalarField theta = cosine_theta(g, s, prof);
    Eigen::MatrixXd wp = solve_stokes(theta, g->params()).w.physical();
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < g->nmodes(); ++m)
      for (int j = 0; j < g->nlevels(); ++j) {
        double y = g->ypoint(m), z = g->cheb().z[j];
        err = std::max(err, std::abs(wp(j, m) - w.eval(z) * std::cos(k * y)));
        scale = std::max(scale, std::abs(w.eval(z)));
      }
    return err / scale;
  };

  double e16 = run(16), e32 = run(32), e64 = run(64);
  CHECK(e64 < 1e-10);
  CHECK(e16 / (e32 + 1e-300) > 1e3);
}

TEST_CASE("mean mode and unresolved lines carry no flow") {
  auto g = make_grid(8, 12, 1.0, 2.0, SlipLength::noslip(), 10.0);
  ScalarField theta(g);
  // pure horizontal mean: theta = profile(z)
  for (int j = 0; j < g->nlevels(); ++j) theta.at(j, 0) = g->cheb().z[j] * (1.0 - g->cheb().z[j]);
  VelocityField u = solve_stokes(theta, g->params());
  CHECK(u.w.coeffs().cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.v[0].coeffs().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("half-slab source truncations add up to the full solve") {
  auto g = make_grid(16, 21, 1.0, 2.0, SlipLength::noslip(), 5.0);
  ScalarField theta = random_smooth_field(g, 77, 1.0);
  ScalarField lo = solve_truncated(theta, g->params());
  ScalarField hi = solve_truncated_upper(theta, g->params());
  ScalarField full = solve_noslip(theta, g->params()).w;
  double scale = full.coeffs().cwiseAbs().maxCoeff();
  CHECK((lo.coeffs() + hi.coeffs() - full.coeffs()).cwiseAbs().maxCoeff() < 1e-12 * scale);
  CHECK(lo.hermitian_error() < 1e-13 * scale);
}

TEST_CASE("solutions stay hermitian for random sources") {
  for (double sig : {0.0, 1.0}) {
    auto g = make_grid(32, 16, 1.0, 2.0, SlipLength::finite(sig), 3.0);
    ScalarField theta = random_smooth_field(g, 5, 1.0);
    VelocityField u = solve_stokes(theta, g->params());
    double scale = u.w.coeffs().cwiseAbs().maxCoeff();
    CHECK(u.w.hermitian_error() < 1e-13 * scale);
    CHECK(u.v[0].hermitian_error() < 1e-13 * scale);
    CHECK(u.finite());
  }
}

TEST_CASE("decaying-basis solver satisfies its boundary rows and the equation") {
  const double k = 2.3, h = 4.0, sigma = 0.7;
  std::array<BoundaryRow, 4> rows = {
      dirichlet_row(0, {0.3, -0.2}),
      tangential_row(0, SlipLength::finite(sigma), {1.1, 0.0}),
      dirichlet_row(1, {-0.5, 0.9}),
      tangential_row(1, SlipLength::finite(sigma), {0.0, 0.4}),
  };
  BiharmonicProfile f = solve_biharmonic_homogeneous(k, h, rows);

  auto d = [&](double z, int n) { return f.eval(z, n); };
  CHECK(std::abs(d(0.0, 0) - std::complex<double>(0.3, -0.2)) < 1e-12);
  CHECK(std::abs(d(0.0, 1) - sigma * d(0.0, 2) - std::complex<double>(1.1, 0.0)) < 1e-12);
  CHECK(std::abs(d(h, 0) - std::complex<double>(-0.5, 0.9)) < 1e-12);
  CHECK(std::abs(d(h, 1) + sigma * d(h, 2) - std::complex<double>(0.0, 0.4)) < 1e-12);

  // residual of (d^2 - k^2)^2 f at interior points, via the basis derivatives
  for (double z : {0.3, 1.7, 2.9, 3.6}) {
    std::complex<double> r = d(z, 4) - 2.0 * k * k * d(z, 2) + std::pow(k, 4) * d(z, 0);
    CHECK(std::abs(r) < 1e-10);
  }

  // derivative order 1 agrees with a central difference
  const double dz = 1e-6;
  std::complex<double> fd = (f.eval(2.0 + dz) - f.eval(2.0 - dz)) / (2.0 * dz);
  CHECK(std::abs(fd - f.eval(2.0, 1)) < 1e-7);
}
