#include <doctest.h>

#include <rbslip/field.hpp>
#include <rbslip/grid.hpp>
#include <rbslip/operators.hpp>

#include <cmath>
#include <complex>
#include <set>

using namespace rbslip;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

GridPtr make_grid(int nx, int nz, double height, double length, int hdim = 1) {
  SlabParams p{height, length, 1.0, SlipLength::noslip(), hdim};
  return Grid::create(p, nx, nz);
}

}  // namespace

TEST_CASE("grid mode bookkeeping in one horizontal dimension") {
  auto g = make_grid(16, 8, 2.0, 4.0);
  CHECK(g->nmodes() == 16);
  CHECK(g->nz() == 8);

  int retained = 0;
  for (int m = 0; m < g->nmodes(); ++m) {
    const Mode& md = g->mode(m);
    if (md.retained) ++retained;
    if (std::abs(md.sx) == 8) CHECK_FALSE(md.retained);
    CHECK(md.kx == doctest::Approx(2.0 * kPi * md.sx / 4.0));
    CHECK(md.k2 == doctest::Approx(md.kx * md.kx));
  }
  CHECK(retained == 15);

  // conjugate pairing is an involution that negates the signed index
  for (int m = 0; m < g->nmodes(); ++m) {
    int mc = g->conj_index(m);
    if (g->mode(m).retained) CHECK(g->mode(mc).sx == -g->mode(m).sx);
    CHECK(g->conj_index(mc) == m);
  }

  // two-thirds rule
  for (int m = 0; m < g->nmodes(); ++m) {
    bool expect = g->mode(m).retained && std::abs(g->mode(m).sx) <= 16 / 3;
    CHECK(g->mode(m).dealias_keep == expect);
  }

  // half spectrum covers every retained mode exactly once via conjugation
  std::set<int> seen;
  for (int m : g->half_modes()) {
    seen.insert(m);
    if (g->conj_index(m) != m) seen.insert(g->conj_index(m));
  }
  for (int m = 0; m < g->nmodes(); ++m) CHECK(seen.count(m) == size_t(g->mode(m).retained));
}

TEST_CASE("grid mode bookkeeping in two horizontal dimensions") {
  auto g = make_grid(8, 4, 1.0, 2.0, 2);
  CHECK(g->nmodes() == 64);
  for (int m = 0; m < g->nmodes(); ++m) {
    const Mode& md = g->mode(m);
    CHECK(md.k2 == doctest::Approx(md.kx * md.kx + md.ky * md.ky));
    if (md.retained) {
      int mc = g->conj_index(m);
      CHECK(g->mode(mc).sx == -md.sx);
      CHECK(g->mode(mc).sy == -md.sy);
    }
  }
  std::set<int> seen;
  for (int m : g->half_modes()) {
    seen.insert(m);
    seen.insert(g->conj_index(m));
  }
  for (int m = 0; m < g->nmodes(); ++m) CHECK(seen.count(m) == size_t(g->mode(m).retained));
}

TEST_CASE("physical roundtrip preserves smooth real data") {
  auto g = make_grid(16, 10, 1.5, 2.0);
  ScalarField f(g);
  auto fn = [&](double y, double z) {
    return std::cos(2.0 * kPi * y / 2.0) * z * (1.5 - z) + 0.3 * std::sin(4.0 * kPi * y / 2.0);
  };
  Eigen::MatrixXd phys(g->nlevels(), g->nmodes());
  for (int m = 0; m < 16; ++m)
    for (int j = 0; j < g->nlevels(); ++j) phys(j, m) = fn(g->ypoint(m), g->cheb().z[j]);
  f.set_physical(phys);
  CHECK(f.hermitian_error() < 1e-14);
  Eigen::MatrixXd back = f.physical();
  CHECK((back - phys).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectral derivative matches the plane wave symbol") {
  auto g = make_grid(32, 16, 1.0, 3.0);
  ScalarField f(g);
  const double k1 = 2.0 * kPi / 3.0;
  Eigen::MatrixXd phys(g->nlevels(), g->nmodes());
  for (int m = 0; m < 32; ++m)
    for (int j = 0; j < g->nlevels(); ++j)
      phys(j, m) = std::sin(3.0 * k1 * g->ypoint(m)) * std::exp(g->cheb().z[j]);
  f.set_physical(phys);

  Eigen::MatrixXd lap_p = apply_derivative(f, Deriv::lap_y).physical();
  Eigen::MatrixXd dz_p = apply_derivative(f, Deriv::dz).physical();
  double e1 = 0.0, e2 = 0.0;
  for (int m = 0; m < 32; ++m)
    for (int j = 0; j < g->nlevels(); ++j) {
      e1 = std::max(e1, std::abs(lap_p(j, m) + 9.0 * k1 * k1 * phys(j, m)));
      e2 = std::max(e2, std::abs(dz_p(j, m) - phys(j, m)));
    }
  CHECK(e1 < 1e-9);
  CHECK(e2 < 1e-9);

  // inv_lap_y inverts lap_y on mean-free fields
  ScalarField inv = apply_derivative(apply_derivative(f, Deriv::lap_y), Deriv::inv_lap_y);
  CHECK((inv.physical() - phys).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("translation is exact for resolved waves") {
  auto g = make_grid(16, 6, 1.0, 2.0);
  ScalarField f(g);
  Eigen::MatrixXd phys(g->nlevels(), 16);
  for (int m = 0; m < 16; ++m)
    for (int j = 0; j <= 6; ++j)
      phys(j, m) = std::cos(2.0 * kPi * 2.0 * g->ypoint(m) / 2.0 + 0.4) * (1.0 + g->cheb().z[j]);
  f.set_physical(phys);
  Eigen::MatrixXd tp = f.translate(3).physical();
  for (int m = 0; m < 16; ++m) {
    int src = (m - 3 + 16) % 16;
    for (int j = 0; j <= 6; ++j) CHECK(tp(j, m) == doctest::Approx(phys(j, src)).epsilon(1e-12));
  }
}

TEST_CASE("reflection about the midplane flips the vertical profile") {
  auto g = make_grid(8, 9, 2.0, 1.0);
  ScalarField f(g);
  Eigen::MatrixXd phys(g->nlevels(), 8);
  for (int m = 0; m < 8; ++m)
    for (int j = 0; j <= 9; ++j) phys(j, m) = g->cheb().z[j] * std::cos(2.0 * kPi * g->ypoint(m));
  f.set_physical(phys);
  Eigen::MatrixXd rp = f.reflect_z().physical();
  for (int m = 0; m < 8; ++m)
    for (int j = 0; j <= 9; ++j)
      CHECK(rp(j, m) ==
            doctest::Approx((2.0 - g->cheb().z[j]) * std::cos(2.0 * kPi * g->ypoint(m)))
                .epsilon(1e-12));
}

TEST_CASE("random smooth fields are reproducible, bounded, and wall-compatible") {
  auto g = make_grid(32, 16, 1.0, 2.0);
  ScalarField a = random_smooth_field(g, 1234, 0.1);
  ScalarField b = random_smooth_field(g, 1234, 0.1);
  ScalarField c = random_smooth_field(g, 99, 0.1);
  CHECK((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.coeffs() - c.coeffs()).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.hermitian_error() < 1e-15);

  Eigen::MatrixXd p = a.physical();
  CHECK(p.cwiseAbs().maxCoeff() <= 0.1 + 1e-12);
  CHECK(p.cwiseAbs().maxCoeff() > 0.01);
  CHECK(p.row(g->cheb().top()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(p.row(g->cheb().bottom()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(a.mean_profile().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("l2 norm matches quadrature of the squared field") {
  auto g = make_grid(16, 12, 1.0, 2.0);
  ScalarField f(g);
  Eigen::MatrixXd phys(g->nlevels(), 16);
  for (int m = 0; m < 16; ++m)
    for (int j = 0; j <= 12; ++j)
      phys(j, m) = std::sin(2.0 * kPi * g->ypoint(m) / 2.0) * g->cheb().z[j];
  f.set_physical(phys);
  // <sin^2> = 1/2 horizontally; int_0^1 z^2 dz = 1/3
  CHECK(f.l2norm() == doctest::Approx(std::sqrt(0.5 / 3.0)).epsilon(1e-12));
}
