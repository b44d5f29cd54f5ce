#include <doctest.h>

#include <rbslip/chebyshev.hpp>

#include <cmath>
#include <vector>

using namespace rbslip;
using Eigen::VectorXd;

namespace {

VectorXd poly_at_nodes(const Cheb& c, const std::vector<double>& coef) {
  VectorXd f(c.n + 1);
  for (int j = 0; j <= c.n; ++j) {
    double p = 0.0, zp = 1.0;
    for (double a : coef) { p += a * zp; zp *= c.z[j]; }
    f[j] = p;
  }
  return f;
}

}  // namespace

TEST_CASE("nodes descend from height to zero and mirror exactly") {
  for (int n : {8, 9, 16, 33}) {
    Cheb c(n, 2.5);
    CHECK(c.z[c.top()] == 2.5);
    CHECK(c.z[c.bottom()] == 0.0);
    for (int j = 0; j < n; ++j) CHECK(c.z[j] > c.z[j + 1]);
    for (int j = 0; j <= n; ++j) CHECK(c.z[j] + c.z[n - j] == 2.5);
  }
}

TEST_CASE("differentiation is exact on polynomials up to the grid degree") {
  const int n = 12;
  Cheb c(n, 1.7);
  // f = z^n has derivative n z^{n-1}
  std::vector<double> coef(n + 1, 0.0);
  coef[n] = 1.0;
  VectorXd f = poly_at_nodes(c, coef);
  VectorXd df = c.D * f;
  VectorXd d2f = c.D2 * f;
  for (int j = 0; j <= n; ++j) {
    double z = c.z[j];
    CHECK(df[j] == doctest::Approx(n * std::pow(z, n - 1)).epsilon(1e-10));
    CHECK(d2f[j] == doctest::Approx(n * (n - 1) * std::pow(z, n - 2)).epsilon(1e-9));
  }
}

TEST_CASE("differentiation converges spectrally on a smooth function") {
  double err8 = 0.0, err16 = 0.0;
  for (int n : {8, 16}) {
    Cheb c(n, 1.0);
    VectorXd f(n + 1), dexact(n + 1);
    for (int j = 0; j <= n; ++j) {
      f[j] = std::sin(4.0 * c.z[j]) * std::exp(c.z[j]);
      dexact[j] = std::exp(c.z[j]) * (std::sin(4.0 * c.z[j]) + 4.0 * std::cos(4.0 * c.z[j]));
    }
    double e = (c.D * f - dexact).cwiseAbs().maxCoeff();
    (n == 8 ? err8 : err16) = e;
  }
  CHECK(err16 < 1e-11);
  CHECK(err8 / (err16 + 1e-300) > 1e2);
}

TEST_CASE("quadrature weights integrate polynomials exactly") {
  const int n = 10;
  const double h = 3.0;
  Cheb c(n, h);
  for (int d = 0; d <= n; ++d) {
    std::vector<double> coef(d + 1, 0.0);
    coef[d] = 1.0;
    VectorXd f = poly_at_nodes(c, coef);
    double exact = std::pow(h, d + 1) / (d + 1);
    CHECK(c.w.dot(f) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(c.w.minCoeff() > 0.0);
}

TEST_CASE("barycentric evaluation reproduces the interpolant") {
  const int n = 14;
  Cheb c(n, 2.0);
  std::vector<double> coef = {0.3, -1.2, 0.0, 2.5, -0.7};
  VectorXd f = poly_at_nodes(c, coef);
  for (double z : {0.0, 1e-14, 0.123456, 1.0, 1.999, 2.0}) {
    double p = 0.0, zp = 1.0;
    for (double a : coef) { p += a * zp; zp *= z; }
    CHECK(c.eval(f, z) == doctest::Approx(p).epsilon(1e-12));
  }
  // evaluation exactly at a node must short-circuit to the nodal value
  CHECK(c.eval(f, c.z[3]) == f[3]);
}

TEST_CASE("interpolation matrix agrees with pointwise evaluation") {
  const int n = 9;
  Cheb c(n, 1.0);
  VectorXd zq(3);
  zq << 0.1, 0.55, 0.91;
  auto M = c.interp_matrix(zq);
  VectorXd f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = std::cos(3.0 * c.z[j]);
  VectorXd g = M * f;
  for (int q = 0; q < 3; ++q) CHECK(g[q] == doctest::Approx(c.eval(f, zq[q])).epsilon(1e-13));
}

TEST_CASE("series coefficients recover a known Chebyshev expansion") {
  const int n = 16;
  Cheb c(n, 2.0);  // map x = z - 1 on [-1,1]
  VectorXd f(n + 1);
  for (int j = 0; j <= n; ++j) {
    double x = c.z[j] - 1.0;
    // 2 T_0 + 0.5 T_3(x) + 0.25 T_7(x)
    double t3 = 4 * x * x * x - 3 * x;
    double t7 = 64 * std::pow(x, 7) - 112 * std::pow(x, 5) + 56 * x * x * x - 7 * x;
    f[j] = 2.0 + 0.5 * t3 + 0.25 * t7;
  }
  VectorXd a = c.coeffs(f);
  CHECK(a[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a[7] == doctest::Approx(0.25).epsilon(1e-12));
  double rest = 0.0;
  for (int m = 0; m <= n; ++m)
    if (m != 0 && m != 3 && m != 7) rest += std::abs(a[m]);
  CHECK(rest < 1e-12);
}

TEST_CASE("partial integrals from the bottom wall") {
  const int n = 24;
  const double h = 2.0;
  Cheb c(n, h);
  VectorXd f(n + 1);
  for (int j = 0; j <= n; ++j) f[j] = std::exp(-c.z[j]) * std::sin(2.0 * c.z[j]);
  auto exact = [](double z) {
    // antiderivative of e^{-z} sin(2z), zero at z = 0
    return (2.0 - std::exp(-z) * (std::sin(2 * z) + 2 * std::cos(2 * z))) / 5.0;
  };
  for (double d : {0.1, 0.7, 1.3, h}) {
    CHECK(c.integrate_below(f, d) == doctest::Approx(exact(d)).epsilon(1e-12));
  }
  CHECK(c.integrate_below(f, h) == doctest::Approx(c.w.dot(f)).epsilon(1e-12));
  CHECK(c.integrate_below(f, 0.0) == doctest::Approx(0.0));
}
