#include "rbslip/multiplier.hpp"

#include <cmath>

#include "rbslip/stokes.hpp"

namespace rbslip {

namespace {

double require_domain(double k, const SlabParams& params) {
    params.validate();
    if (params.slip.is_free())
        throw ParamError("multiplier closed form needs a finite slip length");
    if (!(k > 0.0)) throw ParamError("multiplier needs k > 0");
    if (params.height * k < 1.0)
        throw ParamError("multiplier closed form requires height*k >= 1");
    return params.slip.value();
}

// Numerator terms: four products exponential * linear polynomial in z.
// num = e1*p1 + e2*p2 - e3*p3 - e4*p4 with exponents
// e1 = e^{-k(H-z)}, e2 = e^{-k(3H+z)}, e3 = e^{-k(3H-z)}, e4 = e^{-k(H+z)}.
struct NumeratorTerms {
    double e1, e2, e3, e4;       // exponentials
    double p1, p2, p3, p4;       // polynomial factors at z
    double dp1, dp2, dp3, dp4;   // their z-derivatives (constants)
};

NumeratorTerms numerator_terms(double k, double h, double s, double z) {
    NumeratorTerms t;
    const double ks = k * s;
    t.e1 = std::exp(-k * (h - z));
    t.e2 = std::exp(-k * (3.0 * h + z));
    t.e3 = std::exp(-k * (3.0 * h - z));
    t.e4 = std::exp(-k * (h + z));

    const double u = 1.0 + 2.0 * ks, v = 1.0 - 2.0 * ks;
    t.p1 = u * (u + (1.0 + ks) * k * (h - z));
    t.dp1 = -u * (1.0 + ks) * k;
    t.p2 = v * (v - (1.0 - ks) * k * (h - z));
    t.dp2 = v * (1.0 - ks) * k;

    const double c3 = k - 5.0 * k * k * s + 2.0 * k * k * k * s * s - 2.0 * h * k * k * (1.0 - ks);
    t.p3 = v * v - h * k * (1.0 - ks) * v - c3 * z;
    t.dp3 = -c3;
    const double c4 = k + 5.0 * k * k * s + 2.0 * k * k * k * s * s + 2.0 * h * k * k * (1.0 + ks);
    t.p4 = u * u + h * k * (1.0 + ks) * u + c4 * z;
    t.dp4 = c4;
    return t;
}

double den_value(double k, double h, double s) {
    const double ks = k * s, e2 = std::exp(-2.0 * h * k), e4 = e2 * e2;
    const double u = 1.0 + 2.0 * ks, v = 1.0 - 2.0 * ks;
    return u * u - 2.0 * e2 * (1.0 + (2.0 * h * h + 8.0 * h * s + 4.0 * s * s) * k * k) +
           v * v * e4;
}

}  // namespace

double m_sigma(double k, double z, const SlabParams& params) {
    double s = require_domain(k, params);
    const double h = params.height;
    NumeratorTerms t = numerator_terms(k, h, s, z);
    double num = t.e1 * t.p1 + t.e2 * t.p2 - t.e3 * t.p3 - t.e4 * t.p4;
    return num / den_value(k, h, s);
}

double m_sigma_dz(double k, double z, const SlabParams& params) {
    double s = require_domain(k, params);
    const double h = params.height;
    NumeratorTerms t = numerator_terms(k, h, s, z);
    // d/dz (e * p): the exponent rates are +k, -k, +k, -k respectively.
    double num = t.e1 * (k * t.p1 + t.dp1) + t.e2 * (-k * t.p2 + t.dp2) -
                 t.e3 * (k * t.p3 + t.dp3) - t.e4 * (-k * t.p4 + t.dp4);
    return num / den_value(k, h, s);
}

double m_sigma_den(double k, const SlabParams& params) {
    double s = require_domain(k, params);
    return den_value(k, params.height, s);
}

std::array<double, 3> m_sigma_den_split(double k, const SlabParams& params) {
    double s = require_domain(k, params);
    const double h = params.height;
    const double e2 = std::exp(-2.0 * h * k), e4 = e2 * e2;
    const double hk = h * k, ks = k * s;
    std::array<double, 3> t;
    t[0] = 1.0 - 2.0 * (1.0 + 2.0 * hk * hk) * e2 + e4;
    t[1] = 4.0 * ks * (1.0 - 4.0 * hk * e2 - e4);
    t[2] = 4.0 * ks * ks * (1.0 - e2) * (1.0 - e2);
    return t;
}

MultiplierCheck verify_m_sigma(double k, const SlabParams& params,
                               const Eigen::VectorXd& zsamples) {
    require_domain(k, params);
    const double h = params.height;
    const std::complex<double> phi(0.7, -0.4);  // arbitrary non-real top data

    std::array<BoundaryRow, 4> rows = {
        dirichlet_row(0, 0.0),
        tangential_row(0, params.slip, 0.0),
        dirichlet_row(1, -phi),
        tangential_row(1, params.slip, 0.0),
    };
    BiharmonicProfile f = solve_biharmonic_homogeneous(k, h, rows);

    MultiplierCheck out;
    double scale = 0.0;
    for (int i = 0; i < zsamples.size(); ++i) scale = std::max(scale, std::abs(f.eval(zsamples[i])));
    if (scale == 0.0) scale = std::abs(phi);
    for (int i = 0; i < zsamples.size(); ++i) {
        double z = zsamples[i];
        std::complex<double> expect = -m_sigma(k, z, params) * phi;
        out.max_rel_dev = std::max(out.max_rel_dev, std::abs(f.eval(z) - expect) / scale);
        out.dz_over_k = std::max(out.dz_over_k, std::abs(m_sigma_dz(k, z, params)) / k);
    }
    out.bottom_value = std::abs(m_sigma(k, 0.0, params));
    out.top_value_err = std::abs(m_sigma(k, h, params) - 1.0);
    return out;
}

std::complex<double> v0_ode_solution(double k, const SlabParams& params,
                                     std::complex<double> a, std::complex<double> b, double z) {
    params.validate();
    if (!(k > 0.0) || params.height * k < 1.0)
        throw ParamError("clamped response requires height*k >= 1");
    const double h = params.height;
    std::array<BoundaryRow, 4> rows = {
        dirichlet_row(0, 0.0),
        slope_row(0, 0.0),
        dirichlet_row(1, a * h * h),
        slope_row(1, b * h),
    };
    return solve_biharmonic_homogeneous(k, h, rows).eval(z, 2);
}

double v0_dzz_bottom_closed(double k, double height, double a, double b) {
    const double hk = height * k;
    const double e1 = std::exp(-hk), e3 = std::exp(-3.0 * hk);
    const double e2 = std::exp(-2.0 * hk), e4 = e2 * e2;
    const double den = 1.0 - 2.0 * e2 * (1.0 + 2.0 * hk * hk) + e4;
    const double num =
        4.0 * (a * hk * hk * hk + b * hk) * (e1 - e3) - 4.0 * b * hk * hk * (e1 + e3);
    return num / den;
}

double v0_dzz_top_closed(double k, double height, double a, double b) {
    const double hk = height * k;
    const double e2 = std::exp(-2.0 * hk), e4 = e2 * e2;
    const double den = 1.0 - 2.0 * e2 * (1.0 + 2.0 * hk * hk) + e4;
    const double num = hk * (2.0 - 8.0 * hk * e2 - 2.0 * e4) * b -
                       hk * hk * (1.0 + (2.0 + 4.0 * hk * hk) * e2 - e4) * a;
    return num / den;
}

}  // namespace rbslip
