#include "rbslip/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rbslip/params.hpp"

namespace rbslip {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// --- Gauss-Legendre rule on [-1, 1] -------------------------------------

struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev estimate; converges in a few steps.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int m = 2; m <= n; ++m) {
            double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// Composite rule over geometrically graded panels of (lo, hi], first edge at
// lo + t0. Returns nodes and weights for integrating a smooth integrand.
void graded_panels(double lo, double hi, double t0, int panels, int glpts,
                   std::vector<double>& nodes, std::vector<double>& weights) {
    GaussRule gl = gauss_legendre(glpts);
    nodes.clear();
    weights.clear();
    double ratio = std::pow((hi - lo) / t0, 1.0 / (panels - 1));
    double a = lo;
    for (int p = 0; p < panels; ++p) {
        double b = lo + t0 * std::pow(ratio, p);
        if (p == panels - 1) b = hi;
        double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        for (int i = 0; i < glpts; ++i) {
            nodes.push_back(mid + hw * gl.x[i]);
            weights.push_back(hw * gl.w[i]);
        }
        a = b;
    }
}

// --- closed-form derivatives of the Poisson kernel ----------------------
//
// Everything needed is a sum of terms c s^a r^d (s^2+r^2)^{-b/2}; s- and
// r-derivatives stay in this family.

struct Term {
    double c;
    int a, d, b;
};
using Expr = std::vector<Term>;

Expr d_ds(const Expr& e) {
    Expr out;
    for (const Term& t : e) {
        if (t.a != 0) out.push_back({t.c * t.a, t.a - 1, t.d, t.b});
        out.push_back({-t.c * t.b, t.a + 1, t.d, t.b + 2});
    }
    return out;
}

Expr d_dr(const Expr& e) {
    Expr out;
    for (const Term& t : e) {
        if (t.d != 0) out.push_back({t.c * t.d, t.a, t.d - 1, t.b});
        out.push_back({-t.c * t.b, t.a, t.d + 1, t.b + 2});
    }
    return out;
}

double eval_expr(const Expr& e, double s, double r) {
    double u = s * s + r * r;
    double acc = 0.0;
    for (const Term& t : e)
        acc += t.c * std::pow(s, t.a) * (t.d ? std::pow(r, t.d) : 1.0) *
               std::pow(u, -0.5 * t.b);
    return acc;
}

constexpr int kMaxOrder = 5;

// ds_family()[n] = d^n/ds^n P, dr_family()[n] = d/dr of that.
const std::vector<Expr>& ds_family() {
    static const std::vector<Expr> fam = [] {
        std::vector<Expr> f;
        f.push_back({{1.0 / kTwoPi, 1, 0, 3}});  // P itself
        for (int n = 1; n <= kMaxOrder; ++n) f.push_back(d_ds(f.back()));
        return f;
    }();
    return fam;
}

const std::vector<Expr>& dr_family() {
    static const std::vector<Expr> fam = [] {
        std::vector<Expr> f;
        for (const Expr& e : ds_family()) f.push_back(d_dr(e));
        return f;
    }();
    return fam;
}

}  // namespace

double poisson_kernel_radial(double s, double r) {
    return (1.0 / kTwoPi) * s / std::pow(s * s + r * r, 1.5);
}

double poisson_kernel(double s, double y1, double y2) {
    return poisson_kernel_radial(s, std::hypot(y1, y2));
}

double poisson_hat(double s, double rho) { return (1.0 / kTwoPi) * std::exp(-s * rho); }

double b_sigma_hat(const KernelQuery& q) {
    if (q.sigma < 0.0 || q.z < 0.0 || q.ztilde < 0.0 || q.xi < 0.0)
        throw ParamError("kernel query outside domain");
    double rho = q.xi;
    return -(q.sigma * q.z * q.ztilde / kTwoPi) * rho * rho *
           std::exp(-(q.z + q.ztilde) * rho) / (1.0 + 2.0 * q.sigma * rho);
}

double k0_dzz_boundary_radial(double ztilde, double r) {
    // lap_y P_s = -dss P_s = (1/2pi) (9 s u^{-5/2} - 15 s^3 u^{-7/2})
    double s = ztilde, u = s * s + r * r;
    double lap = (1.0 / kTwoPi) * (9.0 * s * std::pow(u, -2.5) - 15.0 * s * s * s * std::pow(u, -3.5));
    return ztilde * lap;
}

double k0_dzz_boundary(double ztilde, double y1, double y2) {
    if (!(ztilde > 0.0)) throw ParamError("wall kernel needs ztilde > 0");
    return k0_dzz_boundary_radial(ztilde, std::hypot(y1, y2));
}

KernelEvaluator::KernelEvaluator(double sigma, int panels, int glpts) : sigma_(sigma) {
    if (sigma < 0.0) throw ParamError("kernel evaluator needs sigma >= 0");
    if (panels < 4 || glpts < 2) throw ParamError("kernel evaluator resolution too small");
    // e^{-60} ~ 1e-26 bounds the truncated subordination tail.
    graded_panels(0.0, 60.0, 1e-3, panels, glpts, tn_, tw_);
}

double KernelEvaluator::subordinated(int n, double s0, double r, bool dr) const {
    if (n < 0 || n + 1 > kMaxOrder) throw ParamError("subordination order out of range");
    const Expr& e = dr ? dr_family()[n] : ds_family()[n];
    double sign = (n % 2 == 0) ? 1.0 : -1.0;  // inverse of rho^n e^{-s rho} is (-d/ds)^n P
    double acc = 0.0;
    for (size_t i = 0; i < tn_.size(); ++i) {
        double t = tn_[i];
        acc += tw_[i] * std::exp(-t) * eval_expr(e, s0 + 2.0 * sigma_ * t, r);
    }
    return sign * acc;
}

double KernelEvaluator::value(double r, double z, double zt) const {
    return -sigma_ * z * zt * subordinated(2, z + zt, r);
}

double KernelEvaluator::grad_y(double r, double z, double zt) const {
    return -sigma_ * z * zt * subordinated(2, z + zt, r, true);
}

double KernelEvaluator::dz(double r, double z, double zt) const {
    return -sigma_ * zt * subordinated(2, z + zt, r) + sigma_ * z * zt * subordinated(3, z + zt, r);
}

double KernelEvaluator::dzz(double r, double z, double zt) const {
    return 2.0 * sigma_ * zt * subordinated(3, z + zt, r) -
           sigma_ * z * zt * subordinated(4, z + zt, r);
}

double KernelEvaluator::lap_y(double r, double z, double zt) const {
    return sigma_ * z * zt * subordinated(4, z + zt, r);
}

double KernelEvaluator::grad_invlap(double r, double z, double zt) const {
    return -sigma_ * z * zt * subordinated(0, z + zt, r, true);
}

double hankel_inverse(const std::function<double(double)>& fhat, double r, double rho_max,
                      int panels, int glpts) {
    GaussRule gl = gauss_legendre(glpts);
    double acc = 0.0;
    double a = 0.0, dp = rho_max / panels;
    for (int p = 0; p < panels; ++p) {
        double b = a + dp;
        double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
        for (int i = 0; i < glpts; ++i) {
            double rho = mid + hw * gl.x[i];
            acc += hw * gl.w[i] * fhat(rho) * std::cyl_bessel_j(0, rho * r) * rho;
        }
        a = b;
    }
    return acc;
}

double poisson_normalization_error(double s, double rmax) {
    // the neglected tail is s / sqrt(s^2 + rmax^2); keep it below quadrature level
    rmax *= std::max(1.0, s);
    std::vector<double> rn, rw;
    graded_panels(0.0, rmax, 1e-6 * s, 240, 12, rn, rw);
    double acc = 0.0;
    for (size_t i = 0; i < rn.size(); ++i)
        acc += rw[i] * poisson_kernel_radial(s, rn[i]) * rn[i];
    return std::abs(kTwoPi * acc - 1.0);
}

double laplacian_poisson_integral(double ztilde, double rmax) {
    std::vector<double> rn, rw;
    graded_panels(0.0, rmax, 1e-6 * ztilde, 240, 12, rn, rw);
    double acc = 0.0;
    for (size_t i = 0; i < rn.size(); ++i)
        acc += rw[i] * k0_dzz_boundary_radial(ztilde, rn[i]) * rn[i];
    return std::abs(kTwoPi * acc);
}

double poisson_semigroup_error(double s, double half_width, double h, double compare_radius) {
    const int n = int(std::round(2.0 * half_width / h));
    const int m = 2 * n;  // zero padding makes the circular convolution linear
    std::vector<std::complex<double>> buf(size_t(m) * m, 0.0);
    auto at = [&](int i, int j) -> std::complex<double>& { return buf[size_t(i) * m + j]; };

    auto point = [&](int i) { return -half_width + (i + 0.5) * h; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            at(i, j) = poisson_kernel(0.5 * s, point(i), point(j));

    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd = fftw_plan_dft_2d(m, m, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_2d(m, m, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw NumericsError("fftw plan creation failed");
    fftw_execute(fwd);
    for (auto& v : buf) v *= v;
    fftw_execute(bwd);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    const double norm = h * h / (double(m) * m);

    // linear convolution index q corresponds to offset (q + 1 - n) * h
    double err = 0.0;
    for (int q1 = 0; q1 <= 2 * n - 2; ++q1) {
        double x = (q1 + 1 - n) * h;
        if (std::abs(x) > compare_radius) continue;
        for (int q2 = 0; q2 <= 2 * n - 2; ++q2) {
            double y = (q2 + 1 - n) * h;
            if (std::abs(y) > compare_radius) continue;
            double conv = std::real(at(q1, q2)) * norm;
            err = std::max(err, std::abs(conv - poisson_kernel(s, x, y)));
        }
    }
    return err;
}

namespace {

DecayConstants decay_constants(const KernelEvaluator& ev, double sigma,
                               const std::vector<std::pair<double, double>>& zz) {
    DecayConstants c;
    for (auto [z, zt] : zz) {
        double s0 = z + zt;
        std::vector<double> radii{0.0};
        for (int i = 0; i < 28; ++i)
            radii.push_back(s0 * 3e-3 * std::pow(2e3 / 3e-3, i / 27.0));
        for (double r : radii) {
            double wgt = s0 + r;
            c.grad_invlap = std::max(
                c.grad_invlap, std::abs(ev.grad_invlap(r, z, zt)) * std::pow(wgt, 3) / (sigma * z * zt));
            c.value =
                std::max(c.value, std::abs(ev.value(r, z, zt)) * std::pow(wgt, 4) / (sigma * z * zt));
            c.first = std::max(c.first, (std::abs(ev.grad_y(r, z, zt)) + std::abs(ev.dz(r, z, zt))) *
                                            std::pow(wgt, 4) / (sigma * zt));
            c.second = std::max(c.second, (std::abs(ev.lap_y(r, z, zt)) + std::abs(ev.dzz(r, z, zt))) *
                                              std::pow(wgt, 5) / (sigma * zt));
        }
    }
    return c;
}

}  // namespace

DecayCheck kernel_decay_check(double sigma, const std::vector<std::pair<double, double>>& zz) {
    if (!(sigma > 0.0)) throw ParamError("decay check needs sigma > 0");
    if (zz.empty()) throw ParamError("decay check needs (z, ztilde) samples");
    DecayCheck out;
    out.coarse = decay_constants(KernelEvaluator(sigma, 48, 12), sigma, zz);
    out.fine = decay_constants(KernelEvaluator(sigma, 96, 12), sigma, zz);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    out.max_rel_change = std::max({rel(out.coarse.grad_invlap, out.fine.grad_invlap),
                                   rel(out.coarse.value, out.fine.value),
                                   rel(out.coarse.first, out.fine.first),
                                   rel(out.coarse.second, out.fine.second)});
    return out;
}

double b_sigma_tail_slope(double sigma, double z, double zt, double r_lo, double r_hi, int npts) {
    if (!(r_hi > r_lo && r_lo > 0.0) || npts < 2) throw ParamError("bad tail slope window");
    KernelEvaluator ev(sigma, 96, 12);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < npts; ++i) {
        double r = r_lo * std::pow(r_hi / r_lo, double(i) / (npts - 1));
        double x = std::log(r), y = std::log(std::abs(ev.value(r, z, zt)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
}

}  // namespace rbslip
