#include "rbslip/chebyshev.hpp"

#include <cmath>
#include <complex>

#include "rbslip/params.hpp"

namespace rbslip {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Cheb::Cheb(int n_, double height_) : n(n_), height(height_) {
    if (n < 2) throw ParamError("need at least 3 vertical nodes");
    if (!(height > 0.0)) throw ParamError("height must be positive");

    // Nodes on [-1,1], mirrored so x[j] = -x[n-j] exactly.
    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n / 2; ++j) {
        x[j] = std::cos(kPi * j / n);
        x[n - j] = -x[j];
    }
    if (n % 2 == 0) x[n / 2] = 0.0;

    // Upper half directly, lower half by exact reflection so that
    // z[j] + z[n-j] == height holds in floating point.
    z.resize(n + 1);
    for (int j = 0; j <= n / 2; ++j) {
        z[j] = 0.5 * height * (1.0 + x[j]);
        z[n - j] = height - z[j];
    }
    z[0] = height;
    z[n] = 0.0;
    if (n % 2 == 0) z[n / 2] = 0.5 * height;

    // Differentiation matrix (off-diagonal formula plus negative-sum diagonal),
    // scaled by dz/dx = H/2.
    Eigen::VectorXd c(n + 1);
    for (int j = 0; j <= n; ++j) c[j] = (j == 0 || j == n) ? 2.0 : 1.0;
    D.resize(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = (c[i] / c[j]) * sgn / (x[i] - x[j]);
            rowsum += D(i, j);
        }
        D(i, i) = -rowsum;
    }
    D *= 2.0 / height;
    D2 = D * D;

    // Clenshaw-Curtis weights: w_j = integral of the j-th Lagrange cardinal.
    // Standard cosine-sum formula, scaled from [-1,1] by H/2.
    w.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        double s = 1.0;
        for (int m = 1; m <= n / 2; ++m) {
            double bm = (2 * m == n) ? 1.0 : 2.0;
            s -= bm * std::cos(2.0 * kPi * m * j / n) / (4.0 * m * m - 1.0);
        }
        double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        w[j] = 0.5 * height * (cj * s / n);
    }

    bary_.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        bary_[j] = ((j % 2 == 0) ? 1.0 : -1.0);
        if (j == 0 || j == n) bary_[j] *= 0.5;
    }
}

namespace {
template <typename Vec>
auto bary_eval(const Eigen::VectorXd& z, const Eigen::VectorXd& bw, const Vec& f, double zq) ->
    typename Vec::Scalar {
    using S = typename Vec::Scalar;
    S num = S(0);
    double den = 0.0;
    for (int j = 0; j < z.size(); ++j) {
        double d = zq - z[j];
        if (d == 0.0) return f[j];
        double t = bw[j] / d;
        num += t * f[j];
        den += t;
    }
    return num / den;
}
}  // namespace

double Cheb::eval(const Eigen::VectorXd& f, double zq) const { return bary_eval(z, bary_, f, zq); }

std::complex<double> Cheb::eval(const Eigen::VectorXcd& f, double zq) const {
    return bary_eval(z, bary_, f, zq);
}

Eigen::MatrixXd Cheb::interp_matrix(const Eigen::VectorXd& zq) const {
    Eigen::MatrixXd M(zq.size(), n + 1);
    for (int i = 0; i < zq.size(); ++i) {
        int hit = -1;
        for (int j = 0; j <= n; ++j)
            if (zq[i] == z[j]) { hit = j; break; }
        if (hit >= 0) {
            M.row(i).setZero();
            M(i, hit) = 1.0;
            continue;
        }
        double den = 0.0;
        for (int j = 0; j <= n; ++j) {
            M(i, j) = bary_[j] / (zq[i] - z[j]);
            den += M(i, j);
        }
        M.row(i) /= den;
    }
    return M;
}

Eigen::VectorXd Cheb::coeffs(const Eigen::VectorXd& f) const {
    // DCT-I by direct summation; f is indexed by our descending nodes, which
    // match x_j = cos(pi j / n) exactly.
    Eigen::VectorXd a(n + 1);
    for (int m = 0; m <= n; ++m) {
        double s = 0.5 * (f[0] + ((m % 2 == 0) ? f[n] : -f[n]));
        for (int j = 1; j < n; ++j) s += f[j] * std::cos(kPi * j * m / n);
        a[m] = 2.0 * s / n;
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    return a;
}

double Cheb::integrate_below(const Eigen::VectorXd& f, double delta) const {
    if (!(delta >= 0.0 && delta <= height)) throw ParamError("delta outside [0, height]");
    Eigen::VectorXd a = coeffs(f);
    // Antiderivative coefficients on [-1,1] (Clenshaw-Curtis style recurrence).
    Eigen::VectorXd A(n + 2);
    A.setZero();
    auto get = [&](int m) { return (m <= n) ? a[m] : 0.0; };
    for (int m = 1; m <= n + 1; ++m)
        A[m] = (get(m - 1) - get(m + 1)) / (2.0 * m);
    A[1] = a[0] - 0.5 * get(2);
    auto evalF = [&](double xq) {
        // Clenshaw on the antiderivative series sum A_m T_m (A_0 = 0).
        double b1 = 0.0, b2 = 0.0;
        for (int m = n + 1; m >= 1; --m) {
            double b0 = 2.0 * xq * b1 - b2 + A[m];
            b2 = b1;
            b1 = b0;
        }
        return xq * b1 - b2 + 0.0;  // A_0 = 0
    };
    double xd = 2.0 * delta / height - 1.0;
    return 0.5 * height * (evalF(xd) - evalF(-1.0));
}

}  // namespace rbslip
