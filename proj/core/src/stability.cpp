#include "rbslip/stability.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "rbslip/chebyshev.hpp"
#include "rbslip/stokes.hpp"

namespace rbslip {

namespace {

// Interior-restricted operators at unit height: L = (dzz - k^2) on the
// Dirichlet interior, S(i,j) = w response at node i to a unit tau at node j
// (k^2 and the buoyancy scaling factored out so that the eigenproblem reads
// lambda tau = L tau + ra * S tau).
struct ModeOperators {
    Eigen::MatrixXd lap;
    Eigen::MatrixXd response;
};

ModeOperators build_operators(double k, SlipLength slip, int nz) {
    Cheb cheb(nz, 1.0);
    const int n = nz, ni = n - 1;
    const double k2 = k * k;
    ModeOperators ops;
    ops.lap = cheb.D2.block(1, 1, ni, ni) - k2 * Eigen::MatrixXd::Identity(ni, ni);

    ModeBvp bvp(cheb, k2, slip);
    ops.response.resize(ni, ni);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    for (int j = 1; j <= n - 1; ++j) {
        // PDE rows live at nodes 2..n-2; a source at the first node off the
        // wall is not collocated and contributes nothing at this order.
        if (j == 1 || j == n - 1) {
            ops.response.col(j - 1).setZero();
            continue;
        }
        b[j] = k2;
        Eigen::VectorXd w = bvp.solve(b);
        b[j] = 0.0;
        ops.response.col(j - 1) = w.segment(1, ni);
    }
    return ops;
}

double max_real_eig(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

// Neutral Rayleigh number at fixed k: ra with max Re eig(L + ra S) = 0.
// Since -L is positive definite on the Dirichlet interior, this is
// 1 / (largest real positive eigenvalue of (-L)^{-1} S).
double neutral_ra(double k, SlipLength slip, int nz) {
    ModeOperators ops = build_operators(k, slip, nz);
    Eigen::MatrixXd m = (-ops.lap).partialPivLu().solve(ops.response);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    double mu = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        std::complex<double> ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) <= 1e-10 * std::max(1.0, std::abs(ev.real())) && ev.real() > mu)
            mu = ev.real();
    }
    if (mu <= 0.0) throw NumericsError("no unstable direction found at this wavenumber");
    return 1.0 / mu;
}

}  // namespace

double linear_growth_rate(double k, double ra, SlipLength slip, int nz) {
    if (!(k > 0.0) || !(ra > 0.0)) throw ParamError("growth rate needs k > 0, ra > 0");
    if (nz < 8) throw ParamError("growth rate needs nz >= 8");
    ModeOperators ops = build_operators(k, slip, nz);
    return max_real_eig(ops.lap + ra * ops.response);
}

double neutral_rayleigh(double k, SlipLength slip, int nz) {
    if (!(k > 0.0)) throw ParamError("neutral curve needs k > 0");
    return neutral_ra(k, slip, nz);
}

Onset critical_rayleigh(SlipLength slip, int nz) {
    // ra_c(k) is smooth and unimodal on the physical branch; golden section
    // over a bracket generous enough for every wall family.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.8, b = 8.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = neutral_ra(x1, slip, nz), f2 = neutral_ra(x2, slip, nz);
    while (b - a > 1e-7 * (1.0 + b)) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = neutral_ra(x1, slip, nz);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = neutral_ra(x2, slip, nz);
        }
    }
    Onset out;
    out.k_c = 0.5 * (a + b);
    out.ra_c = neutral_ra(out.k_c, slip, nz);
    return out;
}

}  // namespace rbslip
