#include "rbslip/stokes.hpp"

#include <cmath>

namespace rbslip {

BoundaryRow dirichlet_row(int wall, std::complex<double> value) {
    return BoundaryRow{wall, 1.0, 0.0, 0.0, value};
}

BoundaryRow slope_row(int wall, std::complex<double> value) {
    return BoundaryRow{wall, 0.0, 1.0, 0.0, value};
}

BoundaryRow tangential_row(int wall, SlipLength slip, std::complex<double> value) {
    if (slip.is_free()) return BoundaryRow{wall, 0.0, 0.0, 1.0, value};
    double s = slip.value();
    // v = +sigma dz v at z = 0, v = -sigma dz v at z = H, written for w:
    // w' - sigma w'' = 0 (bottom), w' + sigma w'' = 0 (top).
    return BoundaryRow{wall, 0.0, 1.0, (wall == 0) ? -s : s, value};
}

namespace {
Eigen::RowVectorXd functional_row(const Cheb& cheb, const BoundaryRow& bc) {
    int node = (bc.wall == 0) ? cheb.bottom() : cheb.top();
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(cheb.n + 1);
    if (bc.a0 != 0.0) r[node] += bc.a0;
    if (bc.a1 != 0.0) r += bc.a1 * cheb.D.row(node);
    if (bc.a2 != 0.0) r += bc.a2 * cheb.D2.row(node);
    return r;
}
}  // namespace

ModeBvp::ModeBvp(const Cheb& cheb, double k2, SlipLength slip) : n_(cheb.n) {
    const int n = n_;
    Eigen::MatrixXd helm = cheb.D2 - k2 * Eigen::MatrixXd::Identity(n + 1, n + 1);
    a_ = helm * helm;
    a_.row(0) = functional_row(cheb, dirichlet_row(1));
    a_.row(1) = functional_row(cheb, tangential_row(1, slip));
    a_.row(n - 1) = functional_row(cheb, tangential_row(0, slip));
    a_.row(n) = functional_row(cheb, dirichlet_row(0));

    scale_.resize(n + 1);
    Eigen::MatrixXd as(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        double m = a_.row(i).cwiseAbs().maxCoeff();
        scale_[i] = (m > 0.0) ? 1.0 / m : 1.0;
        as.row(i) = a_.row(i) * scale_[i];
    }
    lu_.compute(as);
    Eigen::VectorXd d = lu_.matrixLU().diagonal().cwiseAbs();
    if (d.minCoeff() <= 1e-14 * d.maxCoeff())
        throw NumericsError("mode BVP matrix numerically singular");
}

Eigen::VectorXd ModeBvp::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = lu_.solve(scale_.asDiagonal() * b);
    for (int it = 0; it < 2; ++it) {
        Eigen::VectorXd r = b - a_ * x;
        x += lu_.solve(scale_.asDiagonal() * r);
    }
    return x;
}

Eigen::VectorXcd ModeBvp::solve(const Eigen::VectorXcd& b) const {
    Eigen::VectorXd xr = solve(Eigen::VectorXd(b.real()));
    Eigen::VectorXd xi = solve(Eigen::VectorXd(b.imag()));
    return xr + std::complex<double>(0.0, 1.0) * xi;
}

BiharmonicSolver::BiharmonicSolver(GridPtr grid, SlipLength slip)
    : grid_(std::move(grid)), slip_(slip) {}

const ModeBvp& BiharmonicSolver::mode_bvp(double k2) const {
    auto it = cache_.find(k2);
    if (it == cache_.end())
        it = cache_.emplace(k2, std::make_unique<ModeBvp>(grid_->cheb(), k2, slip_)).first;
    return *it->second;
}

namespace {

// Shared per-mode loop: rhs_scale(z_j) multiplies R k^2 thetahat.
VelocityField stokes_like_solve(const ScalarField& theta, const BiharmonicSolver& solver,
                                const Eigen::VectorXd* source_weight) {
    const GridPtr& g = solver.grid();
    const SlabParams& p = g->params();
    VelocityField u;
    u.w = ScalarField(g);
    u.v.assign(p.hdim, ScalarField(g));

    const Eigen::MatrixXd& D = g->cheb().D;
    for (int m : g->half_modes()) {
        const Mode& mo = g->mode(m);
        if (mo.k2 == 0.0) continue;  // horizontal mean carries no flow
        const ModeBvp& bvp = solver.mode_bvp(mo.k2);
        Eigen::VectorXcd b = p.buoyancy * mo.k2 * theta.coeffs().col(m);
        if (source_weight)
            b = b.cwiseProduct(source_weight->cast<std::complex<double>>());
        b[bvp.row_top_value()] = 0.0;
        b[bvp.row_top_tangential()] = 0.0;
        b[bvp.row_bottom_tangential()] = 0.0;
        b[bvp.row_bottom_value()] = 0.0;
        u.w.coeffs().col(m) = bvp.solve(b);
        int mc = g->conj_index(m);
        if (mc != m) u.w.coeffs().col(mc) = u.w.coeffs().col(m).conjugate();
    }
    Eigen::MatrixXcd dzw = D * u.w.coeffs();
    for (int m = 0; m < g->nmodes(); ++m) {
        const Mode& mo = g->mode(m);
        if (mo.k2 == 0.0) continue;
        u.v[0].coeffs().col(m) = std::complex<double>(0.0, mo.kx / mo.k2) * dzw.col(m);
        if (p.hdim == 2)
            u.v[1].coeffs().col(m) = std::complex<double>(0.0, mo.ky / mo.k2) * dzw.col(m);
    }
    return u;
}

Eigen::VectorXd half_indicator(const Cheb& cheb, bool lower) {
    const double mid = 0.5 * cheb.height;
    Eigen::VectorXd w(cheb.n + 1);
    for (int j = 0; j <= cheb.n; ++j) {
        double z = cheb.z[j];
        if (z == mid)
            w[j] = 0.5;
        else
            w[j] = lower ? (z < mid ? 1.0 : 0.0) : (z > mid ? 1.0 : 0.0);
    }
    return w;
}

}  // namespace

VelocityField solve_stokes(const ScalarField& theta, const BiharmonicSolver& solver) {
    return stokes_like_solve(theta, solver, nullptr);
}

VelocityField solve_stokes(const ScalarField& theta, const SlabParams& params) {
    BiharmonicSolver solver(theta.grid(), params.slip);
    return stokes_like_solve(theta, solver, nullptr);
}

VelocityField solve_noslip(const ScalarField& theta, const SlabParams& params) {
    (void)params;
    BiharmonicSolver solver(theta.grid(), SlipLength::noslip());
    return stokes_like_solve(theta, solver, nullptr);
}

ScalarField solve_truncated(const ScalarField& theta, const SlabParams& params) {
    (void)params;
    BiharmonicSolver solver(theta.grid(), SlipLength::noslip());
    Eigen::VectorXd chi = half_indicator(theta.grid()->cheb(), true);
    return stokes_like_solve(theta, solver, &chi).w;
}

ScalarField solve_truncated_upper(const ScalarField& theta, const SlabParams& params) {
    (void)params;
    BiharmonicSolver solver(theta.grid(), SlipLength::noslip());
    Eigen::VectorXd chi = half_indicator(theta.grid()->cheb(), false);
    return stokes_like_solve(theta, solver, &chi).w;
}

std::complex<double> BiharmonicProfile::eval(double z, int nd) const {
    const double k = k_;
    const double em = std::exp(-k * z);          // e^{-kz}
    const double ep = std::exp(-k * (h_ - z));   // e^{-k(H-z)}
    double km = 1.0, kp = 1.0;                   // (-k)^nd and k^nd
    for (int i = 0; i < nd; ++i) { km *= -k; kp *= k; }
    // d^n [e^{-kz}] = (-k)^n e^{-kz}
    // d^n [z e^{-kz}] = (-k)^n (z - n/k) e^{-kz}
    // d^n [e^{-k(H-z)}] = k^n e^{-k(H-z)}
    // d^n [(H-z) e^{-k(H-z)}] = k^n ((H-z) - n/k) e^{-k(H-z)}
    std::complex<double> r = c_[0] * (km * em);
    r += c_[1] * (km * (z - nd / k) * em);
    r += c_[2] * (kp * ep);
    r += c_[3] * (kp * ((h_ - z) - nd / k) * ep);
    return r;
}

BiharmonicProfile solve_biharmonic_homogeneous(double k, double height,
                                               const std::array<BoundaryRow, 4>& rows) {
    if (!(k > 0.0)) throw ParamError("homogeneous biharmonic basis needs k > 0");
    if (!(height > 0.0)) throw ParamError("height must be positive");
    const double h = height;
    // Basis values/derivatives at a wall, as rows (b1, b2, b3, b4).
    auto basis_at = [&](double z, int nd) {
        Eigen::RowVector4d r;
        double em = std::exp(-k * z), ep = std::exp(-k * (h - z));
        double km = 1.0, kp = 1.0;
        for (int i = 0; i < nd; ++i) { km *= -k; kp *= k; }
        r << km * em, km * (z - nd / k) * em, kp * ep, kp * ((h - z) - nd / k) * ep;
        return r;
    };
    Eigen::Matrix4d M;
    Eigen::Vector4cd rhs;
    for (int i = 0; i < 4; ++i) {
        const BoundaryRow& bc = rows[i];
        double zw = (bc.wall == 0) ? 0.0 : h;
        Eigen::RowVector4d r = Eigen::RowVector4d::Zero();
        if (bc.a0 != 0.0) r += bc.a0 * basis_at(zw, 0);
        if (bc.a1 != 0.0) r += bc.a1 * basis_at(zw, 1);
        if (bc.a2 != 0.0) r += bc.a2 * basis_at(zw, 2);
        double s = r.cwiseAbs().maxCoeff();
        if (s == 0.0) throw ParamError("empty boundary row");
        M.row(i) = r / s;
        rhs[i] = bc.value / s;
    }
    Eigen::FullPivLU<Eigen::Matrix4d> lu(M);
    if (!lu.isInvertible()) throw NumericsError("boundary rows do not determine the profile");
    Eigen::Vector4d xr = lu.solve(Eigen::Vector4d(rhs.real()));
    Eigen::Vector4d xi = lu.solve(Eigen::Vector4d(rhs.imag()));
    return BiharmonicProfile(k, h,
                             {std::complex<double>(xr[0], xi[0]), std::complex<double>(xr[1], xi[1]),
                              std::complex<double>(xr[2], xi[2]), std::complex<double>(xr[3], xi[3])});
}

}  // namespace rbslip
