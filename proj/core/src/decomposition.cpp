#include "rbslip/decomposition.hpp"

namespace rbslip {

Decomposition decomposition_suite(const ScalarField& theta, const SlabParams& params) {
    params.validate();
    if (params.slip.is_free())
        throw ParamError("decomposition needs a finite slip length (data is sigma * dzz at walls)");
    const double sigma = params.slip.value();
    const GridPtr& g = theta.grid();
    const Cheb& cheb = g->cheb();

    Decomposition out;
    out.w_slip = solve_stokes(theta, params).w;
    out.w_noslip = solve_noslip(theta, params).w;
    out.v_lower = solve_truncated(theta, params);
    out.h_sigma = ScalarField(g);
    out.g_sigma = ScalarField(g);

    if (sigma == 0.0) {
        // no-slip walls: the correction and both parts vanish identically
        out.residual = 0.0;
        return out;
    }

    // Same discrete operator family as the velocity solves, so the additive
    // identity holds to roundoff.
    BiharmonicSolver solver(g, params.slip);
    const int top = cheb.top(), bottom = cheb.bottom();
    Eigen::MatrixXcd dzz_v = cheb.D2 * out.v_lower.coeffs();
    Eigen::MatrixXcd dzz_rest = cheb.D2 * out.w_noslip.coeffs() - dzz_v;

    Eigen::VectorXcd b(g->nlevels());
    for (int m : g->half_modes()) {
        const Mode& mo = g->mode(m);
        if (mo.k2 == 0.0) continue;
        const ModeBvp& bvp = solver.mode_bvp(mo.k2);

        auto solve_part = [&](const Eigen::MatrixXcd& dzz, ScalarField& dst) {
            b.setZero();
            b[bvp.row_bottom_tangential()] = sigma * dzz(bottom, m);
            b[bvp.row_top_tangential()] = -sigma * dzz(top, m);
            Eigen::VectorXcd x = bvp.solve(b);
            dst.coeffs().col(m) = x;
            int mc = g->conj_index(m);
            if (mc != m) dst.coeffs().col(mc) = x.conjugate();
        };
        solve_part(dzz_v, out.h_sigma);
        solve_part(dzz_rest, out.g_sigma);
    }
    out.h_sigma.enforce_hermitian();
    out.g_sigma.enforce_hermitian();

    ScalarField diff(g);
    diff.coeffs() = out.w_slip.coeffs() - out.w_noslip.coeffs() - out.h_sigma.coeffs() -
                    out.g_sigma.coeffs();
    double denom = 0.0;
    {
        ScalarField corr(g);
        corr.coeffs() = out.w_slip.coeffs() - out.w_noslip.coeffs();
        denom = corr.l2norm();
    }
    out.residual = (denom == 0.0) ? 0.0 : diff.l2norm() / denom;
    return out;
}

}  // namespace rbslip
