#include "rbslip/operators.hpp"

namespace rbslip {

ScalarField apply_derivative(const ScalarField& f, Deriv which) {
    const GridPtr& g = f.grid();
    ScalarField r(g);
    switch (which) {
        case Deriv::dz:
            r.coeffs() = g->cheb().D * f.coeffs();
            break;
        case Deriv::dz2:
            r.coeffs() = g->cheb().D2 * f.coeffs();
            break;
        case Deriv::lap_y:
            for (int m = 0; m < g->nmodes(); ++m)
                r.coeffs().col(m) = -g->mode(m).k2 * f.coeffs().col(m);
            break;
        case Deriv::inv_lap_y:
            for (int m = 0; m < g->nmodes(); ++m) {
                if (g->mode(m).k2 == 0.0)
                    r.coeffs().col(m).setZero();
                else
                    r.coeffs().col(m) = f.coeffs().col(m) / -g->mode(m).k2;
            }
            break;
    }
    return r;
}

std::vector<ScalarField> grad_y(const ScalarField& f) {
    const GridPtr& g = f.grid();
    std::vector<ScalarField> out(g->params().hdim, ScalarField(g));
    for (int m = 0; m < g->nmodes(); ++m) {
        const Mode& mo = g->mode(m);
        out[0].coeffs().col(m) = std::complex<double>(0.0, mo.kx) * f.coeffs().col(m);
        if (g->params().hdim == 2)
            out[1].coeffs().col(m) = std::complex<double>(0.0, mo.ky) * f.coeffs().col(m);
    }
    return out;
}

ScalarField apply_symbol(const ScalarField& f, const std::function<double(double)>& symbol) {
    const GridPtr& g = f.grid();
    ScalarField r(g);
    for (int m = 0; m < g->nmodes(); ++m)
        r.coeffs().col(m) = symbol(g->mode(m).kabs) * f.coeffs().col(m);
    return r;
}

}  // namespace rbslip
