#include "rbslip/field.hpp"

#include <cmath>
#include <random>

namespace rbslip {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

// Deterministic across platforms: raw mt19937_64 output mapped to [0,1).
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long long seed) : gen(seed) {}
    double uniform() { return (gen() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform() - 1.0; }
};
}  // namespace

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)) {
    c_ = Eigen::MatrixXcd::Zero(grid_->nlevels(), grid_->nmodes());
}

Eigen::MatrixXd ScalarField::physical() const {
    Eigen::MatrixXcd phys;
    grid_->to_physical(c_, phys);
    return phys.real();
}

void ScalarField::set_physical(const Eigen::MatrixXd& values) {
    Eigen::MatrixXcd phys = values.cast<std::complex<double>>();
    grid_->to_spectral(phys, c_);
    grid_->zero_nonretained(c_);
    enforce_hermitian();
}

double ScalarField::hermitian_error() const {
    double e = 0.0;
    for (int m : grid_->half_modes()) {
        int mc = grid_->conj_index(m);
        e = std::max(e, (c_.col(mc) - c_.col(m).conjugate()).cwiseAbs().maxCoeff());
    }
    return e;
}

void ScalarField::enforce_hermitian() {
    for (int m : grid_->half_modes()) {
        int mc = grid_->conj_index(m);
        if (mc == m) {
            c_.col(m) = c_.col(m).real().cast<std::complex<double>>();
        } else {
            Eigen::VectorXcd avg = 0.5 * (c_.col(m) + c_.col(mc).conjugate());
            c_.col(m) = avg;
            c_.col(mc) = avg.conjugate();
        }
    }
}

double ScalarField::l2norm() const {
    const Eigen::VectorXd& w = grid_->cheb().w;
    double s = 0.0;
    for (int m = 0; m < grid_->nmodes(); ++m)
        s += w.dot(c_.col(m).cwiseAbs2());
    return std::sqrt(s);
}

Eigen::VectorXd ScalarField::mean_profile() const {
    return c_.col(grid_->mean_mode()).real();
}

ScalarField ScalarField::reflect_z() const {
    ScalarField r(grid_);
    r.c_ = c_.colwise().reverse();
    return r;
}

ScalarField ScalarField::translate(int cells_x, int cells_y) const {
    ScalarField r(grid_);
    const int nx = grid_->nx();
    for (int m = 0; m < grid_->nmodes(); ++m) {
        const Mode& mo = grid_->mode(m);
        double phase = -kTwoPi * (double(mo.sx) * cells_x + double(mo.sy) * cells_y) / nx;
        r.c_.col(m) = c_.col(m) * std::polar(1.0, phase);
    }
    return r;
}

double VelocityField::incompressibility_residual() const {
    const GridPtr& g = w.grid();
    const Eigen::MatrixXd& D = g->cheb().D;
    Eigen::MatrixXcd dzw = D * w.coeffs();
    double wn = w.l2norm();
    if (wn == 0.0) wn = 1.0;
    double r = 0.0;
    for (int m = 0; m < g->nmodes(); ++m) {
        const Mode& mo = g->mode(m);
        Eigen::VectorXcd div = dzw.col(m);
        div += std::complex<double>(0.0, mo.kx) * v[0].coeffs().col(m);
        if (g->params().hdim == 2) div += std::complex<double>(0.0, mo.ky) * v[1].coeffs().col(m);
        r = std::max(r, div.cwiseAbs().maxCoeff());
    }
    return r / wn;
}

bool VelocityField::finite() const {
    if (!w.finite()) return false;
    for (const auto& f : v)
        if (!f.finite()) return false;
    return true;
}

ScalarField random_smooth_field(GridPtr grid, unsigned long long seed, double amplitude,
                                int max_hmode, int max_vmode) {
    Rng rng(seed);
    const int nz = grid->nz();
    const double H = grid->params().height;
    ScalarField f(grid);
    Eigen::MatrixXcd& c = f.coeffs();

    // Vertical profiles sin(m pi z / H) sampled at the nodes.
    std::vector<Eigen::VectorXd> vert(max_vmode);
    for (int mv = 1; mv <= max_vmode; ++mv) {
        vert[mv - 1].resize(nz + 1);
        for (int j = 0; j <= nz; ++j)
            vert[mv - 1][j] = std::sin(mv * kPi * grid->cheb().z[j] / H);
    }

    for (int m : grid->half_modes()) {
        const Mode& mo = grid->mode(m);
        if (m == grid->mean_mode()) continue;  // zero horizontal mean
        if (!mo.dealias_keep) continue;
        if (std::abs(mo.sx) > max_hmode || std::abs(mo.sy) > max_hmode) continue;
        std::complex<double> amp(rng.symmetric(), rng.symmetric());
        Eigen::VectorXd prof = Eigen::VectorXd::Zero(nz + 1);
        for (int mv = 1; mv <= max_vmode; ++mv) prof += rng.symmetric() * vert[mv - 1];
        c.col(m) = amp * prof.cast<std::complex<double>>();
        c.col(grid->conj_index(m)) = c.col(m).conjugate();
    }

    double sup = f.physical().cwiseAbs().maxCoeff();
    if (sup > 0.0) c *= amplitude / sup;
    return f;
}

}  // namespace rbslip
