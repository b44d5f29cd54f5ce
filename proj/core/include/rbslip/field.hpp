#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rbslip/grid.hpp"

namespace rbslip {

// Scalar field on a Grid, stored as horizontal Fourier coefficients of values
// at the vertical collocation nodes. Real-valued fields keep the Hermitian
// pairing fhat(-k) = conj(fhat(k)) as an invariant.
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    Eigen::MatrixXcd& coeffs() { return c_; }
    const Eigen::MatrixXcd& coeffs() const { return c_; }

    std::complex<double>& at(int level, int mode) { return c_(level, mode); }
    std::complex<double> at(int level, int mode) const { return c_(level, mode); }

    // Nodal values (real part; a Hermitian field has vanishing imaginary part).
    Eigen::MatrixXd physical() const;
    void set_physical(const Eigen::MatrixXd& values);

    // max_k |fhat(-k) - conj(fhat(k))| over retained modes and levels.
    double hermitian_error() const;
    void enforce_hermitian();

    // sqrt( int_0^H <f^2> dz ) via Parseval in y and Clenshaw-Curtis in z.
    double l2norm() const;
    // Horizontal mean profile, i.e. the k = 0 coefficient (real part).
    Eigen::VectorXd mean_profile() const;

    // Mirror z -> H - z (exact on the symmetric node set).
    ScalarField reflect_z() const;
    // Shift the pattern by an integer number of grid cells toward larger y:
    // result(y) = f(y - cells * L / nx).
    ScalarField translate(int cells_x, int cells_y = 0) const;

    bool finite() const { return c_.allFinite(); }

  private:
    GridPtr grid_;
    Eigen::MatrixXcd c_;  // (nz+1) x nmodes
};

// Velocity on a Grid: vertical component w plus hdim horizontal components.
struct VelocityField {
    ScalarField w;
    std::vector<ScalarField> v;  // size hdim

    // max over modes of |ik.vhat + dz what| / ||w|| (collocation dz).
    double incompressibility_residual() const;
    bool finite() const;
};

// Smooth reproducible pseudo-random field: a handful of low horizontal modes
// with sin(m pi z / H) vertical profiles, Hermitian by construction, zero at
// the walls, zero horizontal mean. sup|f| is normalized to amplitude.
ScalarField random_smooth_field(GridPtr grid, unsigned long long seed, double amplitude,
                                int max_hmode = 4, int max_vmode = 4);

}  // namespace rbslip
