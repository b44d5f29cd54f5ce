#pragma once

#include <array>
#include <map>
#include <memory>

#include "rbslip/field.hpp"
#include "rbslip/operators.hpp"

namespace rbslip {

// One boundary row of a fourth-order mode BVP: a0 f + a1 f' + a2 f'' = value
// at the given wall.
struct BoundaryRow {
    int wall = 0;  // 0 = bottom (z = 0), 1 = top (z = H)
    double a0 = 0.0, a1 = 0.0, a2 = 0.0;
    std::complex<double> value{0.0, 0.0};
};

BoundaryRow dirichlet_row(int wall, std::complex<double> value = 0.0);
BoundaryRow slope_row(int wall, std::complex<double> value = 0.0);
// Tangential wall law: f' -/+ sigma f'' at bottom/top (free slip: f'' alone).
BoundaryRow tangential_row(int wall, SlipLength slip, std::complex<double> value = 0.0);

// Dense collocation discretization of (d^2/dz^2 - k^2)^2 on the Chebyshev
// nodes with four boundary rows replacing rows {0, 1, nz-1, nz}
// (top value, top tangential, bottom tangential, bottom value). Rows are
// scaled to unit max-norm before factorization; solves do one step of
// iterative refinement against the unscaled matrix.
class ModeBvp {
  public:
    ModeBvp(const Cheb& cheb, double k2, SlipLength slip);

    // b holds the PDE right-hand side at interior nodes 2..nz-2 and the four
    // boundary targets at positions {0, 1, nz-1, nz}.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    // Positions of the boundary targets inside the right-hand side vector.
    int row_top_value() const { return 0; }
    int row_top_tangential() const { return 1; }
    int row_bottom_tangential() const { return n_ - 1; }
    int row_bottom_value() const { return n_; }

  private:
    int n_;
    Eigen::MatrixXd a_;        // unscaled matrix (PDE + boundary rows)
    Eigen::VectorXd scale_;    // row scaling applied before factorization
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Per-grid cache of mode factorizations for one wall family. Factorizations
// are built serially on first use and shared across solves.
class BiharmonicSolver {
  public:
    BiharmonicSolver(GridPtr grid, SlipLength slip);
    const ModeBvp& mode_bvp(double k2) const;
    const GridPtr& grid() const { return grid_; }
    SlipLength slip() const { return slip_; }

  private:
    GridPtr grid_;
    SlipLength slip_;
    mutable std::map<double, std::unique_ptr<ModeBvp>> cache_;
};

// Momentum balance solve: (D^2-k^2)^2 what = R k^2 thetahat per retained mode
// with w = 0 and the tangential wall law at both walls; k = 0 carries no
// flow. Horizontal velocity from incompressibility, vhat = (ik/|k|^2) dz what.
VelocityField solve_stokes(const ScalarField& theta, const SlabParams& params);
VelocityField solve_stokes(const ScalarField& theta, const BiharmonicSolver& solver);

// Same with no-slip walls regardless of params.slip.
VelocityField solve_noslip(const ScalarField& theta, const SlabParams& params);

// No-slip solve with the buoyancy source restricted to the lower half slab
// (nodal indicator; the midplane node, when present, carries weight 1/2 so
// that the lower and upper truncations add up to the full source).
ScalarField solve_truncated(const ScalarField& theta, const SlabParams& params);
ScalarField solve_truncated_upper(const ScalarField& theta, const SlabParams& params);

// Exact solution of the homogeneous equation (d^2/dz^2 - k^2)^2 f = 0 in the
// decaying basis {e^{-kz}, z e^{-kz}, e^{-k(H-z)}, (H-z) e^{-k(H-z)}},
// determined by four boundary rows. No exponential ever grows.
class BiharmonicProfile {
  public:
    BiharmonicProfile(double k, double height, std::array<std::complex<double>, 4> coef)
        : k_(k), h_(height), c_(coef) {}
    std::complex<double> eval(double z, int nderiv = 0) const;
    const std::array<std::complex<double>, 4>& coefficients() const { return c_; }

  private:
    double k_, h_;
    std::array<std::complex<double>, 4> c_;
};

BiharmonicProfile solve_biharmonic_homogeneous(double k, double height,
                                               const std::array<BoundaryRow, 4>& rows);

}  // namespace rbslip
