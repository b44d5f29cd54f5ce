#pragma once

#include <Eigen/Dense>

namespace rbslip {

// Chebyshev-Gauss-Lobatto collocation on [0, H].
//
// Node ordering is descending: z[0] = H (top wall), z[n] = 0 (bottom wall),
// z[j] = (H/2)(1 + cos(j pi / n)). Nodes are mirrored exactly so that
// z[j] + z[n-j] == H holds in floating point; both endpoints are exact.
struct Cheb {
    int n = 0;                  // polynomial degree; n+1 nodes
    double height = 1.0;
    Eigen::VectorXd z;          // nodes, size n+1, descending
    Eigen::MatrixXd D;          // first-derivative collocation matrix, exact up to degree n
    Eigen::MatrixXd D2;         // second derivative (D*D)
    Eigen::VectorXd w;          // Clenshaw-Curtis quadrature weights on [0, H]

    Cheb() = default;
    Cheb(int n, double height);

    int top() const { return 0; }
    int bottom() const { return n; }

    // Barycentric evaluation of the interpolant of nodal values f at point zq.
    double eval(const Eigen::VectorXd& f, double zq) const;
    std::complex<double> eval(const Eigen::VectorXcd& f, double zq) const;

    // Interpolation matrix from these nodes to an arbitrary set of points.
    Eigen::MatrixXd interp_matrix(const Eigen::VectorXd& zq) const;

    // Chebyshev series coefficients of the interpolant (index 0..n).
    Eigen::VectorXd coeffs(const Eigen::VectorXd& f) const;

    // Integral of the interpolant over [0, delta], 0 <= delta <= H.
    double integrate_below(const Eigen::VectorXd& f, double delta) const;

  private:
    Eigen::VectorXd bary_;      // barycentric weights
};

}  // namespace rbslip
