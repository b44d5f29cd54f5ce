#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "rbslip/params.hpp"

namespace rbslip {

// Closed-form wall-response multiplier. m_sigma(k, z) is the solution of the
// homogeneous fourth-order mode problem
//
//   (d^2/dz^2 - k^2)^2 m = 0,  m(0) = 0,  m'(0) - sigma m''(0) = 0,
//                              m(H) = 1,  m'(H) + sigma m''(H) = 0,
//
// i.e. the profile by which top-wall Dirichlet data propagates into the slab
// under Navier-slip side constraints. Every exponential in the evaluation is
// decaying (arguments -k(H-z), -k(3H+z), -k(3H-z), -k(H+z) and the matching
// denominator), so the formula is stable for arbitrarily large k*H.
//
// Requires height*k >= 1; for smaller k the denominator loses its lower
// bound of order (1 + sigma k)^2 and the formula is not used.
double m_sigma(double k, double z, const SlabParams& params);
double m_sigma_dz(double k, double z, const SlabParams& params);

// Denominator of the closed form, and its split into three individually
// nonnegative terms (for height*k >= 1):
//   [0] 1 - 2(1 + 2H^2k^2) e^{-2Hk} + e^{-4Hk}
//   [1] 4 sigma k (1 - 4Hk e^{-2Hk} - e^{-4Hk})
//   [2] 4 sigma^2 k^2 (1 - e^{-2Hk})^2
// Their sum is the denominator; the split certifies the (1+sigma k)^2 lower
// bound used by the stability analysis of the formula.
double m_sigma_den(double k, const SlabParams& params);
std::array<double, 3> m_sigma_den_split(double k, const SlabParams& params);

struct MultiplierCheck {
    double max_rel_dev = 0.0;    // closed form vs independent BVP solve
    double bottom_value = 0.0;   // |m(0)|, must vanish
    double top_value_err = 0.0;  // |m(H) - 1|
    double dz_over_k = 0.0;      // max_z |dz m| / k, the derivative-bound constant
};

// Independent check: prescribe top data -phi on the fourth-order BVP (solved
// in the decaying exponential basis) and compare against -m_sigma * phi on
// the sampled heights.
MultiplierCheck verify_m_sigma(double k, const SlabParams& params,
                               const Eigen::VectorXd& zsamples);

// Wall curvature of the clamped slab correction: V solves
// (d^2/dz^2 - k^2)^2 V = 0 with V(0) = V'(0) = 0, V(H) = a H^2, V'(H) = b H.
// Returns dzz V(z), solved in the decaying exponential basis.
std::complex<double> v0_ode_solution(double k, const SlabParams& params,
                                     std::complex<double> a, std::complex<double> b, double z);

// Closed forms for the wall curvatures of the same problem. The bottom
// expression is exact. The top expression (normalized by the same
// denominator) is exact in its b part; its a part carries a defect of order
// (Hk)^2 e^{-2Hk}, negligible for Hk >~ 10 but visible below.
double v0_dzz_bottom_closed(double k, double height, double a, double b);
double v0_dzz_top_closed(double k, double height, double a, double b);

}  // namespace rbslip
