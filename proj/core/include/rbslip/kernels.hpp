#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace rbslip {

// Arguments of the boundary-layer kernel family. xi is a horizontal frequency
// magnitude; z, ztilde are heights above the wall; sigma the slip length.
struct KernelQuery {
    double xi = 0.0;
    double z = 0.0;
    double ztilde = 0.0;
    double sigma = 0.0;
};

// Poisson kernel of the half space R^2 x (0, inf) and its Fourier transform:
//   P_s(y) = (1/2pi) s / (s^2 + |y|^2)^{3/2},   Phat_s(xi) = (1/2pi) e^{-s |xi|}.
// Conventions match: f(y) = int_0^inf fhat(rho) J_0(rho |y|) rho drho for
// radial functions, so that Phat_s(0) integrates P_s to one.
double poisson_kernel(double s, double y1, double y2);
double poisson_kernel_radial(double s, double r);
double poisson_hat(double s, double rho);

// Frequency-side boundary kernel of the slip correction:
//   -(sigma z ztilde / 2pi) |xi|^2 e^{-(z+ztilde)|xi|} / (1 + 2 sigma |xi|).
double b_sigma_hat(const KernelQuery& q);

// Wall curvature kernel of the clamped half space: ztilde * lap_y P_ztilde(y),
// evaluated with the closed-form Laplacian of the Poisson kernel.
double k0_dzz_boundary(double ztilde, double y1, double y2);
double k0_dzz_boundary_radial(double ztilde, double r);

// Physical-space evaluation of the slip kernel and its derivatives. The
// order-zero symbol 1/(1 + 2 sigma rho) is removed by exponential
// subordination, 1/(1+2 sigma rho) = int_0^inf e^{-t} e^{-2 sigma t rho} dt,
// which turns every quantity into an integral of closed-form derivatives of
// the Poisson kernel along vertically shifted copies. No numerical Fourier
// transform is involved; `panels` controls the quadrature resolution in t.
class KernelEvaluator {
  public:
    explicit KernelEvaluator(double sigma, int panels = 48, int glpts = 12);

    // B(y, z, ztilde) at |y| = r, and the derivative family that the decay
    // bounds control. grad_y and grad_invlap return the (signed) radial
    // derivative; their magnitudes are |grad| by radial symmetry.
    double value(double r, double z, double zt) const;
    double grad_y(double r, double z, double zt) const;
    double dz(double r, double z, double zt) const;
    double dzz(double r, double z, double zt) const;
    double lap_y(double r, double z, double zt) const;
    double grad_invlap(double r, double z, double zt) const;

    double sigma() const { return sigma_; }

    // Inverse transform of rho^n e^{-s0 rho} / (2 pi (1 + 2 sigma rho)),
    // optionally differentiated in r. Exposed for cross-checks.
    double subordinated(int n, double s0, double r, bool dr = false) const;

  private:
    double sigma_;
    std::vector<double> tn_, tw_;  // quadrature nodes/weights on t in (0, 60)
};

// Direct radial inverse Fourier transform (Hankel form), used as an
// independent oracle for the subordinated evaluator at moderate radii.
double hankel_inverse(const std::function<double(double)>& fhat, double r, double rho_max,
                      int panels = 400, int glpts = 8);

// |2pi int_0^inf P_s r dr - 1|, radial quadrature up to rmax.
double poisson_normalization_error(double s, double rmax = 3.0e6);  // rmax scales with max(1, s)
// |2pi int_0^inf ztilde lap_y P_ztilde r dr|: the Laplacian integrates to zero.
double laplacian_poisson_integral(double ztilde, double rmax = 3.0e6);
// max_{|y| <= compare_radius} |P_s(y) - (P_{s/2} * P_{s/2})(y)| via zero-padded
// FFT convolution on [-half_width, half_width]^2 with spacing h.
double poisson_semigroup_error(double s, double half_width, double h, double compare_radius);

// Fitted constants of the four pointwise decay bounds:
//   |grad_y (-lap_y)^{-1} B| <= C (sigma z zt) / (z + zt + |y|)^3
//   |B|                      <= C (sigma z zt) / (z + zt + |y|)^4
//   |grad_y B| + |dz B|      <= C (sigma zt)   / (z + zt + |y|)^4
//   |lap_y B| + |dzz B|      <= C (sigma zt)   / (z + zt + |y|)^5
struct DecayConstants {
    double grad_invlap = 0.0;
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

struct DecayCheck {
    DecayConstants coarse;    // base quadrature resolution
    DecayConstants fine;      // doubled resolution
    double max_rel_change = 0.0;  // between the two, over the four constants
};

// Sup of each normalized quantity over the (z, ztilde) samples and a log
// radius sweep; finite, refinement-stable constants certify the bounds.
DecayCheck kernel_decay_check(double sigma, const std::vector<std::pair<double, double>>& zz);

// Least-squares slope of log |B(r, z, zt)| against log r over [r_lo, r_hi].
double b_sigma_tail_slope(double sigma, double z, double zt, double r_lo, double r_hi,
                          int npts);

}  // namespace rbslip
