#pragma once

#include <map>
#include <string>
#include <vector>

#include "rbslip/field.hpp"

namespace rbslip {

// Instantaneous heat-flux estimators. At exact statistical stationarity all
// three coincide and the flux profile is z-independent; finite runs carry the
// observed spread. Values are in the normalization of the grid's params:
// the conduction value is 1/height (so 1 in the unit-height normalization).
struct NusseltReport {
    double flux = 0.0;         // (1/H) (int <w theta> dz + 1)
    double dissipation = 0.0;  // int <|grad T|^2> dz
    double boundary = 0.0;     // -dz<T> at z = 0
    Eigen::VectorXd flux_profile;  // <w theta> - dz<T> per level (descending z)
    double conduction = 0.0;       // 1/height, for reference
};

// theta is the mean-free temperature; since the mean mode carries no vertical
// velocity, <w theta> = <w tau> with tau the deviation from conduction.
// Horizontal averages are exact (k = 0 coefficient / Parseval), vertical
// integrals use the Clenshaw-Curtis weights, the wall derivative uses the
// collocation matrix row.
NusseltReport nusselt_snapshot(const ScalarField& tau, const VelocityField& vel);

// <w theta>(z) alone: the profile the localization bound integrates.
Eigen::VectorXd wtheta_profile(const ScalarField& tau, const VelocityField& vel);

// max(0, max T - 1, -min T) with T = (1 - z/H) + tau, evaluated on the
// collocation grid refined `refine`-fold in every direction (horizontal
// half-cell phase shifts, vertical barycentric interpolation).
double maximum_principle_overshoot(const ScalarField& tau, int refine = 1);

// Relative residuals of the two per-mode elliptic identities obtained by
// testing the momentum balance with w and with (-lap_y)^{-1} w:
//   A: int |f''|^2 + 2k^2 |f'|^2 + k^4 |f|^2 dz + sigma (|f''|^2 at walls)
//        = R k^2 int Re(thetahat conj(f)) dz
//   B: the same divided by k^2.
// Both hold per snapshot whenever vel solves the momentum balance of theta.
// Free-slip walls carry no boundary term (f'' vanishes there).
struct EnergyCheck {
    double residual_a = 0.0;      // max over modes of |LHS-RHS| / (|LHS|+|RHS|)
    double residual_b = 0.0;
    double rhs_min_rel = 0.0;     // min RHS / max LHS: the identity forces >= 0
    double boundary_share = 0.0;  // max over modes of sigma-term / LHS
};
EnergyCheck energy_identity_residuals(const ScalarField& theta, const VelocityField& vel);

// Trapezoid-in-time averages of named scalar and profile streams over
// [t_start, t_end], split into equal non-overlapping batches for error bars.
// Samples must arrive in nondecreasing time order; segments are clipped to
// the window, so a sample stream covering the window gives exact averages of
// constants and midpoint-exact averages of linear drifts.
class TimeAverager {
  public:
    TimeAverager() = default;
    TimeAverager(double t_start, double t_end, int batches = 10);

    void push(const std::string& name, double t, double value);
    void push_profile(const std::string& name, double t, const Eigen::VectorXd& value);

    struct Stat {
        double mean = 0.0;
        double se = 0.0;               // standard error from batch means
        Eigen::VectorXd batch_means;
    };
    Stat scalar(const std::string& name) const;
    Eigen::VectorXd profile_mean(const std::string& name) const;
    // One column per batch.
    Eigen::MatrixXd profile_batches(const std::string& name) const;

    int batches() const { return nb_; }
    double t_start() const { return t0_; }
    double t_end() const { return t1_; }

  private:
    struct Stream {
        bool started = false;
        double prev_t = 0.0;
        Eigen::VectorXd prev_v;
        Eigen::MatrixXd integral;  // (dim) x (batches)
        Eigen::VectorXd covered;   // time covered per batch
    };
    void accumulate(Stream& s, double t, const Eigen::VectorXd& v);
    const Stream& stream(const std::string& name) const;

    double t0_ = 0.0, t1_ = 1.0;
    int nb_ = 10;
    std::map<std::string, Stream> streams_;
};

// Stream names the run loop records and the checks below consume.
inline constexpr const char* kStreamNuFlux = "nu_flux";
inline constexpr const char* kStreamNuDissipation = "nu_dissipation";
inline constexpr const char* kStreamNuBoundary = "nu_boundary";
inline constexpr const char* kStreamWTheta = "wtheta";

// Boundary-layer localization bound: Nu <= (1/delta) int_0^delta <w theta> dz
// + 1/delta, for delta in (0, H). Evaluated per batch; margin = rhs - lhs
// with a 3-standard-error tolerance.
struct Localization {
    double delta = 0.0;
    double lhs = 0.0;     // averaged nu_flux
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double tolerance = 0.0;
    bool ok = false;      // margin >= -tolerance
};
Localization localization_check(const TimeAverager& avg, const Cheb& cheb, double delta);

}  // namespace rbslip
