#pragma once

#include <map>
#include <string>
#include <vector>

#include "rbslip/field.hpp"
#include "rbslip/stokes.hpp"

namespace rbslip {

// Temperature is evolved as the deviation tau from the conduction profile,
// T = (1 - z/height) + tau, which makes both wall rows homogeneous. The
// velocity is slaved: recomputed from tau through the momentum solve at
// every step (infinite Prandtl number).
struct SimState {
    GridPtr grid;
    ScalarField tau;
    double time = 0.0;
    long step_count = 0;
    unsigned long long rng_seed = 0;

    // multistep memory: explicit term of the previous step and its size
    ScalarField explicit_prev;
    double dt_prev = 0.0;
    bool have_prev = false;

    const SlabParams& params() const { return grid->params(); }
};

struct StepperConfig {
    double dt = 0.0;        // fixed step when > 0, else adaptive from the CFL
    double cfl = 0.4;       // advective safety factor, in (0, 1]
    bool dealias = true;    // 2/3 rule on the advection product
    double dt_max = 0.0;    // adaptive cap; 0 picks 0.05 * height^2
    double dt_min = 1e-13;  // adaptive floor; reaching it is a numerics error

    void validate() const;
};

// Fixed-dt mode refuses steps beyond the advective limit.
struct StepRejected : NumericsError {
    double admissible_dt;
    StepRejected(const std::string& msg, double adm) : NumericsError(msg), admissible_dt(adm) {}
};

// tau = amplitude * smooth random field (vanishing at the walls, zero mean),
// reproducible from the seed. amplitude <= 0.1 keeps T inside [0, 1].
SimState init_state(const SlabParams& params, GridPtr grid, unsigned long long seed,
                    double amplitude);

// Crank-Nicolson diffusion + variable-step Adams-Bashforth-2 advection.
// Owns the per-mode implicit factorizations (rebuilt only when dt moves on a
// power-of-two ladder) and the momentum factorization cache.
class Stepper {
  public:
    Stepper(GridPtr grid, StepperConfig cfg);

    // One IMEX step. Throws StepRejected (fixed dt beyond the CFL) or
    // BlowUpError (non-finite state).
    void advance(SimState& s);

    // Velocity slaved to the state's temperature, cached per (time, step), so
    // a diagnostics read before advance() costs no second momentum solve.
    const VelocityField& velocity_for(const SimState& s);
    VelocityField velocity_of(const ScalarField& tau) const;

    double last_dt() const { return dt_last_; }
    const StepperConfig& config() const { return cfg_; }

    // Largest advection-stable step for the given velocity (before the
    // safety factor): min over levels of spacing / speed.
    double advective_limit(const VelocityField& u) const;

  private:
    void ensure_factorization(double dt);
    ScalarField explicit_term(const ScalarField& tau, const VelocityField& u) const;

    GridPtr grid_;
    StepperConfig cfg_;
    BiharmonicSolver stokes_;
    VelocityField u_;
    bool cache_valid_ = false;
    long cache_step_ = -1;
    double cache_time_ = 0.0;
    double dt_last_ = 0.0;
    double dt_rung_ = 0.0;   // current rung of the adaptive power-of-two ladder

    double dt_fact_ = -1.0;  // coefficient baked into the implicit factorizations
    std::map<double, Eigen::PartialPivLU<Eigen::MatrixXd>> implicit_;  // by k^2
    std::vector<double> dzmin_;  // local vertical spacing per level
};

// Per-step diagnostics of a run, one entry per recorded step.
struct TimeSeries {
    std::vector<double> time, nu_flux, nu_dissipation, nu_boundary, eps_mp, dt;
    size_t size() const { return time.size(); }
};

struct RunOptions {
    double t_end = 0.0;
    double steady_tol = 0.0;     // stop when the running Nu average drifts less
    double steady_window = 0.0;  // ... than this over this trailing time window
    double min_time = 0.0;       // never stop (on drift) before this time
};

struct RunResult {
    TimeSeries series;
    bool reached_steady = false;
};

// Integrates until t_end (or the drift criterion), recording instantaneous
// Nusselt estimators, the nodal maximum-principle overshoot and dt.
RunResult run_until(SimState& s, Stepper& stepper, const RunOptions& opt);

// Versioned binary checkpoint of (params, resolution, tau, time, multistep
// memory); load restores bit-identical state.
void save_checkpoint(const SimState& s, const std::string& path);
SimState load_checkpoint(const std::string& path);

}  // namespace rbslip
