#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rbslip/diagnostics.hpp"
#include "rbslip/params.hpp"

namespace rbslip {

inline constexpr const char* kCodeVersion = "rbslip 0.1.0";

// A run finished without meeting its steadiness / statistics contract.
struct ConvergenceError : Error {
    using Error::Error;
};
// An in-run physics self-check (energy identity, Nu lower bound) failed.
struct OracleError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------- regimes --

enum class Regime { NoSlipLike, Intermediate, FreeSlipLike };

struct RegimeInfo {
    Regime regime;
    double exponent;       // reference scaling exponent, original normalization
    const char* variable;  // what the exponent applies to: "ra" or "sigma*ra"
};

// Classify by rescaled slip length against thresholds at exactly 1 and
// sqrt(height); ties go to the larger regime. Free slip enters as +inf.
RegimeInfo regime_classify(double sigma_rescaled, double height);

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// ----------------------------------------------------------- run configs --

struct RunConfig {
    double ra = 1.0e5;
    SlipLength slip = SlipLength::noslip();  // original-normalization slip
    double aspect = 2.0;
    int hdim = 1;
    int nx = 256;
    int nz = 64;
    unsigned seed = 1;
    double amplitude = 0.05;

    double t_spinup = 15.0;  // rescaled time discarded before averaging
    double t_avg = 30.0;     // averaging window, rescaled time
    int batches = 10;
    double steady_tol = 0.0;  // > 0: spin-up may end early on Nu drift
    double steady_window = 0.0;
    bool require_steady = false;  // insist the drift criterion fired

    double dt = 0.0;  // fixed step; 0 = adaptive
    double cfl = 0.4;
    double dt_max = 0.0;  // adaptive cap; 0 = solver default

    int energy_check_every = 200;  // steps between energy-identity spot checks
    // In-run identity residuals sit on a roundoff floor amplified by the
    // second-derivative conditioning (~nz^4 eps); vigorous production fields
    // at nz = 64 reach a few 1e-7, far below any consequential inconsistency.
    double energy_tol = 1.0e-5;

    std::string outdir = "run";

    void validate() const;
    SlabParams rescaled_params() const;
};

// Flat key = value text with '#' comments. Unknown or duplicate keys are
// errors; messages carry 1-based line numbers.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

// Builds a config from keys on top of `base`. Keys mirror the field names;
// `sigma` accepts a number (original units), `free`, or `ra^p` / `ra^p/q`
// meaning ra raised to that power (using the ra of the same config).
RunConfig config_from_keys(const std::map<std::string, std::string>& keys,
                           RunConfig base = RunConfig());
std::string config_to_keys(const RunConfig& cfg);  // round-trips through the parser

SlipLength parse_sigma_token(std::string token, double ra);

// Cross product of comma-separated `ra` and `sigma` lists (all other keys
// shared), ra outermost; this fixes the sweep's deterministic run order.
std::vector<RunConfig> expand_sweep(const std::map<std::string, std::string>& keys,
                                    RunConfig base = RunConfig());

// --------------------------------------------------------------- records --

struct SweepRecord {
    double ra = 0.0;
    double sigma = 0.0;  // original normalization; +inf = free slip
    double sigma_rescaled = 0.0;
    double height = 0.0;  // rescaled slab height ra^(1/3)
    double nu = 0.0;      // original normalization
    double nu_err = 0.0;  // standard error of the flux estimator
    std::string regime;
    int nx = 0;
    int nz = 0;
    unsigned seed = 0;
    double walltime_s = 0.0;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);  // floats at 17 significant digits
std::vector<SweepRecord> read_sweep_csv(std::istream& in);
std::vector<SweepRecord> read_sweep_csv_file(const std::string& path);

// --------------------------------------------------------------- running --

struct EstimatorStat {
    double mean = 0.0;
    double se = 0.0;
};

struct RunSummary {
    SweepRecord record;
    EstimatorStat flux, dissipation, boundary;  // rescaled units
    double profile_cov = 0.0;      // variation of the mean vertical flux profile
    std::vector<Localization> localization;  // delta scan, smallest first
    double max_energy_residual = 0.0;
    double max_overshoot = 0.0;  // maximum-principle monitor over the run
    double terminal_norm = 0.0;  // ||tau|| at the final step
    bool reached_steady = false;
};

// Executes one run: spin-up, averaged measurement, diagnostics. Artifacts in
// cfg.outdir: config.txt, timeseries.csv, localization.csv, summary.txt,
// report.txt, run.ckpt and a DONE marker holding the sweep CSV row. Failures
// leave a FAILED file with the reason and rethrow.
RunSummary run_single(const RunConfig& cfg);

RunSummary read_run_summary(const std::string& rundir);  // from summary.txt

struct SweepResult {
    std::vector<SweepRecord> records;  // successes, config order
    std::vector<int> failed;           // config indices
    std::vector<std::string> failure_messages;
    int exit_code = 0;  // 0, or the code of the first failed run
};

// Runs the grid of configs under root/run_NNN, writes manifest.txt and
// sweep.csv, resumes from DONE markers. jobs > 1 runs configs concurrently;
// outputs stay in config order either way.
SweepResult run_sweep(std::vector<RunConfig> configs, const std::string& root, int jobs = 1);

// ------------------------------------------------------------------ fits --

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;  // in log space
    double r2 = 0.0;
    double slope_se = 0.0;
    double slope_ci95 = 0.0;  // half-width, Student-t
    double reference = 0.0;   // regime exponent the slope is compared against
    double gap = 0.0;         // slope - reference
    int n = 0;
};

// Log-log least squares of nu against ra (no-slip / free-slip regimes) or
// sigma*ra (intermediate). Requires >= 3 records spanning a decade in ra.
FitResult fit_scaling(const std::vector<SweepRecord>& records, Regime regime);

// Smallest C with nu <= C * height * max(1, sqrt(sigma_rescaled),
// height^(1/4)) across all records (free-slip rows are unconstraining).
double envelope_constant(const std::vector<SweepRecord>& records);

// Per-Ra check that nu does not decrease with sigma beyond `nsigma` combined
// error bars; returns offending record pairs' descriptions (empty = pass).
std::vector<std::string> monotonicity_violations(const std::vector<SweepRecord>& records,
                                                 double nsigma = 3.0);

// Text report: per-regime fits where well-posed, envelope constant,
// monotonicity summary.
std::string scaling_report(const std::vector<SweepRecord>& records);

// ----------------------------------------------------------------- plots --

struct PlotBundle {
    std::string script;  // python, embeds the data (deterministic bytes)
    std::string data;    // normalized CSV copy of the parsed rows
};

// Builds the plotting script (log-log nu vs ra per sigma series with the 1/3
// and 5/12 reference slopes; nu vs sigma_rescaled at fixed ra with the
// 1 / sqrt(sigma) / height^(1/4) reference envelope) from sweep CSV text.
PlotBundle emit_plots(std::istream& csv);

}  // namespace rbslip
