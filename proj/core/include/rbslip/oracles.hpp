#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rbslip {

// One verification row. The default comparison is measured <= bound; rows
// with at_least set demand measured >= bound (convergence ratios, strict
// positivity). A NaN measurement fails either way.
struct OracleCheck {
    std::string group;
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool at_least = false;
    bool pass = false;
    std::string note;
};

// Cross-verification suite for the closed-form analysis layer and the onset
// oracle: manufactured momentum solves, the wall-response multiplier against
// an independent BVP solve, the correction split and its reflection symmetry,
// the per-mode energy identities, critical Rayleigh numbers against the
// classical constants, subcritical decay to conduction, and the Poisson /
// slip-kernel family (normalization, semigroup, tails, tall-slab limits).
// Deterministic; runs in well under a minute. Groups:
//   stokes, multiplier, decomposition, energy, onset, kernels
std::vector<OracleCheck> oracle_suite();

bool all_pass(const std::vector<OracleCheck>& checks);

// Aligned table, one line per check, then a pass-count summary line.
void print_report(std::ostream& os, const std::vector<OracleCheck>& checks);
// Header line group,name,measured,bound,comparison,pass,note then one row
// per check; fields never contain commas.
void print_report_csv(std::ostream& os, const std::vector<OracleCheck>& checks);

}  // namespace rbslip
