#pragma once

#include "rbslip/params.hpp"

namespace rbslip {

// Linearized onset analysis about the conduction profile, original
// normalization (unit height, buoyancy = ra). The temperature perturbation
// of horizontal wavenumber k evolves as
//
//   lambda tau = (dzz - k^2) tau + w[tau],
//   (dzz - k^2)^2 w = ra k^2 tau,   w with the wall rows of `slip`,
//
// with tau = 0 at both walls; the velocity is slaved (no time derivative in
// the momentum balance). Returns the largest real part over the spectrum.
double linear_growth_rate(double k, double ra, SlipLength slip, int nz = 48);

struct Onset {
    double ra_c = 0.0;  // smallest Rayleigh number with a neutral mode
    double k_c = 0.0;   // its horizontal wavenumber
};

// Neutral Rayleigh number at fixed wavenumber: the smallest ra with a
// vanishing growth rate, computed as a generalized eigenvalue (no bisection).
double neutral_rayleigh(double k, SlipLength slip, int nz = 48);

// Neutral curve minimum over k (golden-section on the physical branch).
Onset critical_rayleigh(SlipLength slip, int nz = 48);

}  // namespace rbslip
