#pragma once

#include "rbslip/field.hpp"
#include "rbslip/stokes.hpp"

namespace rbslip {

// Additive split of the wall-law correction. With w_slip the Navier-slip
// velocity and w_noslip the no-slip velocity of the same buoyancy source,
// the difference solves the homogeneous fourth-order problem per mode with
// Robin data proportional to the wall curvature of w_noslip. Splitting the
// no-slip velocity into the lower-half-source part v_lower and the remainder
// splits that data, giving
//
//   w_slip - w_noslip = h_sigma + g_sigma
//
// where h_sigma carries the Robin data sigma * dzz v_lower(wall) and g_sigma
// the data sigma * dzz (w_noslip - v_lower)(wall), both with zero wall values
// (tangential rows signed - at the bottom, + at the top).
struct Decomposition {
    ScalarField h_sigma;
    ScalarField g_sigma;
    double residual = 0.0;  // ||w_slip - w_noslip - h - g|| / ||w_slip - w_noslip||

    ScalarField w_slip;     // the two velocities and the half-source solve,
    ScalarField w_noslip;   // kept for cross-checks
    ScalarField v_lower;
};

Decomposition decomposition_suite(const ScalarField& theta, const SlabParams& params);

}  // namespace rbslip
