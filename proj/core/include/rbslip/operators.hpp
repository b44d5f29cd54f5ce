#pragma once

#include <functional>

#include "rbslip/field.hpp"

namespace rbslip {

enum class Deriv { dz, dz2, lap_y, inv_lap_y };

// Spectral derivatives: dz/dz2 via the collocation matrices, lap_y by the
// mode-wise symbol -|k|^2. inv_lap_y inverts lap_y on the mean-free part and
// maps the k = 0 mode to zero (documented convention; inv_lap_y(lap_y(f))
// reproduces f minus its horizontal mean).
ScalarField apply_derivative(const ScalarField& f, Deriv which);

// Horizontal gradient; one component per horizontal direction.
std::vector<ScalarField> grad_y(const ScalarField& f);

// Multiply each mode by a real function of |k|. Real symbols preserve the
// Hermitian pairing.
ScalarField apply_symbol(const ScalarField& f, const std::function<double(double)>& symbol);

}  // namespace rbslip
