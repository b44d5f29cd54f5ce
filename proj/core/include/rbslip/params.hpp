#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rbslip {

// Error taxonomy. Everything thrown by this library derives from Error so
// callers (and the CLI exit-code map) can tell configuration mistakes from
// runtime failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParamError : Error {        // bad user input / config
    using Error::Error;
};
struct NumericsError : Error {     // ill-conditioned solve, non-convergence
    using Error::Error;
};
struct BlowUpError : Error {       // NaN/Inf detected during time stepping
    double last_valid_time = 0.0;
    BlowUpError(const std::string& msg, double t) : Error(msg), last_valid_time(t) {}
};
struct IoError : Error {           // file format / serialization problems
    using Error::Error;
};

// Slip length of the Navier wall law v = +/- sigma dz(v). sigma = 0 is
// no-slip; the free-slip wall (dz v = 0) is an explicit state, never a
// large float stand-in.
class SlipLength {
  public:
    SlipLength() = default;
    static SlipLength noslip() { return SlipLength(0.0, false); }
    static SlipLength finite(double sigma) {
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw ParamError("slip length must be finite and >= 0");
        return SlipLength(sigma, false);
    }
    static SlipLength free_slip() { return SlipLength(0.0, true); }

    bool is_free() const { return free_; }
    bool is_noslip() const { return !free_ && sigma_ == 0.0; }
    // Finite value; throws for the free-slip state.
    double value() const {
        if (free_) throw ParamError("free-slip wall has no finite slip length");
        return sigma_;
    }
    // Value used in monotonicity orderings and CSV output: inf for free slip.
    double value_or_inf() const {
        return free_ ? std::numeric_limits<double>::infinity() : sigma_;
    }
    bool operator==(const SlipLength& o) const {
        return free_ == o.free_ && (free_ || sigma_ == o.sigma_);
    }

  private:
    SlipLength(double s, bool f) : sigma_(s), free_(f) {}
    double sigma_ = 0.0;
    bool free_ = false;
};

// Geometry and physics of one slab problem.
//
//   -Delta u + grad p = buoyancy * T * e_z,  div u = 0
//   dt T + u.grad T = Delta T
//
// on [0,length]^hdim x [0,height], horizontally periodic, T = 1 at z = 0,
// T = 0 at z = height, Navier-slip walls. Two normalizations are in use:
//   original: height = 1, buoyancy = Ra
//   rescaled: height = Ra^(1/3), length = Ra^(1/3)*aspect, buoyancy = 1,
//             slip = Ra^(1/3)*slip_orig
// Both describe the same flow; see rescale() and nusselt_convert().
struct SlabParams {
    double height = 1.0;     // slab height H
    double length = 2.0;     // horizontal period L
    double buoyancy = 0.0;   // coefficient R multiplying T in the momentum balance
    SlipLength slip;         // wall slip length (same on both walls)
    int hdim = 1;            // number of horizontal directions (1 -> 2D flow)

    void validate() const;

    // Rayleigh number regardless of normalization: R * H^3.
    double rayleigh() const { return buoyancy * height * height * height; }
};

SlabParams original_params(double ra, double aspect, SlipLength slip_orig, int hdim = 1);

// Ra^(1/3) rescaling: unit buoyancy, tall slab. slip_orig is the slip length
// in the original (height 1) normalization.
SlabParams rescale(double ra, double aspect, SlipLength slip_orig, int hdim = 1);

// Slip length conversion original -> rescaled units.
inline double slip_rescaled(double ra, double slip_orig) {
    return std::cbrt(ra) * slip_orig;
}

// A Nusselt number measured in the rescaled normalization (conduction value
// 1/height) converted to the original normalization (conduction value 1).
double nusselt_convert(double nu_rescaled, double height);

}  // namespace rbslip
