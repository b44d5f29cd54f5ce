#include "rbslip/params.hpp"

namespace rbslip {

void SlabParams::validate() const {
    if (!(height > 0.0) || !std::isfinite(height))
        throw ParamError("height must be positive");
    if (!(length > 0.0) || !std::isfinite(length))
        throw ParamError("length must be positive");
    if (!(buoyancy >= 0.0) || !std::isfinite(buoyancy))
        throw ParamError("buoyancy must be >= 0");
    if (hdim != 1 && hdim != 2)
        throw ParamError("hdim must be 1 or 2");
}

SlabParams original_params(double ra, double aspect, SlipLength slip_orig, int hdim) {
    if (!(ra >= 0.0) || !std::isfinite(ra)) throw ParamError("ra must be >= 0");
    if (!(aspect > 0.0)) throw ParamError("aspect must be positive");
    SlabParams p;
    p.height = 1.0;
    p.length = aspect;
    p.buoyancy = ra;
    p.slip = slip_orig;
    p.hdim = hdim;
    p.validate();
    return p;
}

SlabParams rescale(double ra, double aspect, SlipLength slip_orig, int hdim) {
    if (!(ra > 0.0) || !std::isfinite(ra)) throw ParamError("ra must be positive");
    if (!(aspect > 0.0)) throw ParamError("aspect must be positive");
    const double h = std::cbrt(ra);
    SlabParams p;
    p.height = h;
    p.length = h * aspect;
    p.buoyancy = 1.0;
    p.slip = slip_orig.is_free() ? SlipLength::free_slip()
                                 : SlipLength::finite(h * slip_orig.value());
    p.hdim = hdim;
    p.validate();
    return p;
}

double nusselt_convert(double nu_rescaled, double height) {
    if (!(nu_rescaled > 0.0)) throw ParamError("nu_rescaled must be positive");
    if (!(height > 0.0)) throw ParamError("height must be positive");
    return height * nu_rescaled;
}

}  // namespace rbslip
