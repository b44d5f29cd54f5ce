#include "rbslip/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace rbslip {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

// the FFTW planner has global state; plan execution is re-entrant
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Grid::Fft {
    fftw_plan fwd = nullptr;   // physical -> spectral (FFTW_FORWARD, e^{-iky})
    fftw_plan bwd = nullptr;   // spectral -> physical (FFTW_BACKWARD, e^{+iky})
    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

std::shared_ptr<const Grid> Grid::create(const SlabParams& params, int nx, int nz) {
    params.validate();
    if (nx < 4 || nx % 2 != 0) throw ParamError("nx must be even and >= 4");
    if (nz < 4) throw ParamError("nz must be >= 4");

    auto g = std::shared_ptr<Grid>(new Grid());
    g->params_ = params;
    g->nx_ = nx;
    g->nz_ = nz;
    g->cheb_ = Cheb(nz, params.height);

    const int hdim = params.hdim;
    const int ny = (hdim == 2) ? nx : 1;
    g->nmodes_ = nx * ny;
    g->modes_.resize(g->nmodes_);
    g->conj_index_.resize(g->nmodes_);

    const double dk = kTwoPi / params.length;
    const int cut = nx / 3;
    auto signed_index = [nx](int i) { return (i <= nx / 2) ? i : i - nx; };
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            Mode mo;
            mo.sx = signed_index(ix);
            mo.sy = (hdim == 2) ? signed_index(iy) : 0;
            mo.kx = dk * mo.sx;
            mo.ky = dk * mo.sy;
            mo.k2 = mo.kx * mo.kx + mo.ky * mo.ky;
            mo.kabs = std::sqrt(mo.k2);
            mo.retained = (std::abs(mo.sx) != nx / 2) && (std::abs(mo.sy) != nx / 2 || hdim == 1);
            mo.dealias_keep = mo.retained && std::abs(mo.sx) <= cut && std::abs(mo.sy) <= cut;
            g->modes_[ix * ny + iy] = mo;
        }
    }
    auto wrap = [nx](int s) { return (s % nx + nx) % nx; };
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy)
            g->conj_index_[ix * ny + iy] = wrap(-signed_index(ix)) * ny +
                                           ((hdim == 2) ? wrap(-signed_index(iy)) : 0);
    // Representatives of each +/-k pair: sx > 0, or sx == 0 and sy >= 0.
    for (int m = 0; m < g->nmodes_; ++m) {
        const Mode& mo = g->modes_[m];
        if (!mo.retained) continue;
        if (mo.sx > 0 || (mo.sx == 0 && mo.sy >= 0)) g->half_modes_.push_back(m);
    }

    g->fft_ = std::make_unique<Fft>();
    const int rank = hdim;
    int n[2] = {nx, nx};
    const int howmany = nz + 1;
    const int stride = nz + 1;  // column-major (nz+1) x nmodes: mode step = nz+1
    std::vector<std::complex<double>> buf(static_cast<size_t>(g->nmodes_) * (nz + 1));
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        g->fft_->fwd = fftw_plan_many_dft(rank, n, howmany, p, nullptr, stride, 1, p, nullptr,
                                          stride, 1, FFTW_FORWARD, flags);
        g->fft_->bwd = fftw_plan_many_dft(rank, n, howmany, p, nullptr, stride, 1, p, nullptr,
                                          stride, 1, FFTW_BACKWARD, flags);
    }
    if (!g->fft_->fwd || !g->fft_->bwd) throw NumericsError("fftw plan creation failed");
    return g;
}

Grid::~Grid() = default;

void Grid::to_physical(const Eigen::MatrixXcd& spec, Eigen::MatrixXcd& phys) const {
    phys = spec;
    auto* p = reinterpret_cast<fftw_complex*>(phys.data());
    fftw_execute_dft(fft_->bwd, p, p);
}

void Grid::to_spectral(const Eigen::MatrixXcd& phys, Eigen::MatrixXcd& spec) const {
    spec = phys;
    auto* p = reinterpret_cast<fftw_complex*>(spec.data());
    fftw_execute_dft(fft_->fwd, p, p);
    spec *= 1.0 / nmodes_;
}

void Grid::dealias(Eigen::MatrixXcd& spec) const {
    for (int m = 0; m < nmodes_; ++m)
        if (!modes_[m].dealias_keep) spec.col(m).setZero();
}

void Grid::zero_nonretained(Eigen::MatrixXcd& spec) const {
    for (int m = 0; m < nmodes_; ++m)
        if (!modes_[m].retained) spec.col(m).setZero();
}

}  // namespace rbslip
