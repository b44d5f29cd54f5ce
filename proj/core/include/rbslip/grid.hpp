#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rbslip/chebyshev.hpp"
#include "rbslip/params.hpp"

namespace rbslip {

// One horizontal Fourier mode. Signed integer indices s in FFT storage order;
// wavevector components are 2*pi*s/L.
struct Mode {
    int sx = 0, sy = 0;      // signed mode indices
    double kx = 0.0, ky = 0.0;
    double kabs = 0.0;       // |k|
    double k2 = 0.0;         // |k|^2
    bool retained = true;    // false for Nyquist lines (forced to zero)
    bool dealias_keep = true;  // true if |s| <= nx/3 in every direction
};

// Discretization of one slab: Fourier in y (period L, nx modes per direction,
// complex full-spectrum storage with Hermitian symmetry as an invariant),
// Chebyshev-Gauss-Lobatto collocation in z (nz+1 nodes, descending).
//
// Spectral convention: f(y, z_j) = sum_k fhat(k, z_j) e^{i k.y}, so the
// forward transform divides by the point count. Coefficient layout is a
// (nz+1) x nmodes column-major matrix: column m holds the vertical profile of
// mode m, mode order is FFT order (flat index m = sx_idx for hdim 1,
// m = sx_idx*nx + sy_idx for hdim 2).
class Grid {
  public:
    static std::shared_ptr<const Grid> create(const SlabParams& params, int nx, int nz);
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const SlabParams& params() const { return params_; }
    int nx() const { return nx_; }
    int nz() const { return nz_; }
    int nmodes() const { return nmodes_; }     // = number of horizontal points
    int nlevels() const { return nz_ + 1; }
    const Cheb& cheb() const { return cheb_; }
    const std::vector<Mode>& modes() const { return modes_; }
    const Mode& mode(int m) const { return modes_[m]; }
    int conj_index(int m) const { return conj_index_[m]; }
    // Modes solved explicitly in per-mode loops; the rest follow by conjugation.
    const std::vector<int>& half_modes() const { return half_modes_; }
    int mean_mode() const { return 0; }        // flat index of k = 0

    // Physical collocation points in one horizontal direction.
    double ypoint(int i) const { return params_.length * i / nx_; }

    // In-place-safe transforms between coefficient and nodal value matrices,
    // both shaped (nz+1) x nmodes. Physical values of a Hermitian field have
    // negligible imaginary part.
    void to_physical(const Eigen::MatrixXcd& spec, Eigen::MatrixXcd& phys) const;
    void to_spectral(const Eigen::MatrixXcd& phys, Eigen::MatrixXcd& spec) const;

    // Zero every mode with |s| > nx/3 in some direction (2/3 rule), and the
    // never-retained Nyquist lines.
    void dealias(Eigen::MatrixXcd& spec) const;
    void zero_nonretained(Eigen::MatrixXcd& spec) const;

  private:
    Grid() = default;
    SlabParams params_;
    int nx_ = 0, nz_ = 0, nmodes_ = 0;
    Cheb cheb_;
    std::vector<Mode> modes_;
    std::vector<int> conj_index_;
    std::vector<int> half_modes_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace rbslip
