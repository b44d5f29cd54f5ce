#pragma once

// Independent onset oracle: RK4 shooting for the linearized convection
// problem at unit height,
//
//   (d2 - k^2)^2 w = ra k^2 theta,  (d2 - k^2) theta = -w,
//
// w = 0, tangential wall law, theta = 0 at z = 0 and z = 1. Three basis
// solutions span the admissible initial conditions at the bottom wall; the
// neutral Rayleigh number is the first zero of the 3x3 determinant of top
// boundary values. Shares no code with the library's eigensolver.

#include <array>
#include <cmath>
#include <stdexcept>

namespace shooting {

struct Wall {
    double sigma = 0.0;
    bool free_slip = false;
};

using State = std::array<double, 6>;  // w, w', w'', w''', theta, theta'

inline double top_determinant(double k, double ra, const Wall& wall, int nsteps = 1600) {
    const double k2 = k * k;
    auto rhs = [&](const State& y) {
        return State{y[1],
                     y[2],
                     y[3],
                     2.0 * k2 * y[2] - k2 * k2 * y[0] + ra * k2 * y[4],
                     y[5],
                     k2 * y[4] - y[0]};
    };
    auto integrate = [&](State y) {
        const double h = 1.0 / nsteps;
        for (int i = 0; i < nsteps; ++i) {
            State k1 = rhs(y), y2;
            for (int j = 0; j < 6; ++j) y2[j] = y[j] + 0.5 * h * k1[j];
            State k2v = rhs(y2);
            for (int j = 0; j < 6; ++j) y2[j] = y[j] + 0.5 * h * k2v[j];
            State k3 = rhs(y2);
            for (int j = 0; j < 6; ++j) y2[j] = y[j] + h * k3[j];
            State k4 = rhs(y2);
            for (int j = 0; j < 6; ++j)
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2v[j] + 2.0 * k3[j] + k4[j]);
        }
        return y;
    };

    // Admissible bottom data: w(0) = 0, theta(0) = 0 and the tangential row.
    std::array<State, 3> basis{};
    if (wall.free_slip) {
        basis[0][1] = 1.0;  // w'(0) free, w''(0) = 0
    } else {
        basis[0][2] = 1.0;  // w''(0) free, w'(0) = sigma w''(0)
        basis[0][1] = wall.sigma;
    }
    basis[1][3] = 1.0;  // w'''(0)
    basis[2][5] = 1.0;  // theta'(0)

    std::array<std::array<double, 3>, 3> m{};
    for (int c = 0; c < 3; ++c) {
        State y = integrate(basis[c]);
        m[0][c] = y[0];
        m[1][c] = wall.free_slip ? y[2] : y[1] + wall.sigma * y[2];
        m[2][c] = y[4];
        double scale = std::max({std::abs(m[0][c]), std::abs(m[1][c]), std::abs(m[2][c])});
        for (int r = 0; r < 3; ++r) m[r][c] /= scale;
    }
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline double neutral_ra(double k, const Wall& wall) {
    double lo = 200.0;
    double dlo = top_determinant(k, lo, wall);
    double hi = 0.0;
    for (double ra = lo * 1.12; ra < 2.0e5; ra *= 1.12) {
        double d = top_determinant(k, ra, wall);
        if (d == 0.0) return ra;
        if ((d > 0) != (dlo > 0)) {
            hi = ra;
            break;
        }
        lo = ra;
        dlo = d;
    }
    if (hi == 0.0) throw std::runtime_error("no neutral crossing below ra = 2e5");
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        double d = top_determinant(k, mid, wall);
        if (d == 0.0) return mid;
        if ((d > 0) == (dlo > 0)) {
            lo = mid;
            dlo = d;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Onset {
    double ra_c, k_c;
};

inline Onset critical(const Wall& wall) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1.2, b = 5.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = neutral_ra(x1, wall), f2 = neutral_ra(x2, wall);
    while (b - a > 2e-5) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = neutral_ra(x1, wall);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = neutral_ra(x2, wall);
        }
    }
    double k = 0.5 * (a + b);
    return {neutral_ra(k, wall), k};
}

}  // namespace shooting
