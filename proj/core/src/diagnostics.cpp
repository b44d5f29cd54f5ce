#include "rbslip/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace rbslip {

namespace {

void require_same_grid(const ScalarField& a, const VelocityField& vel) {
    if (!a.grid() || a.grid() != vel.w.grid())
        throw ParamError("diagnostics need fields on one shared grid");
}

}  // namespace

Eigen::VectorXd wtheta_profile(const ScalarField& tau, const VelocityField& vel) {
    require_same_grid(tau, vel);
    // <w theta> per level: sum over all retained modes of Re(what conj(tauhat));
    // the mean mode carries no w, so subtracting the horizontal mean of tau
    // changes nothing.
    return (vel.w.coeffs().array() * tau.coeffs().array().conjugate())
        .real()
        .rowwise()
        .sum();
}

NusseltReport nusselt_snapshot(const ScalarField& tau, const VelocityField& vel) {
    require_same_grid(tau, vel);
    const Grid& g = *tau.grid();
    const Cheb& cheb = g.cheb();
    const double H = g.params().height;

    NusseltReport rep;
    rep.conduction = 1.0 / H;

    Eigen::VectorXd wt = wtheta_profile(tau, vel);
    Eigen::VectorXd dz_mean = (cheb.D * tau.coeffs().col(g.mean_mode()).real()).eval();

    rep.flux = (cheb.w.dot(wt) + 1.0) / H;
    rep.boundary = 1.0 / H - dz_mean(cheb.bottom());
    rep.flux_profile = wt + Eigen::VectorXd::Constant(wt.size(), 1.0 / H) - dz_mean;

    // int <|grad T|^2> dz with T = conduction + tau; the cross term integrates
    // to zero because tau vanishes at both walls.
    Eigen::MatrixXcd dz_tau = cheb.D * tau.coeffs();
    double diss = 0.0;
    for (int m = 0; m < g.nmodes(); ++m) {
        double k2 = g.mode(m).k2;
        diss += cheb.w.dot(
            (dz_tau.col(m).cwiseAbs2() + k2 * tau.coeffs().col(m).cwiseAbs2()).eval());
    }
    rep.dissipation = diss + 1.0 / H;
    return rep;
}

double maximum_principle_overshoot(const ScalarField& tau, int refine) {
    if (refine < 1) throw ParamError("refinement factor must be >= 1");
    const Grid& g = *tau.grid();
    const Cheb& cheb = g.cheb();
    const double H = g.params().height;

    // refined vertical nodes (they include both walls)
    Eigen::MatrixXd interp;
    Eigen::VectorXd zf;
    if (refine > 1) {
        Cheb fine(refine * cheb.n, H);
        interp = cheb.interp_matrix(fine.z);
        zf = fine.z;
    } else {
        zf = cheb.z;
    }

    const int nshift = refine;  // half-cell phase shifts per direction
    const int hdim = g.params().hdim;
    double tmax = -1e300, tmin = 1e300;
    Eigen::MatrixXcd shifted(g.nlevels(), g.nmodes()), phys(g.nlevels(), g.nmodes());
    for (int sx = 0; sx < nshift; ++sx) {
        for (int sy = 0; sy < (hdim == 2 ? nshift : 1); ++sy) {
            const double fx = g.params().length * sx / (g.nx() * nshift);
            const double fy = g.params().length * sy / (g.nx() * nshift);
            for (int m = 0; m < g.nmodes(); ++m) {
                const Mode& mo = g.mode(m);
                std::complex<double> ph =
                    std::exp(std::complex<double>(0.0, mo.kx * fx + mo.ky * fy));
                shifted.col(m) = ph * tau.coeffs().col(m);
            }
            g.to_physical(shifted, phys);
            Eigen::MatrixXd vals = refine > 1 ? (interp * phys.real()).eval() : phys.real().eval();
            for (int j = 0; j < vals.rows(); ++j) {
                double cond = 1.0 - zf(j) / H;
                tmax = std::max(tmax, cond + vals.row(j).maxCoeff());
                tmin = std::min(tmin, cond + vals.row(j).minCoeff());
            }
        }
    }
    return std::max({0.0, tmax - 1.0, -tmin});
}

EnergyCheck energy_identity_residuals(const ScalarField& theta, const VelocityField& vel) {
    require_same_grid(theta, vel);
    const Grid& g = *theta.grid();
    const Cheb& cheb = g.cheb();
    const SlabParams& p = g.params();
    const double sig = p.slip.is_free() ? 0.0 : p.slip.value();

    Eigen::MatrixXcd fp = cheb.D * vel.w.coeffs();
    Eigen::MatrixXcd fpp = cheb.D * fp;

    double lhs_a = 0.0, rhs_a = 0.0, lhs_b = 0.0, rhs_b = 0.0;
    double lhs_max = 0.0, rhs_min = 0.0, bshare = 0.0;
    for (int m : g.half_modes()) {
        const double k2 = g.mode(m).k2;
        if (k2 == 0.0) continue;
        auto f = vel.w.coeffs().col(m);
        double core = cheb.w.dot((fpp.col(m).cwiseAbs2() + 2.0 * k2 * fp.col(m).cwiseAbs2() +
                                  k2 * k2 * f.cwiseAbs2())
                                     .eval());
        double bnd = sig * (std::norm(fpp(cheb.bottom(), m)) + std::norm(fpp(cheb.top(), m)));
        double rhs = p.buoyancy * k2 *
                     cheb.w.dot((theta.coeffs().col(m).conjugate().array() * f.array())
                                    .real()
                                    .matrix()
                                    .eval());
        // the conjugate mode contributes the same amount; factors of two
        // cancel in every ratio below
        double lhs = core + bnd;
        lhs_a += lhs;
        rhs_a += rhs;
        lhs_b += lhs / k2;
        rhs_b += rhs / k2;
        lhs_max = std::max(lhs_max, lhs);
        rhs_min = std::min(rhs_min, rhs);
        if (lhs > 0.0) bshare = std::max(bshare, bnd / lhs);
    }

    EnergyCheck out;
    const double tiny = 1e-300;
    out.residual_a = std::abs(lhs_a - rhs_a) / (std::abs(lhs_a) + std::abs(rhs_a) + tiny);
    out.residual_b = std::abs(lhs_b - rhs_b) / (std::abs(lhs_b) + std::abs(rhs_b) + tiny);
    out.rhs_min_rel = lhs_max > 0.0 ? rhs_min / lhs_max : 0.0;
    out.boundary_share = bshare;
    return out;
}

TimeAverager::TimeAverager(double t_start, double t_end, int batches)
    : t0_(t_start), t1_(t_end), nb_(batches) {
    if (!(t_end > t_start)) throw ParamError("averaging window must have positive length");
    if (batches < 1) throw ParamError("need at least one batch");
}

void TimeAverager::push(const std::string& name, double t, double value) {
    Eigen::VectorXd v(1);
    v(0) = value;
    push_profile(name, t, v);
}

void TimeAverager::push_profile(const std::string& name, double t, const Eigen::VectorXd& v) {
    Stream& s = streams_[name];
    if (!s.started) {
        s.integral = Eigen::MatrixXd::Zero(v.size(), nb_);
        s.covered = Eigen::VectorXd::Zero(nb_);
        s.prev_t = t;
        s.prev_v = v;
        s.started = true;
        return;
    }
    if (v.size() != s.prev_v.size()) throw ParamError("stream dimension changed: " + name);
    if (t < s.prev_t) throw ParamError("samples must arrive in time order: " + name);
    accumulate(s, t, v);
}

void TimeAverager::accumulate(Stream& s, double t, const Eigen::VectorXd& v) {
    const double lo = std::max(s.prev_t, t0_);
    const double hi = std::min(t, t1_);
    if (hi > lo && t > s.prev_t) {
        const double dt_seg = t - s.prev_t;
        const double bw = (t1_ - t0_) / nb_;
        int b0 = std::clamp(int((lo - t0_) / bw), 0, nb_ - 1);
        int b1 = std::clamp(int((hi - t0_) / bw), 0, nb_ - 1);
        for (int b = b0; b <= b1; ++b) {
            double a = std::max(lo, t0_ + b * bw);
            double c = std::min(hi, t0_ + (b + 1) * bw);
            if (c <= a) continue;
            // linear interpolation at the cut points keeps trapezoid exactness
            Eigen::VectorXd va = s.prev_v + (v - s.prev_v) * ((a - s.prev_t) / dt_seg);
            Eigen::VectorXd vc = s.prev_v + (v - s.prev_v) * ((c - s.prev_t) / dt_seg);
            s.integral.col(b) += 0.5 * (c - a) * (va + vc);
            s.covered(b) += c - a;
        }
    }
    s.prev_t = t;
    s.prev_v = v;
}

const TimeAverager::Stream& TimeAverager::stream(const std::string& name) const {
    auto it = streams_.find(name);
    if (it == streams_.end() || !it->second.started)
        throw ParamError("no samples recorded for stream: " + name);
    return it->second;
}

TimeAverager::Stat TimeAverager::scalar(const std::string& name) const {
    const Stream& s = stream(name);
    const double bw = (t1_ - t0_) / nb_;
    Stat st;
    std::vector<double> means;
    double tot = 0.0, cov = 0.0;
    for (int b = 0; b < nb_; ++b) {
        tot += s.integral(0, b);
        cov += s.covered(b);
        if (s.covered(b) >= 0.5 * bw) means.push_back(s.integral(0, b) / s.covered(b));
    }
    if (cov <= 0.0) throw ParamError("stream covers none of the window: " + name);
    st.mean = tot / cov;
    st.batch_means = Eigen::Map<Eigen::VectorXd>(means.data(), means.size());
    if (means.size() >= 2) {
        double m = st.batch_means.mean();
        double var = (st.batch_means.array() - m).square().sum() / (means.size() - 1);
        st.se = std::sqrt(var / means.size());
    }
    return st;
}

Eigen::VectorXd TimeAverager::profile_mean(const std::string& name) const {
    const Stream& s = stream(name);
    double cov = s.covered.sum();
    if (cov <= 0.0) throw ParamError("stream covers none of the window: " + name);
    return s.integral.rowwise().sum() / cov;
}

Eigen::MatrixXd TimeAverager::profile_batches(const std::string& name) const {
    const Stream& s = stream(name);
    const double bw = (t1_ - t0_) / nb_;
    std::vector<int> keep;
    for (int b = 0; b < nb_; ++b)
        if (s.covered(b) >= 0.5 * bw) keep.push_back(b);
    Eigen::MatrixXd out(s.integral.rows(), keep.size());
    for (size_t i = 0; i < keep.size(); ++i)
        out.col(i) = s.integral.col(keep[i]) / s.covered(keep[i]);
    return out;
}

Localization localization_check(const TimeAverager& avg, const Cheb& cheb, double delta) {
    if (!(delta > 0.0) || !(delta < cheb.height))
        throw ParamError("localization depth must lie inside (0, height)");

    Localization loc;
    loc.delta = delta;

    TimeAverager::Stat nu = avg.scalar(kStreamNuFlux);
    Eigen::VectorXd profile = avg.profile_mean(kStreamWTheta);
    loc.lhs = nu.mean;
    loc.rhs = (cheb.integrate_below(profile, delta) + 1.0) / delta;
    loc.margin = loc.rhs - loc.lhs;

    // batchwise margins give the statistical tolerance
    Eigen::MatrixXd batches = avg.profile_batches(kStreamWTheta);
    const int nb = std::min<int>(batches.cols(), nu.batch_means.size());
    if (nb >= 2) {
        Eigen::VectorXd margins(nb);
        for (int b = 0; b < nb; ++b)
            margins(b) = (cheb.integrate_below(batches.col(b).eval(), delta) + 1.0) / delta -
                         nu.batch_means(b);
        double m = margins.mean();
        double var = (margins.array() - m).square().sum() / (nb - 1);
        loc.tolerance = 3.0 * std::sqrt(var / nb);
    }
    loc.ok = loc.margin >= -loc.tolerance;
    return loc;
}

}  // namespace rbslip
