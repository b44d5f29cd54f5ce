#include "rbslip/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rbslip/diagnostics.hpp"

namespace rbslip {

void StepperConfig::validate() const {
    if (dt < 0.0 || !std::isfinite(dt)) throw ParamError("fixed dt must be >= 0 and finite");
    if (!(cfl > 0.0) || cfl > 1.0) throw ParamError("cfl must lie in (0, 1]");
    if (dt_max < 0.0) throw ParamError("dt_max must be >= 0");
    if (!(dt_min > 0.0)) throw ParamError("dt_min must be > 0");
}

SimState init_state(const SlabParams& params, GridPtr grid, unsigned long long seed,
                    double amplitude) {
    params.validate();
    if (!grid) throw ParamError("init needs a grid");
    if (!(amplitude >= 0.0) || amplitude > 0.1)
        throw ParamError("perturbation amplitude must lie in [0, 0.1] to keep T in [0, 1]");
    SimState s;
    s.grid = grid;
    s.tau = random_smooth_field(grid, seed, amplitude);
    s.rng_seed = seed;
    return s;
}

Stepper::Stepper(GridPtr grid, StepperConfig cfg)
    : grid_(std::move(grid)), cfg_(cfg), stokes_(grid_, grid_->params().slip) {
    cfg_.validate();
    const Cheb& cheb = grid_->cheb();
    dzmin_.resize(grid_->nlevels());
    for (int j = 0; j < grid_->nlevels(); ++j) {
        double d = 1e300;
        if (j > 0) d = std::min(d, cheb.z(j - 1) - cheb.z(j));
        if (j + 1 < grid_->nlevels()) d = std::min(d, cheb.z(j) - cheb.z(j + 1));
        dzmin_[j] = d;
    }
}

VelocityField Stepper::velocity_of(const ScalarField& tau) const {
    return solve_stokes(tau, stokes_);
}

const VelocityField& Stepper::velocity_for(const SimState& s) {
    if (!(cache_valid_ && cache_step_ == s.step_count && cache_time_ == s.time)) {
        u_ = velocity_of(s.tau);
        cache_step_ = s.step_count;
        cache_time_ = s.time;
        cache_valid_ = true;
    }
    return u_;
}

double Stepper::advective_limit(const VelocityField& u) const {
    const Grid& g = *grid_;
    Eigen::MatrixXcd phys(g.nlevels(), g.nmodes());
    g.to_physical(u.w.coeffs(), phys);
    double limit = 1e300;
    for (int j = 0; j < g.nlevels(); ++j) {
        double wmax = phys.row(j).real().cwiseAbs().maxCoeff();
        if (wmax > 0.0) limit = std::min(limit, dzmin_[j] / wmax);
    }
    const double dy = g.params().length / g.nx();
    for (const ScalarField& v : u.v) {
        g.to_physical(v.coeffs(), phys);
        double vmax = phys.real().cwiseAbs().maxCoeff();
        if (vmax > 0.0) limit = std::min(limit, dy / vmax);
    }
    return limit;
}

// Builds the factorizations of I - c (D^2 - k^2) with Dirichlet wall rows,
// one per distinct k^2. c = dt/2 for trapezoidal steps, dt for the
// implicit-Euler startup.
void Stepper::ensure_factorization(double c) {
    if (c == dt_fact_) return;
    implicit_.clear();
    const Cheb& cheb = grid_->cheb();
    const int n = grid_->nlevels();
    Eigen::MatrixXd base = Eigen::MatrixXd::Identity(n, n) - c * cheb.D2;
    for (int m : grid_->half_modes()) {
        const double k2 = grid_->mode(m).k2;
        if (implicit_.count(k2)) continue;
        Eigen::MatrixXd a = base;
        a.diagonal().array() += c * k2;
        a.row(0).setZero();
        a(0, 0) = 1.0;
        a.row(n - 1).setZero();
        a(n - 1, n - 1) = 1.0;
        implicit_.emplace(k2, Eigen::PartialPivLU<Eigen::MatrixXd>(a));
    }
    dt_fact_ = c;
}

// Explicit tendency: -u.grad tau + w/H (the conduction-gradient source).
// Factors are dealiased before the product, the product after the transform.
ScalarField Stepper::explicit_term(const ScalarField& tau, const VelocityField& u) const {
    const Grid& g = *grid_;
    const Cheb& cheb = g.cheb();
    const int hdim = g.params().hdim;

    auto physical_of = [&](Eigen::MatrixXcd spec) {
        if (cfg_.dealias) g.dealias(spec);
        Eigen::MatrixXcd phys(spec.rows(), spec.cols());
        g.to_physical(spec, phys);
        return Eigen::MatrixXd(phys.real());
    };

    Eigen::MatrixXd prod =
        physical_of(u.w.coeffs()).cwiseProduct(physical_of(cheb.D * tau.coeffs()));
    for (int d = 0; d < hdim; ++d) {
        Eigen::MatrixXcd dytau = tau.coeffs();
        for (int m = 0; m < g.nmodes(); ++m) {
            const Mode& mo = g.mode(m);
            dytau.col(m) *= std::complex<double>(0.0, d == 0 ? mo.kx : mo.ky);
        }
        prod += physical_of(u.v[d].coeffs()).cwiseProduct(physical_of(std::move(dytau)));
    }

    ScalarField out(tau.grid());
    g.to_spectral(prod.cast<std::complex<double>>(), out.coeffs());
    out.coeffs() = -out.coeffs() + u.w.coeffs() / g.params().height;
    if (cfg_.dealias) g.dealias(out.coeffs());
    g.zero_nonretained(out.coeffs());
    return out;
}

void Stepper::advance(SimState& s) {
    if (s.grid != grid_) throw ParamError("state belongs to a different grid");
    const Grid& g = *grid_;
    const Cheb& cheb = g.cheb();
    const double t_before = s.time;

    const VelocityField& u = velocity_for(s);
    if (!u.finite() || !s.tau.finite())
        throw BlowUpError("non-finite fields entering step", t_before);

    // step size
    const double admissible = cfg_.cfl * advective_limit(u);
    double dt;
    if (cfg_.dt > 0.0) {
        dt = cfg_.dt;
        if (dt > admissible)
            throw StepRejected("fixed dt exceeds the advective limit", admissible);
    } else {
        const double cap = cfg_.dt_max > 0.0
                               ? cfg_.dt_max
                               : 0.05 * g.params().height * g.params().height;
        double target = std::min(admissible, cap);
        if (target < cfg_.dt_min)
            throw NumericsError("adaptive step fell below dt_min; flow too fast for grid");
        // power-of-two ladder below the cap; keep the current rung while it
        // fits (and is not overly timid), so factorizations are reused
        if (dt_rung_ > 0.0 && dt_rung_ <= target && dt_rung_ > 0.45 * target) {
            dt = dt_rung_;
        } else {
            dt = cap;
            while (dt > target) dt *= 0.5;
        }
        dt_rung_ = dt;
    }

    ScalarField expl = explicit_term(s.tau, u);

    // right-hand side
    const bool startup = !s.have_prev;
    const double c = startup ? dt : 0.5 * dt;
    ensure_factorization(c);

    Eigen::MatrixXcd rhs;
    if (startup) {
        rhs = s.tau.coeffs() + dt * expl.coeffs();
    } else {
        const double r = dt / s.dt_prev;
        rhs = s.tau.coeffs() + dt * ((1.0 + 0.5 * r) * expl.coeffs() -
                                     (0.5 * r) * s.explicit_prev.coeffs());
        rhs.noalias() += (0.5 * dt) * (cheb.D2 * s.tau.coeffs());
        for (int m = 0; m < g.nmodes(); ++m)
            rhs.col(m) -= (0.5 * dt) * g.mode(m).k2 * s.tau.coeffs().col(m);
    }

    // implicit solve, half spectrum then conjugate mirror
    const int n = g.nlevels();
    ScalarField next(s.grid);
    Eigen::VectorXd re(n), im(n);
    for (int m : g.half_modes()) {
        const Eigen::PartialPivLU<Eigen::MatrixXd>& lu = implicit_.at(g.mode(m).k2);
        rhs(0, m) = 0.0;
        rhs(n - 1, m) = 0.0;
        re = lu.solve(rhs.col(m).real().eval());
        im = lu.solve(rhs.col(m).imag().eval());
        const int mc = g.conj_index(m);
        for (int j = 0; j < n; ++j) {
            next.coeffs()(j, m) = std::complex<double>(re(j), im(j));
            next.coeffs()(j, mc) = std::complex<double>(re(j), -im(j));
        }
    }
    next.coeffs().row(0).setZero();
    next.coeffs().row(n - 1).setZero();
    g.zero_nonretained(next.coeffs());

    if (!next.finite()) throw BlowUpError("time step produced non-finite values", t_before);

    s.explicit_prev = std::move(expl);
    s.dt_prev = dt;
    s.have_prev = true;
    s.tau = std::move(next);
    s.time = t_before + dt;
    s.step_count += 1;
    dt_last_ = dt;
}

RunResult run_until(SimState& s, Stepper& stepper, const RunOptions& opt) {
    if (!(opt.t_end > s.time)) throw ParamError("run_until needs t_end beyond current time");
    RunResult out;
    TimeSeries& ts = out.series;

    // prefix trapezoid of nu_flux for the steadiness drift criterion
    std::vector<double> drift_t, drift_i;
    double prev_nu = 0.0;

    auto record = [&](const VelocityField& u) {
        NusseltReport rep = nusselt_snapshot(s.tau, u);
        ts.time.push_back(s.time);
        ts.nu_flux.push_back(rep.flux);
        ts.nu_dissipation.push_back(rep.dissipation);
        ts.nu_boundary.push_back(rep.boundary);
        ts.eps_mp.push_back(maximum_principle_overshoot(s.tau));
        ts.dt.push_back(stepper.last_dt());
        if (drift_t.empty()) {
            drift_t.push_back(s.time);
            drift_i.push_back(0.0);
        } else {
            double dt = s.time - drift_t.back();
            drift_i.push_back(drift_i.back() + 0.5 * dt * (prev_nu + rep.flux));
            drift_t.push_back(s.time);
        }
        prev_nu = rep.flux;
    };

    auto window_mean = [&](double a, double b) {
        auto integral_at = [&](double t) {
            auto it = std::lower_bound(drift_t.begin(), drift_t.end(), t);
            size_t i = it - drift_t.begin();
            if (i == 0) return drift_i.front();
            if (i >= drift_t.size()) return drift_i.back();
            double f = (t - drift_t[i - 1]) / (drift_t[i] - drift_t[i - 1]);
            return drift_i[i - 1] + f * (drift_i[i] - drift_i[i - 1]);
        };
        return (integral_at(b) - integral_at(a)) / (b - a);
    };

    const bool use_drift = opt.steady_tol > 0.0 && opt.steady_window > 0.0;
    const double t0 = s.time;

    // the final adaptive step may overshoot t_end by one rung; time-window
    // averages clip on time, so this is harmless
    record(stepper.velocity_for(s));
    while (s.time < opt.t_end) {
        stepper.advance(s);
        record(stepper.velocity_for(s));
        if (use_drift) {
            const double W = opt.steady_window;
            double earliest = std::max(t0 + 2.0 * W, opt.min_time);
            // both windows must end inside recorded history and span enough
            // samples for their means to carry information
            auto first_in = std::lower_bound(drift_t.begin(), drift_t.end(), s.time - 2.0 * W);
            if (s.time >= earliest && drift_t.end() - first_in >= 4) {
                double recent = window_mean(s.time - W, s.time);
                double before = window_mean(s.time - 2.0 * W, s.time - W);
                if (std::abs(recent - before) <=
                    opt.steady_tol * std::max(std::abs(recent), 1e-300)) {
                    out.reached_steady = true;
                    break;
                }
            }
        }
    }
    return out;
}

namespace {

constexpr char kMagic[8] = {'R', 'B', 'S', 'L', 'I', 'P', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
void get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
}

void put_matrix(std::ostream& os, const Eigen::MatrixXcd& m) {
    std::int64_t rows = m.rows(), cols = m.cols();
    put(os, rows);
    put(os, cols);
    os.write(reinterpret_cast<const char*>(m.data()),
             sizeof(std::complex<double>) * m.size());
}

Eigen::MatrixXcd get_matrix(std::istream& is) {
    std::int64_t rows = 0, cols = 0;
    get(is, rows);
    get(is, cols);
    if (rows < 0 || cols < 0 || rows * cols > (1ll << 32))
        throw IoError("checkpoint matrix header corrupt");
    Eigen::MatrixXcd m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()), sizeof(std::complex<double>) * m.size());
    return m;
}

}  // namespace

void save_checkpoint(const SimState& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof kMagic);
    put(os, kVersion);
    const SlabParams& p = s.grid->params();
    put(os, p.height);
    put(os, p.length);
    put(os, p.buoyancy);
    std::uint8_t free_slip = p.slip.is_free() ? 1 : 0;
    double sigma = p.slip.is_free() ? 0.0 : p.slip.value();
    put(os, free_slip);
    put(os, sigma);
    put(os, std::int32_t(p.hdim));
    put(os, std::int32_t(s.grid->nx()));
    put(os, std::int32_t(s.grid->nz()));
    put(os, std::uint64_t(s.rng_seed));
    put(os, std::int64_t(s.step_count));
    put(os, s.time);
    put(os, s.dt_prev);
    put(os, std::uint8_t(s.have_prev ? 1 : 0));
    put_matrix(os, s.tau.coeffs());
    if (s.have_prev) put_matrix(os, s.explicit_prev.coeffs());
    if (!os) throw IoError("short write on checkpoint: " + path);
}

SimState load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("not a checkpoint file: " + path);
    std::uint32_t version = 0;
    get(is, version);
    if (version != kVersion) throw IoError("unsupported checkpoint version");

    SlabParams p;
    get(is, p.height);
    get(is, p.length);
    get(is, p.buoyancy);
    std::uint8_t free_slip = 0;
    double sigma = 0.0;
    get(is, free_slip);
    get(is, sigma);
    std::int32_t hdim = 0, nx = 0, nz = 0;
    get(is, hdim);
    get(is, nx);
    get(is, nz);
    p.hdim = hdim;
    p.slip = free_slip ? SlipLength::free_slip() : SlipLength::finite(sigma);

    SimState s;
    std::uint64_t seed = 0;
    std::int64_t steps = 0;
    std::uint8_t have_prev = 0;
    get(is, seed);
    get(is, steps);
    get(is, s.time);
    get(is, s.dt_prev);
    get(is, have_prev);
    s.rng_seed = seed;
    s.step_count = steps;
    s.have_prev = have_prev != 0;

    s.grid = Grid::create(p, nx, nz);
    s.tau = ScalarField(s.grid);
    Eigen::MatrixXcd m = get_matrix(is);
    if (m.rows() != s.tau.coeffs().rows() || m.cols() != s.tau.coeffs().cols())
        throw IoError("checkpoint resolution mismatch");
    s.tau.coeffs() = m;
    if (s.have_prev) {
        s.explicit_prev = ScalarField(s.grid);
        s.explicit_prev.coeffs() = get_matrix(is);
    }
    if (!is) throw IoError("short read on checkpoint: " + path);
    return s;
}

}  // namespace rbslip
