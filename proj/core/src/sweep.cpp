#include "rbslip/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "rbslip/stepper.hpp"
#include "rbslip/stokes.hpp"

namespace rbslip {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- regimes --

RegimeInfo regime_classify(double sigma_rescaled, double height) {
    if (!(height >= 1.0)) throw ParamError("regime_classify needs height >= 1");
    if (std::isnan(sigma_rescaled) || sigma_rescaled < 0.0)
        throw ParamError("regime_classify needs sigma_rescaled >= 0");
    if (sigma_rescaled < 1.0) return {Regime::NoSlipLike, 1.0 / 3.0, "ra"};
    if (sigma_rescaled < std::sqrt(height)) return {Regime::Intermediate, 0.5, "sigma*ra"};
    return {Regime::FreeSlipLike, 5.0 / 12.0, "ra"};
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::NoSlipLike: return "NoSlipLike";
        case Regime::Intermediate: return "Intermediate";
        case Regime::FreeSlipLike: return "FreeSlipLike";
    }
    throw ParamError("bad regime value");
}

Regime regime_from_name(const std::string& name) {
    if (name == "NoSlipLike") return Regime::NoSlipLike;
    if (name == "Intermediate") return Regime::Intermediate;
    if (name == "FreeSlipLike") return Regime::FreeSlipLike;
    throw ParamError("unknown regime name '" + name + "'");
}

// ------------------------------------------------------------- formatting --

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    const char* c = s.c_str();
    char* end = nullptr;
    double v = std::strtod(c, &end);
    while (end && *end == ' ') ++end;
    if (end == c || (end && *end != '\0'))
        throw ParamError("cannot parse number '" + s + "' for " + what);
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    const char* c = s.c_str();
    char* end = nullptr;
    long v = std::strtol(c, &end, 10);
    while (end && *end == ' ') ++end;
    if (end == c || (end && *end != '\0'))
        throw ParamError("cannot parse integer '" + s + "' for " + what);
    return v;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

// ----------------------------------------------------------- run configs --

void RunConfig::validate() const {
    if (!(ra > 0.0) || !std::isfinite(ra)) throw ParamError("ra must be positive");
    if (!(aspect > 0.0)) throw ParamError("aspect must be positive");
    if (hdim != 1 && hdim != 2) throw ParamError("hdim must be 1 or 2");
    if (nx < 4 || nx % 2 != 0) throw ParamError("nx must be even and >= 4");
    if (nz < 4) throw ParamError("nz must be >= 4");
    if (!(amplitude >= 0.0)) throw ParamError("amplitude must be >= 0");
    if (!(t_spinup >= 0.0) || !(t_avg > 0.0))
        throw ParamError("t_spinup must be >= 0 and t_avg > 0");
    if (batches < 1) throw ParamError("batches must be >= 1");
    if (dt < 0.0 || dt_max < 0.0 || !(cfl > 0.0))
        throw ParamError("dt and dt_max must be >= 0, cfl > 0");
    if (energy_check_every < 1) throw ParamError("energy_check_every must be >= 1");
    if (!(energy_tol > 0.0)) throw ParamError("energy_tol must be positive");
    if (outdir.empty()) throw ParamError("outdir must not be empty");
    rescaled_params().validate();
}

SlabParams RunConfig::rescaled_params() const { return rescale(ra, aspect, slip, hdim); }

SlipLength parse_sigma_token(std::string token, double ra) {
    token = trim(token);
    std::string low = token;
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (low == "free" || low == "freeslip" || low == "free_slip") return SlipLength::free_slip();
    if (low.rfind("ra^", 0) == 0) {
        std::string exp = low.substr(3);
        double p;
        auto slash = exp.find('/');
        if (slash != std::string::npos) {
            double num = parse_double(exp.substr(0, slash), "sigma exponent");
            double den = parse_double(exp.substr(slash + 1), "sigma exponent");
            if (den == 0.0) throw ParamError("sigma exponent has zero denominator");
            p = num / den;
        } else {
            p = parse_double(exp, "sigma exponent");
        }
        return SlipLength::finite(std::pow(ra, p));
    }
    double v = parse_double(token, "sigma");
    if (v < 0.0) throw ParamError("sigma must be >= 0 or 'free'");
    return SlipLength::finite(v);
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParamError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParamError("config line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second)
            throw ParamError("config line " + std::to_string(lineno) + ": duplicate key '" +
                             key + "'");
    }
    return out;
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_key_values(in);
}

namespace {

// one handler per key keeps "unknown key" detection trivial
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "ra") cfg.ra = parse_double(value, key);
    else if (key == "sigma") cfg.slip = parse_sigma_token(value, cfg.ra);
    else if (key == "aspect") cfg.aspect = parse_double(value, key);
    else if (key == "hdim") cfg.hdim = static_cast<int>(parse_long(value, key));
    else if (key == "nx") cfg.nx = static_cast<int>(parse_long(value, key));
    else if (key == "nz") cfg.nz = static_cast<int>(parse_long(value, key));
    else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_long(value, key));
    else if (key == "amplitude") cfg.amplitude = parse_double(value, key);
    else if (key == "t_spinup") cfg.t_spinup = parse_double(value, key);
    else if (key == "t_avg") cfg.t_avg = parse_double(value, key);
    else if (key == "batches") cfg.batches = static_cast<int>(parse_long(value, key));
    else if (key == "steady_tol") cfg.steady_tol = parse_double(value, key);
    else if (key == "steady_window") cfg.steady_window = parse_double(value, key);
    else if (key == "require_steady") cfg.require_steady = parse_long(value, key) != 0;
    else if (key == "dt") cfg.dt = parse_double(value, key);
    else if (key == "cfl") cfg.cfl = parse_double(value, key);
    else if (key == "dt_max") cfg.dt_max = parse_double(value, key);
    else if (key == "energy_check_every")
        cfg.energy_check_every = static_cast<int>(parse_long(value, key));
    else if (key == "energy_tol") cfg.energy_tol = parse_double(value, key);
    else if (key == "outdir") cfg.outdir = value;
    else throw ParamError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig config_from_keys(const std::map<std::string, std::string>& keys, RunConfig base) {
    // ra first: sigma tokens of the form ra^p resolve against it
    auto it = keys.find("ra");
    if (it != keys.end()) apply_key(base, "ra", it->second);
    for (const auto& [key, value] : keys)
        if (key != "ra") apply_key(base, key, value);
    base.validate();
    return base;
}

std::string config_to_keys(const RunConfig& cfg) {
    std::ostringstream os;
    os << "ra = " << fmt17(cfg.ra) << "\n";
    os << "sigma = " << (cfg.slip.is_free() ? std::string("free") : fmt17(cfg.slip.value()))
       << "\n";
    os << "aspect = " << fmt17(cfg.aspect) << "\n";
    os << "hdim = " << cfg.hdim << "\n";
    os << "nx = " << cfg.nx << "\n";
    os << "nz = " << cfg.nz << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "amplitude = " << fmt17(cfg.amplitude) << "\n";
    os << "t_spinup = " << fmt17(cfg.t_spinup) << "\n";
    os << "t_avg = " << fmt17(cfg.t_avg) << "\n";
    os << "batches = " << cfg.batches << "\n";
    os << "steady_tol = " << fmt17(cfg.steady_tol) << "\n";
    os << "steady_window = " << fmt17(cfg.steady_window) << "\n";
    os << "require_steady = " << (cfg.require_steady ? 1 : 0) << "\n";
    os << "dt = " << fmt17(cfg.dt) << "\n";
    os << "cfl = " << fmt17(cfg.cfl) << "\n";
    os << "dt_max = " << fmt17(cfg.dt_max) << "\n";
    os << "energy_check_every = " << cfg.energy_check_every << "\n";
    os << "energy_tol = " << fmt17(cfg.energy_tol) << "\n";
    os << "outdir = " << cfg.outdir << "\n";
    return os.str();
}

std::vector<RunConfig> expand_sweep(const std::map<std::string, std::string>& keys,
                                    RunConfig base) {
    auto it_ra = keys.find("ra");
    auto it_sigma = keys.find("sigma");
    std::vector<std::string> ras =
        it_ra != keys.end() ? split(it_ra->second, ',') : std::vector<std::string>{""};
    std::vector<std::string> sigmas =
        it_sigma != keys.end() ? split(it_sigma->second, ',') : std::vector<std::string>{""};

    std::map<std::string, std::string> shared = keys;
    shared.erase("ra");
    shared.erase("sigma");

    std::vector<RunConfig> out;
    for (const std::string& ra : ras) {
        for (const std::string& sigma : sigmas) {
            std::map<std::string, std::string> one = shared;
            if (!trim(ra).empty()) one["ra"] = trim(ra);
            if (!trim(sigma).empty()) one["sigma"] = trim(sigma);
            out.push_back(config_from_keys(one, base));
        }
    }
    return out;
}

// --------------------------------------------------------------- records --

std::string sweep_csv_header() {
    return "ra,sigma,sigma_rescaled,height,nu,nu_err,regime,nx,nz,seed,walltime_s";
}

std::string sweep_csv_row(const SweepRecord& r) {
    std::ostringstream os;
    os << fmt17(r.ra) << ',' << fmt17(r.sigma) << ',' << fmt17(r.sigma_rescaled) << ','
       << fmt17(r.height) << ',' << fmt17(r.nu) << ',' << fmt17(r.nu_err) << ',' << r.regime
       << ',' << r.nx << ',' << r.nz << ',' << r.seed << ',' << fmt17(r.walltime_s);
    return os.str();
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("sweep CSV line 1: missing header");
    if (trim(line) != sweep_csv_header())
        throw IoError("sweep CSV line 1: unexpected header '" + trim(line) + "'");
    std::vector<SweepRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> f = split(trim(line), ',');
        if (f.size() != 11)
            throw IoError("sweep CSV line " + std::to_string(lineno) + ": expected 11 fields, got " +
                          std::to_string(f.size()));
        try {
            SweepRecord r;
            r.ra = parse_double(f[0], "ra");
            r.sigma = parse_double(f[1], "sigma");
            r.sigma_rescaled = parse_double(f[2], "sigma_rescaled");
            r.height = parse_double(f[3], "height");
            r.nu = parse_double(f[4], "nu");
            r.nu_err = parse_double(f[5], "nu_err");
            r.regime = regime_name(regime_from_name(f[6]));
            r.nx = static_cast<int>(parse_long(f[7], "nx"));
            r.nz = static_cast<int>(parse_long(f[8], "nz"));
            r.seed = static_cast<unsigned>(parse_long(f[9], "seed"));
            r.walltime_s = parse_double(f[10], "walltime_s");
            out.push_back(std::move(r));
        } catch (const Error& e) {
            throw IoError("sweep CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<SweepRecord> read_sweep_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep CSV '" + path + "'");
    return read_sweep_csv(in);
}

// --------------------------------------------------------------- running --

namespace {

constexpr const char* kStreamFluxProfile = "flux_profile";

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string timeseries_row(double t, const NusseltReport& rep, double eps, double dt) {
    std::ostringstream os;
    os << fmt17(t) << ',' << fmt17(rep.flux) << ',' << fmt17(rep.dissipation) << ','
       << fmt17(rep.boundary) << ',' << fmt17(eps) << ',' << fmt17(dt) << '\n';
    return os.str();
}

// weighted z-variation of the mean flux profile, relative to its mean
double profile_variation(const Eigen::VectorXd& profile, const Cheb& cheb) {
    const double h = cheb.height;
    const double mean = cheb.w.dot(profile) / h;
    const double var = cheb.w.dot((profile.array() - mean).square().matrix()) / h;
    return std::sqrt(std::max(0.0, var)) / std::max(std::abs(mean), 1e-300);
}

std::string summary_to_keys(const RunSummary& s) {
    std::ostringstream os;
    os << "nu = " << fmt17(s.record.nu) << "\n";
    os << "nu_err = " << fmt17(s.record.nu_err) << "\n";
    os << "flux_mean = " << fmt17(s.flux.mean) << "\n";
    os << "flux_se = " << fmt17(s.flux.se) << "\n";
    os << "dissipation_mean = " << fmt17(s.dissipation.mean) << "\n";
    os << "dissipation_se = " << fmt17(s.dissipation.se) << "\n";
    os << "boundary_mean = " << fmt17(s.boundary.mean) << "\n";
    os << "boundary_se = " << fmt17(s.boundary.se) << "\n";
    os << "profile_cov = " << fmt17(s.profile_cov) << "\n";
    os << "max_energy_residual = " << fmt17(s.max_energy_residual) << "\n";
    os << "max_overshoot = " << fmt17(s.max_overshoot) << "\n";
    os << "terminal_norm = " << fmt17(s.terminal_norm) << "\n";
    os << "reached_steady = " << (s.reached_steady ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace

RunSummary run_single(const RunConfig& cfg) {
    cfg.validate();
    const auto wall_start = std::chrono::steady_clock::now();

    fs::create_directories(cfg.outdir);
    const fs::path dir(cfg.outdir);
    write_file(dir / "config.txt", config_to_keys(cfg));
    fs::remove(dir / "DONE");
    fs::remove(dir / "FAILED");

    try {
        SlabParams par = cfg.rescaled_params();
        GridPtr grid = Grid::create(par, cfg.nx, cfg.nz);
        SimState state = init_state(par, grid, cfg.seed, cfg.amplitude);

        StepperConfig sc;
        sc.dt = cfg.dt;
        sc.cfl = cfg.cfl;
        sc.dt_max = cfg.dt_max;
        Stepper stepper(grid, sc);

        std::ofstream ts(dir / "timeseries.csv", std::ios::binary);
        if (!ts) throw IoError("cannot write '" + (dir / "timeseries.csv").string() + "'");
        ts << "time,nu_flux,nu_dissipation,nu_boundary,eps_mp,dt\n";

        RunSummary sum;

        // spin-up
        if (cfg.t_spinup > 0.0) {
            RunOptions ro;
            ro.t_end = state.time + cfg.t_spinup;
            ro.steady_tol = cfg.steady_tol;
            ro.steady_window = cfg.steady_window;
            RunResult spin = run_until(state, stepper, ro);
            sum.reached_steady = spin.reached_steady;
            for (size_t i = 0; i < spin.series.time.size(); ++i) {
                NusseltReport rep;
                rep.flux = spin.series.nu_flux[i];
                rep.dissipation = spin.series.nu_dissipation[i];
                rep.boundary = spin.series.nu_boundary[i];
                ts << timeseries_row(spin.series.time[i], rep, spin.series.eps_mp[i],
                                     spin.series.dt[i]);
                sum.max_overshoot = std::max(sum.max_overshoot, spin.series.eps_mp[i]);
            }
            if (cfg.require_steady && !spin.reached_steady)
                throw ConvergenceError("spin-up ended at t = " + fmt17(state.time) +
                                       " without meeting the drift criterion");
        }

        // averaged measurement
        const double t_meas0 = state.time;
        const double t_meas1 = t_meas0 + cfg.t_avg;
        TimeAverager avg(t_meas0, t_meas1, cfg.batches);
        auto sample = [&]() {
            const VelocityField& u = stepper.velocity_for(state);
            NusseltReport rep = nusselt_snapshot(state.tau, u);
            double eps = maximum_principle_overshoot(state.tau);
            avg.push(kStreamNuFlux, state.time, rep.flux);
            avg.push(kStreamNuDissipation, state.time, rep.dissipation);
            avg.push(kStreamNuBoundary, state.time, rep.boundary);
            avg.push_profile(kStreamWTheta, state.time, wtheta_profile(state.tau, u));
            avg.push_profile(kStreamFluxProfile, state.time, rep.flux_profile);
            ts << timeseries_row(state.time, rep, eps, stepper.last_dt());
            sum.max_overshoot = std::max(sum.max_overshoot, eps);
        };
        sample();
        while (state.time < t_meas1) {
            stepper.advance(state);
            sample();
            if (state.step_count % cfg.energy_check_every == 0) {
                EnergyCheck ec =
                    energy_identity_residuals(state.tau, stepper.velocity_for(state));
                double res = std::max(ec.residual_a, ec.residual_b);
                sum.max_energy_residual = std::max(sum.max_energy_residual, res);
                if (res > cfg.energy_tol)
                    throw OracleError("energy identity residual " + fmt17(res) +
                                      " exceeds tolerance at t = " + fmt17(state.time));
            }
        }
        ts.flush();

        // statistics
        auto flux = avg.scalar(kStreamNuFlux);
        auto diss = avg.scalar(kStreamNuDissipation);
        auto bnd = avg.scalar(kStreamNuBoundary);
        sum.flux = {flux.mean, flux.se};
        sum.dissipation = {diss.mean, diss.se};
        sum.boundary = {bnd.mean, bnd.se};
        sum.profile_cov = profile_variation(avg.profile_mean(kStreamFluxProfile), grid->cheb());
        sum.terminal_norm = state.tau.coeffs().norm();

        const double height = par.height;
        std::ostringstream loc_csv;
        loc_csv << "delta,lhs,rhs,margin,tolerance,ok\n";
        for (double f : {0.1, 0.25, 0.5, 1.0}) {
            double delta = f * std::min(1.0, height);
            if (!(delta > 0.0 && delta < height)) continue;
            Localization lc = localization_check(avg, grid->cheb(), delta);
            loc_csv << fmt17(lc.delta) << ',' << fmt17(lc.lhs) << ',' << fmt17(lc.rhs) << ','
                    << fmt17(lc.margin) << ',' << fmt17(lc.tolerance) << ','
                    << (lc.ok ? 1 : 0) << '\n';
            sum.localization.push_back(lc);
        }
        write_file(dir / "localization.csv", loc_csv.str());

        save_checkpoint(state, (dir / "run.ckpt").string());

        // record, original normalization
        SweepRecord& rec = sum.record;
        rec.ra = cfg.ra;
        rec.sigma = cfg.slip.value_or_inf();
        rec.sigma_rescaled = cfg.slip.is_free()
                                 ? std::numeric_limits<double>::infinity()
                                 : slip_rescaled(cfg.ra, cfg.slip.value());
        rec.height = height;
        rec.nu = nusselt_convert(flux.mean, height);
        rec.nu_err = height * flux.se;
        rec.regime = regime_name(regime_classify(rec.sigma_rescaled, height).regime);
        rec.nx = cfg.nx;
        rec.nz = cfg.nz;
        rec.seed = cfg.seed;
        rec.walltime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       wall_start)
                             .count();

        // the 1e-12 slack keeps rounding dust of an exactly-conductive run
        // (nu = 1 - eps with a zero error bar) from tripping the bound
        if (rec.nu < 1.0 - 3.0 * rec.nu_err - 1e-12)
            throw OracleError("measured nu = " + fmt17(rec.nu) +
                              " below the conduction lower bound beyond 3 error bars");

        write_file(dir / "summary.txt", summary_to_keys(sum));

        std::ostringstream rep;
        rep << "run " << dir.filename().string() << "\n";
        rep << "  ra " << fmt17(cfg.ra) << ", sigma "
            << (cfg.slip.is_free() ? std::string("free") : fmt17(cfg.slip.value()))
            << ", rescaled height " << fmt17(height) << ", regime " << rec.regime << "\n";
        rep << "  measured over t = [" << fmt17(t_meas0) << ", " << fmt17(state.time) << "] in "
            << cfg.batches << " batches\n";
        rep << "  nu (original normalization) " << fmt17(rec.nu) << " +- " << fmt17(rec.nu_err)
            << "\n";
        rep << "  estimators (rescaled): flux " << fmt17(flux.mean) << " +- " << fmt17(flux.se)
            << ", dissipation " << fmt17(diss.mean) << " +- " << fmt17(diss.se) << ", boundary "
            << fmt17(bnd.mean) << " +- " << fmt17(bnd.se) << "\n";
        rep << "  flux profile variation " << fmt17(sum.profile_cov) << "\n";
        rep << "  max energy residual " << fmt17(sum.max_energy_residual)
            << ", max temperature overshoot " << fmt17(sum.max_overshoot) << "\n";
        rep << "  localization margins:";
        for (const Localization& lc : sum.localization)
            rep << "  delta " << fmt17(lc.delta) << " margin " << fmt17(lc.margin)
                << (lc.ok ? " ok" : " VIOLATED");
        rep << "\n  walltime " << fmt17(rec.walltime_s) << " s\n";
        write_file(dir / "report.txt", rep.str());

        write_file(dir / "DONE", sweep_csv_row(rec) + "\n");
        return sum;
    } catch (const std::exception& e) {
        write_file(dir / "FAILED", std::string(e.what()) + "\n");
        throw;
    }
}

RunSummary read_run_summary(const std::string& rundir) {
    const fs::path dir(rundir);
    std::ifstream done(dir / "DONE");
    if (!done) throw IoError("no DONE marker in '" + rundir + "'");
    std::stringstream csv;
    csv << sweep_csv_header() << "\n" << done.rdbuf();
    auto rows = read_sweep_csv(csv);
    if (rows.size() != 1) throw IoError("DONE marker in '" + rundir + "' is not a single row");

    auto keys = parse_key_value_file((dir / "summary.txt").string());
    auto get = [&](const char* k) {
        auto it = keys.find(k);
        if (it == keys.end())
            throw IoError("summary.txt in '" + rundir + "' lacks key '" + std::string(k) + "'");
        return parse_double(it->second, k);
    };
    RunSummary sum;
    sum.record = rows[0];
    sum.flux = {get("flux_mean"), get("flux_se")};
    sum.dissipation = {get("dissipation_mean"), get("dissipation_se")};
    sum.boundary = {get("boundary_mean"), get("boundary_se")};
    sum.profile_cov = get("profile_cov");
    sum.max_energy_residual = get("max_energy_residual");
    sum.max_overshoot = get("max_overshoot");
    sum.terminal_norm = get("terminal_norm");
    sum.reached_steady = get("reached_steady") != 0.0;

    std::ifstream loc(dir / "localization.csv");
    if (loc) {
        std::string line;
        std::getline(loc, line);  // header
        while (std::getline(loc, line)) {
            if (trim(line).empty()) continue;
            auto f = split(trim(line), ',');
            if (f.size() != 6) throw IoError("bad localization.csv row in '" + rundir + "'");
            Localization lc;
            lc.delta = parse_double(f[0], "delta");
            lc.lhs = parse_double(f[1], "lhs");
            lc.rhs = parse_double(f[2], "rhs");
            lc.margin = parse_double(f[3], "margin");
            lc.tolerance = parse_double(f[4], "tolerance");
            lc.ok = parse_long(f[5], "ok") != 0;
            sum.localization.push_back(lc);
        }
    }
    return sum;
}

// ----------------------------------------------------------------- sweep --

namespace {

std::string run_dirname(size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%03zu", index);
    return buf;
}

std::string manifest_text(const std::vector<RunConfig>& configs) {
    std::ostringstream os;
    os << "code = " << kCodeVersion << "\n";
    for (size_t i = 0; i < configs.size(); ++i) {
        std::string keys = config_to_keys(configs[i]);
        std::replace(keys.begin(), keys.end(), '\n', ';');
        os << run_dirname(i) << ": " << keys << "\n";
    }
    return os.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const BlowUpError*>(&e)) return 3;
    if (dynamic_cast<const OracleError*>(&e)) return 5;
    if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
    if (dynamic_cast<const NumericsError*>(&e)) return 4;
    return 2;
}

}  // namespace

SweepResult run_sweep(std::vector<RunConfig> configs, const std::string& root, int jobs) {
    if (configs.empty()) throw ParamError("run_sweep needs a nonempty config grid");
    if (jobs < 1) throw ParamError("jobs must be >= 1");
    fs::create_directories(root);
    const fs::path rootp(root);

    for (size_t i = 0; i < configs.size(); ++i)
        configs[i].outdir = (rootp / run_dirname(i)).string();

    // the manifest pins the grid; a resume against a different grid is an error
    const std::string manifest = manifest_text(configs);
    const fs::path manifest_path = rootp / "manifest.txt";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        if (buf.str() != manifest)
            throw ParamError("existing manifest in '" + root +
                             "' does not match this config grid");
    } else {
        const fs::path tmp = rootp / "manifest.txt.tmp";
        write_file(tmp, manifest);
        fs::rename(tmp, manifest_path);
    }

    std::vector<std::optional<SweepRecord>> records(configs.size());
    std::vector<size_t> pending;

    for (size_t i = 0; i < configs.size(); ++i) {
        const fs::path done = fs::path(configs[i].outdir) / "DONE";
        if (fs::exists(done)) {
            try {
                records[i] = read_run_summary(configs[i].outdir).record;
                continue;
            } catch (const Error&) {
                // corrupt marker: redo the run
            }
        }
        pending.push_back(i);
    }

    std::mutex mu;
    size_t next = 0;
    std::vector<std::pair<size_t, std::pair<int, std::string>>> failed_runs;
    auto worker = [&]() {
        for (;;) {
            size_t idx;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= pending.size()) return;
                idx = pending[next++];
            }
            try {
                RunSummary sum = run_single(configs[idx]);
                std::lock_guard<std::mutex> lock(mu);
                records[idx] = sum.record;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failed_runs.emplace_back(idx, std::make_pair(exit_code_for(e),
                                                             run_dirname(idx) + ": " + e.what()));
            }
        }
    };

    const int nthreads = static_cast<int>(std::min<size_t>(jobs, pending.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(failed_runs.begin(), failed_runs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SweepResult out;
    std::ostringstream csv;
    csv << sweep_csv_header() << "\n";
    for (size_t i = 0; i < configs.size(); ++i) {
        if (records[i]) {
            csv << sweep_csv_row(*records[i]) << "\n";
            out.records.push_back(*records[i]);
        }
    }
    write_file(rootp / "sweep.csv", csv.str());

    for (const auto& [idx, fail] : failed_runs) {
        out.failed.push_back(static_cast<int>(idx));
        out.failure_messages.push_back(fail.second);
        if (out.exit_code == 0) out.exit_code = fail.first;
    }
    return out;
}

// ------------------------------------------------------------------ fits --

namespace {

// two-sided 95% Student-t quantiles by degrees of freedom
double t_quantile_95(int dof) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                   2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                   2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                   2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) return std::numeric_limits<double>::infinity();
    if (dof <= 30) return table[dof - 1];
    return 1.960;
}

}  // namespace

FitResult fit_scaling(const std::vector<SweepRecord>& records, Regime regime) {
    std::vector<double> x, y;
    double ra_min = std::numeric_limits<double>::infinity(), ra_max = 0.0;
    for (const SweepRecord& r : records) {
        if (!(r.nu > 0.0) || !(r.ra > 0.0)) continue;
        double xv;
        if (regime == Regime::Intermediate) {
            if (!(r.sigma > 0.0) || std::isinf(r.sigma)) continue;
            xv = std::log(r.sigma * r.ra);
        } else {
            xv = std::log(r.ra);
        }
        x.push_back(xv);
        y.push_back(std::log(r.nu));
        ra_min = std::min(ra_min, r.ra);
        ra_max = std::max(ra_max, r.ra);
    }
    const int n = static_cast<int>(x.size());
    if (n < 3) throw ParamError("fit_scaling needs at least 3 usable records");
    if (!(ra_max / ra_min >= 10.0))
        throw ParamError("fit_scaling needs records spanning at least a decade in ra");

    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ParamError("fit_scaling needs distinct abscissae");

    FitResult fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    fit.slope_se = n > 2 ? std::sqrt(std::max(0.0, ssr / (n - 2)) / sxx) : 0.0;
    fit.slope_ci95 = t_quantile_95(n - 2) * fit.slope_se;
    switch (regime) {
        case Regime::NoSlipLike: fit.reference = 1.0 / 3.0; break;
        case Regime::Intermediate: fit.reference = 0.5; break;
        case Regime::FreeSlipLike: fit.reference = 5.0 / 12.0; break;
    }
    fit.gap = fit.slope - fit.reference;
    return fit;
}

double envelope_constant(const std::vector<SweepRecord>& records) {
    double c = 0.0;
    for (const SweepRecord& r : records) {
        double factor = r.height * std::max({1.0, std::sqrt(r.sigma_rescaled),
                                             std::pow(r.height, 0.25)});
        if (std::isinf(factor)) continue;  // free slip rows never bind
        c = std::max(c, r.nu / factor);
    }
    return c;
}

std::vector<std::string> monotonicity_violations(const std::vector<SweepRecord>& records,
                                                 double nsigma) {
    std::map<double, std::vector<const SweepRecord*>> by_ra;
    for (const SweepRecord& r : records) by_ra[r.ra].push_back(&r);
    std::vector<std::string> out;
    for (auto& [ra, rows] : by_ra) {
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRecord* a, const SweepRecord* b) { return a->sigma < b->sigma; });
        for (size_t i = 0; i + 1 < rows.size(); ++i) {
            const SweepRecord *a = rows[i], *b = rows[i + 1];
            double slack = nsigma * (a->nu_err + b->nu_err);
            if (b->nu < a->nu - slack) {
                std::ostringstream os;
                os << "ra " << fmt17(ra) << ": nu(sigma=" << fmt17(b->sigma) << ") = "
                   << fmt17(b->nu) << " < nu(sigma=" << fmt17(a->sigma) << ") = " << fmt17(a->nu)
                   << " - " << fmt17(slack);
                out.push_back(os.str());
            }
        }
    }
    return out;
}

std::string scaling_report(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    os << "records: " << records.size() << "\n";
    for (Regime reg : {Regime::NoSlipLike, Regime::Intermediate, Regime::FreeSlipLike}) {
        std::vector<SweepRecord> rows;
        for (const SweepRecord& r : records)
            if (r.regime == regime_name(reg)) rows.push_back(r);
        os << regime_name(reg) << ": " << rows.size() << " records";
        if (rows.empty()) {
            os << "\n";
            continue;
        }
        try {
            FitResult fit = fit_scaling(rows, reg);
            const char* var = reg == Regime::Intermediate ? "sigma*ra" : "ra";
            os << ", fit log nu ~ " << fmt17(fit.slope) << " log " << var << " + "
               << fmt17(fit.intercept) << "\n";
            os << "  slope " << fmt17(fit.slope) << " +- " << fmt17(fit.slope_ci95)
               << " (95% CI), r2 " << fmt17(fit.r2) << ", reference " << fmt17(fit.reference)
               << ", gap " << fmt17(fit.gap) << "\n";
        } catch (const ParamError& e) {
            os << ", no fit (" << e.what() << ")\n";
        }
    }
    os << "envelope: nu <= C * height * max(1, sqrt(sigma_rescaled), height^(1/4)) with C = "
       << fmt17(envelope_constant(records)) << "\n";
    auto viol = monotonicity_violations(records);
    if (viol.empty()) {
        os << "monotonicity in sigma at fixed ra: ok within 3 error bars\n";
    } else {
        os << "monotonicity violations:\n";
        for (const std::string& v : viol) os << "  " << v << "\n";
    }
    return os.str();
}

// ----------------------------------------------------------------- plots --

namespace {

// python float literal; inf needs a name
std::string pyfloat(double v) {
    if (std::isinf(v)) return v > 0 ? "math.inf" : "-math.inf";
    return fmt17(v);
}

}  // namespace

PlotBundle emit_plots(std::istream& csv) {
    std::vector<SweepRecord> rows = read_sweep_csv(csv);

    PlotBundle out;
    std::ostringstream data;
    data << sweep_csv_header() << "\n";
    for (const SweepRecord& r : rows) data << sweep_csv_row(r) << "\n";
    out.data = data.str();

    std::ostringstream py;
    py << "#!/usr/bin/env python3\n";
    py << "# generated by rbslip plots; regenerating from the same CSV is byte-identical\n";
    py << "import math\n";
    py << "import matplotlib\n";
    py << "matplotlib.use(\"Agg\")\n";
    py << "import matplotlib.pyplot as plt\n\n";
    py << "# ra, sigma, sigma_rescaled, height, nu, nu_err, regime\n";
    py << "rows = [\n";
    for (const SweepRecord& r : rows)
        py << "    (" << pyfloat(r.ra) << ", " << pyfloat(r.sigma) << ", "
           << pyfloat(r.sigma_rescaled) << ", " << pyfloat(r.height) << ", " << pyfloat(r.nu)
           << ", " << pyfloat(r.nu_err) << ", \"" << r.regime << "\"),\n";
    py << "]\n\n";
    py << "REGIME_COLOR = {\"NoSlipLike\": \"tab:blue\", \"Intermediate\": \"tab:orange\",\n";
    py << "                \"FreeSlipLike\": \"tab:green\"}\n\n";
    py << "def sigma_label(s):\n";
    py << "    return \"free\" if math.isinf(s) else \"%.3g\" % s\n\n";
    py << "# --- figure 1: nu vs ra, series per sigma, reference slopes 1/3 and 5/12\n";
    py << "fig, ax = plt.subplots(figsize=(6, 4.5))\n";
    py << "series = {}\n";
    py << "for r in rows:\n";
    py << "    series.setdefault(r[1], []).append(r)\n";
    py << "for s in sorted(series, key=lambda v: (math.isinf(v), v)):\n";
    py << "    pts = sorted(series[s], key=lambda r: r[0])\n";
    py << "    ax.errorbar([r[0] for r in pts], [r[4] for r in pts],\n";
    py << "                yerr=[r[5] for r in pts], marker=\"o\", capsize=2,\n";
    py << "                label=\"sigma = \" + sigma_label(s))\n";
    py << "ra_lo, ra_hi = (1e5, 1e7) if not rows else (min(r[0] for r in rows),\n";
    py << "                                            max(r[0] for r in rows))\n";
    py << "if ra_lo == ra_hi:\n";
    py << "    ra_lo, ra_hi = 0.5 * ra_lo, 2.0 * ra_hi\n";
    py << "nu_anchor = 1.0 if not rows else min(r[4] for r in rows)\n";
    py << "for p, style in ((1.0 / 3.0, \"--\"), (5.0 / 12.0, \":\")):\n";
    py << "    ax.plot([ra_lo, ra_hi], [nu_anchor, nu_anchor * (ra_hi / ra_lo) ** p],\n";
    py << "            style, color=\"gray\", label=\"slope %.3f\" % p)\n";
    py << "ax.set_xscale(\"log\")\n";
    py << "ax.set_yscale(\"log\")\n";
    py << "ax.set_xlabel(\"Ra\")\n";
    py << "ax.set_ylabel(\"Nu\")\n";
    py << "ax.legend(fontsize=7)\n";
    py << "fig.tight_layout()\n";
    py << "fig.savefig(\"sweep_nu_vs_ra.png\", dpi=150)\n\n";
    py << "# --- figure 2: nu vs rescaled sigma at fixed ra, with the piecewise\n";
    py << "# reference 1 / sqrt(sigma) / height^(1/4) (in units of nu at sigma -> 0)\n";
    py << "fig, ax = plt.subplots(figsize=(6, 4.5))\n";
    py << "by_ra = {}\n";
    py << "for r in rows:\n";
    py << "    by_ra.setdefault(r[0], []).append(r)\n";
    py << "for ra in sorted(by_ra):\n";
    py << "    pts = sorted(by_ra[ra], key=lambda r: r[2])\n";
    py << "    xs = [min(r[2], 10.0 * r[3] ** 0.5) for r in pts]  # cap inf at the plot edge\n";
    py << "    ax.errorbar(xs, [r[4] for r in pts], yerr=[r[5] for r in pts],\n";
    py << "                marker=\"o\", capsize=2, label=\"Ra = %.3g\" % ra)\n";
    py << "    height = pts[0][3]\n";
    py << "    base = pts[0][4]\n";
    py << "    ref_x = [xs[0] + (xs[-1] - xs[0]) * i / 200.0 for i in range(201)]\n";
    py << "    ref_y = [base * min(max(1.0, s ** 0.5), height ** 0.25) for s in ref_x]\n";
    py << "    ax.plot(ref_x, ref_y, \"--\", color=\"gray\", lw=0.8)\n";
    py << "if rows:\n";
    py << "    ax.set_xscale(\"symlog\", linthresh=1.0)\n";
    py << "ax.set_xlabel(\"rescaled slip length\")\n";
    py << "ax.set_ylabel(\"Nu\")\n";
    py << "ax.legend(fontsize=7)\n";
    py << "fig.tight_layout()\n";
    py << "fig.savefig(\"sweep_nu_vs_sigma.png\", dpi=150)\n";
    out.script = py.str();
    return out;
}

}  // namespace rbslip
