#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rbslip/oracles.hpp"
#include "rbslip/params.hpp"
#include "rbslip/sweep.hpp"

namespace {

using namespace rbslip;

// 2 config / io, 3 blow-up, 4 non-convergence, 5 failed physics self-check
int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const BlowUpError*>(&e)) return 3;
    if (dynamic_cast<const OracleError*>(&e)) return 5;
    if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
    if (dynamic_cast<const NumericsError*>(&e)) return 4;
    return 2;
}

int jobs_from_env() {
    const char* v = std::getenv("RBSLIP_THREADS");
    if (v == nullptr || *v == '\0') return 1;
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1)
        throw ParamError("RBSLIP_THREADS must be a positive integer");
    return static_cast<int>(n);
}

struct KeyHelp {
    const char* key;
    const char* help;
};

constexpr KeyHelp kConfigKeys[] = {
    {"ra", "Rayleigh number"},
    {"sigma", "slip length, original units: number, 'free', or 'ra^p' / 'ra^p/q'"},
    {"aspect", "horizontal period over slab height"},
    {"hdim", "horizontal dimensions, 1 or 2"},
    {"nx", "horizontal points per direction (even)"},
    {"nz", "vertical polynomial degree"},
    {"seed", "initial-condition seed"},
    {"amplitude", "initial perturbation amplitude, at most 0.1"},
    {"t_spinup", "discarded transient, rescaled time units"},
    {"t_avg", "averaging window, rescaled time units"},
    {"batches", "batches for error bars"},
    {"steady_tol", "spin-up may end early once Nu drifts less than this"},
    {"steady_window", "trailing window for the drift criterion"},
    {"require_steady", "fail the run if the drift criterion never fired (0/1)"},
    {"dt", "fixed time step; 0 = adaptive"},
    {"cfl", "advective safety factor"},
    {"dt_max", "adaptive step cap; 0 = solver default"},
    {"energy_check_every", "steps between energy-identity spot checks"},
    {"energy_tol", "energy-identity residual tolerance"},
    {"outdir", "output directory (sweep: the sweep root)"},
};

// Flags mirror the config-file keys; explicit flags override the file.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> slot;

    void attach(CLI::App* cmd, bool lists) {
        cmd->add_option("--config", config_path, "key = value config file, applied first");
        for (const KeyHelp& k : kConfigKeys) {
            std::string help = k.help;
            if (lists && (std::string(k.key) == "ra" || std::string(k.key) == "sigma"))
                help += " (comma-separated list)";
            cmd->add_option("--" + std::string(k.key), slot[k.key], help);
        }
    }

    std::map<std::string, std::string> merged(const CLI::App* cmd) const {
        std::map<std::string, std::string> keys;
        if (!config_path.empty()) keys = parse_key_value_file(config_path);
        for (const auto& [k, v] : slot)
            if (cmd->count("--" + k) > 0) keys[k] = v;
        return keys;
    }
};

int do_run(const ConfigFlags& flags, const CLI::App* cmd) {
    RunConfig cfg = config_from_keys(flags.merged(cmd));
    run_single(cfg);
    std::ifstream rep(cfg.outdir + "/report.txt");
    std::cout << rep.rdbuf();
    return 0;
}

int do_sweep(const ConfigFlags& flags, const CLI::App* cmd) {
    std::map<std::string, std::string> keys = flags.merged(cmd);
    std::string root = "sweep";
    if (auto it = keys.find("outdir"); it != keys.end()) {
        root = it->second;
        keys.erase(it);
    }
    std::vector<RunConfig> configs = expand_sweep(keys);
    SweepResult result = run_sweep(configs, root, jobs_from_env());

    for (size_t i = 0; i < result.failed.size(); ++i)
        std::cerr << "run " << result.failed[i] << " failed: " << result.failure_messages[i]
                  << "\n";
    std::cout << result.records.size() << "/" << configs.size()
              << " runs completed, rows in " << root << "/sweep.csv\n";
    return result.exit_code;
}

int do_fit(const std::string& csv_path, const std::string& regime) {
    std::vector<SweepRecord> records = read_sweep_csv_file(csv_path);
    if (regime.empty()) {
        std::cout << scaling_report(records);
        return 0;
    }
    FitResult f = fit_scaling(records, regime_from_name(regime));
    std::cout << "regime " << regime << ": slope " << f.slope << " +- " << f.slope_ci95
              << " (95% ci, se " << f.slope_se << "), intercept " << f.intercept << ", r2 "
              << f.r2 << ", reference " << f.reference << ", gap " << f.gap << ", n " << f.n
              << "\n";
    return 0;
}

int do_plots(const std::string& csv_path, const std::string& outdir) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open sweep CSV '" + csv_path + "'");
    PlotBundle bundle = emit_plots(in);

    auto write = [&](const std::string& name, const std::string& text) {
        std::string path = outdir + "/" + name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + path + "'");
        out << text;
        std::cout << "wrote " << path << "\n";
    };
    write("sweep_plots.py", bundle.script);
    write("sweep_plots_data.csv", bundle.data);
    return 0;
}

int do_verify(bool csv) {
    std::vector<OracleCheck> checks = oracle_suite();
    if (csv)
        print_report_csv(std::cout, checks);
    else
        print_report(std::cout, checks);
    return all_pass(checks) ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Rayleigh-Benard convection at infinite Prandtl number with Navier-slip "
        "walls: single runs, Ra-sigma sweeps, scaling fits, plot emission and the "
        "cross-verification suite."};
    app.require_subcommand(1);

    ConfigFlags run_flags, sweep_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "one simulation, artifacts in --outdir");
    run_flags.attach(run_cmd, false);
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "cross product of ra and sigma lists; resumes from "
                                    "finished runs (RBSLIP_THREADS controls parallelism)");
    sweep_flags.attach(sweep_cmd, true);

    std::string fit_csv, fit_regime, plots_csv, plots_outdir = ".";
    CLI::App* fit_cmd = app.add_subcommand("fit", "power-law fits of a sweep CSV");
    fit_cmd->add_option("--csv", fit_csv, "sweep CSV path")->required();
    fit_cmd->add_option("--regime", fit_regime,
                        "NoSlipLike, Intermediate or FreeSlipLike; default: full report");
    CLI::App* plots_cmd = app.add_subcommand("plots", "plot script + data from a sweep CSV");
    plots_cmd->add_option("--csv", plots_csv, "sweep CSV path")->required();
    plots_cmd->add_option("--outdir", plots_outdir, "where to write the script and data");

    bool verify_csv = false;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the cross-verification suite, print the report");
    verify_cmd->add_flag("--csv", verify_csv, "CSV report instead of the aligned table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return do_run(run_flags, run_cmd);
        if (sweep_cmd->parsed()) return do_sweep(sweep_flags, sweep_cmd);
        if (fit_cmd->parsed()) return do_fit(fit_csv, fit_regime);
        if (plots_cmd->parsed()) return do_plots(plots_csv, plots_outdir);
        return do_verify(verify_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
