// Command-line front end: simulate, gains, feasibility, pde-validate, batch, plotdata.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "extruder/bangbang.hpp"
#include "extruder/config.hpp"
#include "extruder/csv.hpp"
#include "extruder/errors.hpp"
#include "extruder/feasibility.hpp"
#include "extruder/pde.hpp"
#include "extruder/sim.hpp"

namespace fs = std::filesystem;
using namespace extruder;

namespace {

Perturbation plant_perturbation(const ScenarioConfig& cfg)
{
    return cfg.mode == Mode::compensated_state_only ? Perturbation{0.0, cfg.pert.omega} : cfg.pert;
}

std::string write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    }
    out << text;
    return path.string();
}

// Writes <dir>/<stem>.csv and <dir>/<stem>_manifest.json for a finished run.
void persist(const ScenarioConfig& cfg, const std::string& config_path, const TimeSeries& ts,
             const fs::path& dir, const std::string& stem, double seconds)
{
    fs::create_directories(dir);
    const fs::path csv_path = dir / (stem + ".csv");
    {
        std::ofstream out(csv_path);
        if (!out) {
            throw ConfigError(fmt::format("cannot write '{}'", csv_path.string()));
        }
        write_timeseries_csv(out, ts);
    }
    RunManifest manifest;
    manifest.config_path = config_path;
    manifest.config_echo = echo_config(cfg);
    manifest.outputs = {csv_path.string()};
    manifest.wall_clock_seconds = seconds;
    manifest.verdict = check_feasibility(derive_coefficients(cfg.params), cfg.pert);
    manifest.monitors = ts.monitors;
    manifest.mode = std::string(to_string(cfg.mode));
    write_text(dir / (stem + "_manifest.json"), manifest_json(manifest) + "\n");
}

void print_summary(const TimeSeries& ts)
{
    const auto m = run_metrics(ts);
    fmt::print("steps: {}\n", ts.rows.size() - 1);
    fmt::print("final e: {:.6g}\n", ts.rows.back().e);
    fmt::print("max |e|: {:.6g}\n", m.max_abs_error);
    fmt::print("tail sup |e|: {:.6g}\n", tail_error(ts));
    if (m.settling_time) {
        fmt::print("settling time (|e| < 1e-3): {:.6g} min\n", *m.settling_time);
    } else {
        fmt::print("settling time (|e| < 1e-3): not settled\n");
    }
    fmt::print("max dD/dt: {:.6g}\n", ts.monitors.max_dDdt);
    if (ts.monitors.backstepping_residual) {
        fmt::print("backstepping residual: {:.3g}\n", *ts.monitors.backstepping_residual);
    }
}

int cmd_simulate(const std::string& path, const std::string& out_dir, std::string stem)
{
    const auto cfg = load_config(path);
    if (stem.empty()) {
        stem = fs::path(path).stem().string();
    }
    const auto start = std::chrono::steady_clock::now();
    const auto ts = run_scenario(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    persist(cfg, path, ts, out_dir, stem, seconds);
    fmt::print("mode: {}\n", to_string(cfg.mode));
    print_summary(ts);
    fmt::print("wrote {}\n", (fs::path(out_dir) / (stem + ".csv")).string());
    return 0;
}

int cmd_gains(const std::string& path)
{
    const auto cfg = load_config(path);
    const auto coeffs = derive_coefficients(cfg.params);
    const auto g = solve_gains(cfg.setpoint, coeffs);
    fmt::print("x_star: {}\n", cfg.setpoint.x_star);
    fmt::print("v_star: {:.10g}\n", open_loop_input(coeffs, cfg.setpoint.x_star));
    fmt::print("S_min: {:.10g}\n", s_min(coeffs, cfg.setpoint.x_star, cfg.setpoint.v_max));
    fmt::print("S: {:.10g}\n", cfg.setpoint.S);
    fmt::print("a_l: {:.10g}\n", g.a_l);
    fmt::print("a_r: {:.10g}\n", g.a_r);
    fmt::print("residual_l: {:.3e}\n", g.residual_l);
    fmt::print("residual_r: {:.3e}\n", g.residual_r);
    return 0;
}

int cmd_feasibility(const std::string& path)
{
    const auto cfg = load_config(path);
    const auto coeffs = derive_coefficients(cfg.params);
    const auto v = check_feasibility(coeffs, cfg.pert);
    if (v.satisfied) {
        double bound = v.branch == FeasibilityBranch::increasing   ? v.bounds.increasing
                       : v.branch == FeasibilityBranch::decreasing ? v.bounds.decreasing
                                                                   : v.bounds.interior_max;
        fmt::print("satisfied ({}): {:.5f} < {:.5f}\n", to_string(v.branch), v.lhs, bound);
    } else {
        fmt::print("not satisfied: {:.5f} exceeds every admissible bound\n", v.lhs);
    }
    fmt::print("eps*omega/(1-eps)^2: {:.10g}\n", v.lhs);
    fmt::print("bound increasing: {:.10g}\n", v.bounds.increasing);
    fmt::print("bound decreasing: {:.10g}\n", v.bounds.decreasing);
    fmt::print("bound interior_max: {:.10g}\n", v.bounds.interior_max);
    fmt::print("theta2*L: {:.10g}\n", coeffs.theta2L());
    if (v.x1) {
        fmt::print("x1: {:.10g}\n", *v.x1);
    } else {
        fmt::print("x1: none in (0, L)\n");
    }
    fmt::print("sup Lambda (grid): {:.10g}\n", v.sup_lambda);
    return 0;
}

int cmd_pde_validate(const std::string& path, double horizon, double dz)
{
    auto cfg = load_config(path);
    if (cfg.mode == Mode::delay_free) {
        throw ConfigError("pde-validate needs a delayed mode");
    }
    if (horizon > 0.0) {
        cfg.horizon = horizon;
    }
    const auto ts = run_scenario(cfg);
    std::vector<double> inputs;
    inputs.reserve(ts.rows.size() - 1);
    for (std::size_t k = 0; k + 1 < ts.rows.size(); ++k) {
        inputs.push_back(ts.rows[k].U);
    }
    const auto coeffs = derive_coefficients(cfg.params);
    const auto study = equivalence_study(coeffs, plant_perturbation(cfg), cfg.x0, cfg.u_history0, inputs, cfg.tau, dz);
    fmt::print("mode: {}\n", to_string(cfg.mode));
    fmt::print("horizon: {} min, tau: {} min\n", cfg.horizon, cfg.tau);
    fmt::print("dz: {:.6g} m\n", study.dz);
    fmt::print("max |x_pde - x_delay|: {:.6g} m ({:.3f} dz)\n", study.deviation, study.deviation / study.dz);
    fmt::print("refined (tau/2, dz/2): {:.6g} m\n", study.refined_deviation);
    fmt::print("refinement ratio: {:.3f}\n", study.ratio());
    return 0;
}

int cmd_batch(const std::string& dir, const std::string& out_dir, unsigned workers)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ini") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw ConfigError(fmt::format("no .ini scenarios in '{}'", dir));
    }

    // Parse everything first so a typo fails before any compute is spent.
    std::vector<ScenarioConfig> configs;
    configs.reserve(files.size());
    for (const auto& f : files) {
        configs.push_back(load_config(f.string()));
    }

    const auto start = std::chrono::steady_clock::now();
    const auto results = run_batch(configs, workers);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    int worst = 0;
    for (std::size_t k = 0; k < files.size(); ++k) {
        const auto stem = files[k].stem().string();
        const auto& r = results[k];
        if (r.series) {
            persist(configs[k], files[k].string(), *r.series, out_dir, stem, seconds);
            fmt::print("{}: ok, final e = {:.4g}, tail sup |e| = {:.4g}\n", stem, r.series->rows.back().e,
                       tail_error(*r.series));
        } else {
            fmt::print("{}: failed (exit {}): {}\n", stem, r.exit_code, r.error);
            worst = std::max(worst, r.exit_code);
        }
    }
    return worst;
}

int cmd_plotdata(const std::string& csv, const std::string& out_dir)
{
    std::ifstream in(csv);
    if (!in) {
        throw ConfigError(fmt::format("cannot open '{}'", csv));
    }
    const auto rows = read_timeseries_csv(in);
    for (const auto& p : write_plot_data(rows, out_dir, fs::path(csv).stem().string())) {
        fmt::print("wrote {}\n", p);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Screw-extruder interface control with delay-compensating predictor feedback"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    const std::string out_default = default_output_dir(".");

    std::string config_path;
    std::string out_dir = out_default;
    std::string stem;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario, write CSV and manifest");
    simulate->add_option("config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);
    simulate->add_option("-o,--out", out_dir, "Output directory (default: $EXTRUDER_OUTPUT_DIR or .)");
    simulate->add_option("-n,--name", stem, "Output file stem (default: config file stem)");

    auto* gains = app.add_subcommand("gains", "Solve the Bang-Bang gains");
    gains->add_option("config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);

    auto* feas = app.add_subcommand("feasibility", "Check the delay-rate condition on the perturbation");
    feas->add_option("config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);

    double pde_horizon = 0.0;
    double pde_dz = 0.0;
    auto* pde = app.add_subcommand("pde-validate", "Replay a run through the transport PDE and compare");
    pde->add_option("config", config_path, "Scenario INI file")->required()->check(CLI::ExistingFile);
    pde->add_option("--horizon", pde_horizon, "Override the horizon (min)");
    pde->add_option("--dz", pde_dz, "Grid spacing (m); default gives unit CFL number");

    std::string batch_dir;
    unsigned workers = 0;
    auto* batch = app.add_subcommand("batch", "Run every .ini in a directory concurrently");
    batch->add_option("dir", batch_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
    batch->add_option("-o,--out", out_dir, "Output directory (default: $EXTRUDER_OUTPUT_DIR or .)");
    batch->add_option("-j,--workers", workers, "Worker threads (default: hardware concurrency)");

    std::string csv_path;
    auto* plot = app.add_subcommand("plotdata", "Split a time-series CSV into per-panel extracts");
    plot->add_option("csv", csv_path, "Time-series CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--out", out_dir, "Output directory (default: $EXTRUDER_OUTPUT_DIR or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) return cmd_simulate(config_path, out_dir, stem);
        if (*gains) return cmd_gains(config_path);
        if (*feas) return cmd_feasibility(config_path);
        if (*pde) return cmd_pde_validate(config_path, pde_horizon, pde_dz);
        if (*batch) return cmd_batch(batch_dir, out_dir, workers);
        if (*plot) return cmd_plotdata(csv_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}
