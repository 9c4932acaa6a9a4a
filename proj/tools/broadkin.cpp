// broadkin: run | verify | moments
//
// Exit status: 0 success, 1 monitor or check failure, 2 malformed input,
// 3 I/O error, 4 any other rejected input (preconditions, unsupported models).

#include "broadkin/config.hpp"
#include "broadkin/io.hpp"
#include "broadkin/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace broadkin;

namespace {

enum Exit { ok = 0, failed = 1, bad_input = 2, io_error = 3, rejected = 4 };

void print_record(std::ostream& out, const StepRecord& r)
{
    out << "failing record:\n";
    out << "  t = " << format_double(r.time) << "\n  dt = " << format_double(r.dt)
        << "\n  truncation_R = " << format_double(r.truncation_R)
        << "\n  min_f = " << format_double(r.min_value);
    for (std::size_t i = 0; i < r.moments.orders.size(); ++i) {
        out << "\n  M_" << format_double(r.moments.orders[i]) << " = " << format_double(r.moments.values[i])
            << " (envelope " << format_double(r.gronwall_envelopes[i]) << ")";
    }
    out << "\n  gronwall_margin = " << format_double(r.gronwall_margin)
        << "\n  omega_set_norm = " << format_double(r.omega_set_norm)
        << "\n  omega_margin = " << format_double(r.omega_set_margin)
        << "\n  mass_margin = " << format_double(r.mass_margin)
        << "\n  subtangent_ratio = " << format_double(r.subtangent_ratio) << '\n';
}

std::string join(const std::string& dir, const std::string& name)
{
    return (std::filesystem::path(dir) / name).string();
}

int cmd_run(const std::string& config_path, const std::string& out_override)
{
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) {
        cfg.run.output_dir = out_override;
    }
    const Physics phys = make_physics(cfg);
    const GridPtr grid = make_grid(cfg.grid);
    const RadialSpectrum f0 = make_initial(cfg, grid, phys);
    ensure_directory(cfg.run.output_dir);

    EvolveConfig ec;
    ec.dt = cfg.run.dt;
    ec.truncation_R = cfg.run.truncation_R;
    ec.constants = constants_options(cfg);
    ec.tolerance = cfg.run.tolerance;
    ec.stepper = cfg.run.stepper;
    ec.snapshot_every = cfg.run.snapshot_every;

    const double R = cfg.run.truncation_R.value_or(grid->back());
    const AnalyticConstants consts = derive_constants(f0, phys, cfg.run.T, ec.constants);
    const double bound = step_size_bound(R, consts, cfg.run.T, phys.params);
    const double dt = cfg.run.dt.value_or(0.5 * bound);
    const std::string manifest_path = join(cfg.run.output_dir, "manifest.txt");
    auto write_manifest_file = [&](const std::vector<std::pair<std::string, std::string>>& extra) {
        std::ofstream m(manifest_path);
        if (!m) {
            throw IoError("cannot write manifest '" + manifest_path + "'");
        }
        write_manifest(m, cfg, consts, R, bound, dt, extra);
    };

    std::cout << "broadkin run: n=" << grid->size() << " T=" << format_double(cfg.run.T)
              << " h_R/2=" << format_double(bound) << " dt=" << format_double(dt)
              << " Ctilde=" << format_double(consts.gronwall_Ctilde) << '\n';

    const TriadQuadrature quad = build_quadrature(*grid, phys.params.dimension_d);
    Trajectory traj;
    try {
        traj = evolve(f0, cfg.run.T, quad, phys, ec);
    } catch (const IntegrationError& e) {
        write_manifest_file({{"status", "monitor_failure"}, {"failure", e.what()}});
        std::cerr << "monitor failure: " << e.what() << '\n';
        print_record(std::cerr, e.record());
        return failed;
    }

    std::vector<std::pair<std::string, std::string>> extra{
        {"status", "completed"},
        {"steps", std::to_string(traj.records.size() - 1)},
        {"final_time", format_double(traj.records.back().time)},
    };
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
        write_snapshot(join(cfg.run.output_dir, name), traj.snapshots[s].spectrum);
        extra.emplace_back(std::string("snapshot.") + name, format_double(traj.snapshots[s].time));
    }
    {
        const std::string path = join(cfg.run.output_dir, "trajectory.csv");
        std::ofstream t(path);
        if (!t) {
            throw IoError("cannot write trajectory '" + path + "'");
        }
        write_trajectory(t, traj);
    }
    write_manifest_file(extra);
    const StepRecord& last = traj.records.back();
    std::cout << "completed " << traj.records.size() - 1 << " steps; min_f=" << format_double(last.min_value)
              << " gronwall_margin=" << format_double(last.gronwall_margin)
              << " omega_margin=" << format_double(last.omega_set_margin) << '\n';
    return ok;
}

int cmd_verify(const std::string& config_path, std::optional<std::size_t> trials,
               std::optional<std::uint64_t> seed, const std::string& out_override)
{
    RunConfig cfg = load_config(config_path);
    if (trials) {
        cfg.verify.suite.trials = *trials;
    }
    if (seed) {
        cfg.verify.suite.seed = *seed;
    }
    if (!out_override.empty()) {
        cfg.verify.output_dir = out_override;
    }
    const Physics phys = make_physics(cfg);
    QuadratureOptions qo;
    qo.weight_scale = cfg.verify.weight_scale;
    const VerifyContext ctx = VerifyContext::make(phys, make_grid(cfg.grid), qo);
    ensure_directory(cfg.verify.output_dir);

    const SuiteResult result = run_suite(ctx, cfg.verify.suite);
    {
        const std::string path = join(cfg.verify.output_dir, "verify_report.csv");
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot write report '" + path + "'");
        }
        write_reports_csv(out, result.reports);
    }
    {
        const std::string path = join(cfg.verify.output_dir, "mc_crosscheck.csv");
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot write report '" + path + "'");
        }
        write_mc_csv(out, result.mc_rows);
    }
    for (const auto& r : result.reports) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.check_name << "  worst=" << format_double(r.worst_ratio)
                  << "  bound=" << format_double(r.bound_used) << "  trials=" << r.trials << "  " << r.detail
                  << '\n';
    }
    std::cout << (result.passed() ? "all checks passed" : "some checks FAILED") << '\n';
    return result.passed() ? ok : failed;
}

int cmd_moments(const std::string& snapshot_path, const std::string& orders_text, const std::string& config_path)
{
    DispersionParams disp;
    int d = 3;
    if (!config_path.empty()) {
        const Physics phys = make_physics(load_config(config_path));
        disp = phys.disp;
        d = phys.params.dimension_d;
    }
    const std::vector<double> orders = parse_orders(orders_text);
    const RadialSpectrum f = read_snapshot(snapshot_path);
    std::cout << "order,moment\n";
    for (double m : orders) {
        std::cout << format_double(m) << ',' << format_double(moment(f, m, disp, d)) << '\n';
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Resonance-broadened three-wave kinetic equation solver"};
    app.require_subcommand(1);

    std::string run_config, run_out;
    auto* run = app.add_subcommand("run", "Integrate the kinetic equation with the certified scheme");
    run->add_option("--config", run_config, "Configuration file")->required();
    run->add_option("--out", run_out, "Output directory (overrides run.output_dir)");

    std::string verify_config, verify_out;
    std::optional<std::size_t> verify_trials;
    std::optional<std::uint64_t> verify_seed;
    auto* verify = app.add_subcommand("verify", "Run the estimate checks and the Monte Carlo cross-validation");
    verify->add_option("--config", verify_config, "Configuration file")->required();
    verify->add_option("--trials", verify_trials, "Trials per check");
    verify->add_option("--seed", verify_seed, "Seed");
    verify->add_option("--out", verify_out, "Output directory (overrides verify.output_dir)");

    std::string snapshot, orders, moments_config;
    auto* moments = app.add_subcommand("moments", "Print moments of a snapshot");
    moments->add_option("--snapshot", snapshot, "Snapshot CSV (k,f)")->required();
    moments->add_option("--orders", orders, "Comma-separated orders")->required();
    moments->add_option("--config", moments_config, "Configuration supplying the dispersion law");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    try {
        if (*run) {
            return cmd_run(run_config, run_out);
        }
        if (*verify) {
            return cmd_verify(verify_config, verify_trials, verify_seed, verify_out);
        }
        return cmd_moments(snapshot, orders, moments_config);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return bad_input;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rejected;
    }
}
