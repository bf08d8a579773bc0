#include "feeddrive/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feeddrive/catalog.hpp"
#include "feeddrive/config.hpp"
#include "feeddrive/frequency.hpp"
#include "feeddrive/io.hpp"
#include "feeddrive/metrics.hpp"
#include "feeddrive/motion.hpp"
#include "feeddrive/simulation.hpp"
#include "feeddrive/sweep.hpp"
#include "feeddrive/tuning.hpp"

namespace feeddrive {
namespace {

namespace fs = std::filesystem;

std::string join_command(int argc, const char* const* argv) {
    std::ostringstream cmd;
    cmd << fs::path(argc > 0 ? argv[0] : kToolName).filename().string();
    for (int i = 1; i < argc; ++i) cmd << ' ' << argv[i];
    return cmd.str();
}

/// Thrown for problems with the config document itself (usage class, exit 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_cfg(const std::string& path, std::ostream& err) {
    try {
        if (path.empty()) {
            RunConfig cfg;
            cfg.validate();
            return cfg;
        }
        std::vector<std::string> provenance;
        RunConfig cfg = load_config(path, &provenance);
        for (const std::string& line : provenance) err << "note: " << line << '\n';
        return cfg;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

const MotorSpec& pick_motor(const RunConfig& cfg, const std::string& id) {
    if (cfg.catalog.empty()) throw std::domain_error("config catalog is empty");
    if (id.empty()) return cfg.catalog.front();
    for (const MotorSpec& m : cfg.catalog)
        if (m.id == id || m.model == id) return m;
    std::string known;
    for (const MotorSpec& m : cfg.catalog) {
        if (!known.empty()) known += ", ";
        known += m.id;
    }
    throw std::domain_error("unknown motor '" + id + "' (catalog has: " + known + ")");
}

fs::path prepare_out_dir(const std::string& flag_dir, const RunConfig& cfg) {
    const fs::path dir = flag_dir.empty() ? fs::path(cfg.output_dir) : fs::path(flag_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::domain_error("cannot create output directory " + dir.string());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream file(path);
    if (!file) throw std::domain_error("cannot write " + path.string());
    return file;
}

void write_text(const fs::path& path, const std::string& text, std::ostream& out) {
    std::ofstream file = open_out(path);
    file << text;
    out << "wrote " << path.string() << '\n';
}

CommandTrajectory build_trajectory(const RunConfig& cfg, double speed_mm_s, double accel_m_s2) {
    const MotionProfile profile =
        plan(cfg.grid.stroke_mm, speed_mm_s, accel_m_s2 * 1000.0);
    return reciprocate(profile, cfg.grid.cycles, cfg.grid.dwell_s, cfg.sim.dt);
}

std::string scenario_name(const MotorSpec& motor, double speed, double accel, bool constrained) {
    std::ostringstream id;
    id << motor.id << "_v" << speed << "_a" << accel << '_'
       << (constrained ? "constrained" : "unconstrained");
    return id.str();
}

// ---------------------------------------------------------------- subcommands

struct GainFlags {
    double kp = 10.0;
    double kvp = 0.5;
    double kvi = 50.0;
    double kfv = 1.0;

    ControlGains gains() const { return {kp, kvp, kvi, kfv}; }
    /// Registers the four gain flags on a subcommand.
    void attach(CLI::App* cmd) {
        cmd->add_option("--kp", kp, "position loop gain, 1/s")->capture_default_str();
        cmd->add_option("--kvp", kvp, "velocity loop gain, N·m·s/rad")->capture_default_str();
        cmd->add_option("--kvi", kvi, "velocity integral gain, N·m/rad")->capture_default_str();
        cmd->add_option("--kfv", kfv, "velocity feedforward fraction")->capture_default_str();
    }
};

int cmd_plan(const RunConfig& cfg, const OutputMeta& meta, const fs::path& dir, double speed,
             double accel, std::ostream& out) {
    const MotionProfile profile = plan(cfg.grid.stroke_mm, speed, accel * 1000.0);
    const CommandTrajectory trajectory =
        reciprocate(profile, cfg.grid.cycles, cfg.grid.dwell_s, cfg.sim.dt);

    write_text(dir / "profile.json", profile_json(profile, meta), out);
    std::ofstream csv = open_out(dir / "trajectory.csv");
    write_trajectory_csv(csv, trajectory, meta);
    out << "wrote " << (dir / "trajectory.csv").string() << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const OutputMeta& meta, const fs::path& dir,
                 const MotorSpec& motor, double speed, double accel, const ControlGains& gains,
                 std::ostream& out) {
    const MechanicalParams params = instantiate_motor(cfg.mechanism(), motor);
    const CommandTrajectory trajectory = build_trajectory(cfg, speed, accel);
    const Trace trace = run_closed_loop(params, gains, trajectory, cfg.sim);
    const PerformanceReport performance = evaluate(trace);
    const StabilityReport stability =
        stability_report(params, gains, FrequencyGrid::standard());

    std::ofstream csv = open_out(dir / "trace.csv");
    write_trace_csv(csv, trace, meta);
    out << "wrote " << (dir / "trace.csv").string() << '\n';
    write_text(dir / "metrics.json", metrics_json(performance, stability, meta), out);
    return 0;
}

int cmd_bode(const RunConfig& cfg, const OutputMeta& meta, const fs::path& dir,
             const MotorSpec& motor, const ControlGains& gains, std::ostream& out) {
    const MechanicalParams params = instantiate_motor(cfg.mechanism(), motor);
    const FrequencyGrid grid = FrequencyGrid::standard();
    const auto response = loop_response(params, gains, grid);
    const auto points = bode_points(grid, response);
    const StabilityReport report = stability_report(params, gains, grid);

    std::ofstream csv = open_out(dir / "bode.csv");
    write_bode_csv(csv, points, meta);
    out << "wrote " << (dir / "bode.csv").string() << '\n';
    write_text(dir / "stability.json", stability_json(report, meta), out);
    return 0;
}

int cmd_tune(const RunConfig& cfg, const OutputMeta& meta, const fs::path& dir,
             const MotorSpec& motor, double speed, double accel, bool constrained,
             const std::string& algorithm, std::size_t budget, std::uint64_t seed,
             std::size_t threads, std::ostream& out) {
    TuningScenario scenario;
    scenario.params = instantiate_motor(cfg.mechanism(), motor);
    scenario.trajectory = build_trajectory(cfg, speed, accel);
    scenario.sim = cfg.sim;
    scenario.constrained = constrained;
    scenario.id = scenario_name(motor, speed, accel, constrained);

    auto history_file = [&](const TuneResult& result) {
        const fs::path path =
            dir / (std::string("history_") + to_string(result.algorithm) + ".csv");
        std::ofstream csv = open_out(path);
        write_history_csv(csv, result.search, meta);
        out << "wrote " << path.string() << '\n';
    };

    if (algorithm == "both") {
        const TuneResult fwa =
            tune(scenario, TuneAlgorithm::fireworks, budget, seed, threads, cfg.fwa, cfg.ga);
        const TuneResult ga =
            tune(scenario, TuneAlgorithm::island_ga, budget, seed, threads, cfg.fwa, cfg.ga);
        const CrossValidation cv = cross_validate(fwa, ga);
        write_text(dir / "tune.json", tune_pair_json(fwa, ga, cv, meta), out);
        history_file(fwa);
        history_file(ga);
        out << "cross-validation: " << (cv.agree ? "agree" : "disagree") << " (gap "
            << format_number(cv.relative_gap) << ")\n";
        return 0;
    }

    const TuneAlgorithm algo =
        algorithm == "fwa" ? TuneAlgorithm::fireworks : TuneAlgorithm::island_ga;
    const TuneResult result = tune(scenario, algo, budget, seed, threads, cfg.fwa, cfg.ga);
    write_text(dir / "tune.json", tune_json(result, meta), out);
    history_file(result);
    out << "best W " << format_number(result.best.w) << " ("
        << (result.best.feasible ? "feasible" : "infeasible") << ")\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const OutputMeta& meta, const fs::path& dir,
              const std::string& modes, const std::string& protocol, std::size_t budget,
              std::uint64_t seed, std::size_t threads, bool emit_plotdata, std::ostream& out) {
    SweepOptions options;
    options.budget = budget;
    options.threads = threads;
    options.sim = cfg.sim;
    options.fwa = cfg.fwa;
    options.ga = cfg.ga;
    options.protocol =
        protocol == "independent" ? SweepProtocol::independent : SweepProtocol::shared_pool;
    if (modes == "unconstrained")
        options.modes = {ConstraintMode::unconstrained};
    else if (modes == "constrained")
        options.modes = {ConstraintMode::constrained};
    else
        options.modes = {ConstraintMode::unconstrained, ConstraintMode::constrained};

    const SweepResult sweep = run_sweep(cfg.catalog, cfg.mechanism(), cfg.grid, options, seed);
    const std::vector<TrendSummary> trends = trend_report(sweep);

    std::ofstream csv = open_out(dir / "sweep.csv");
    write_sweep_csv(csv, sweep, meta);
    out << "wrote " << (dir / "sweep.csv").string() << '\n';
    write_text(dir / "trend.json", trend_json(trends, sweep, meta), out);
    if (emit_plotdata) {
        const fs::path plotdir = dir / "plotdata";
        for (const std::string& path : write_plotdata(plotdir.string(), sweep, meta))
            out << "wrote " << path << '\n';
    }
    out << sweep.rows.size() << " rows, " << trends.size() << " trend series\n";
    return 0;
}

int cmd_validate(const RunConfig& cfg, const OutputMeta& meta, std::ostream& out) {
    const CatalogReport report = validate_catalog(cfg.catalog, cfg.load_inertia_kgcm2);
    out << catalog_report_json(report, meta);
    return report.all_ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-inertia feed-axis toolkit: simulate, tune, and sweep servo gains"};
    app.name(kToolName);
    app.require_subcommand(1);

    // Shared flags (registered per subcommand so help stays local).
    std::string config_path;
    std::string out_dir_flag;
    std::string motor_id;
    double speed = 400.0;
    double accel = 5.0;
    GainFlags gain_flags;

    auto add_config = [&](CLI::App* cmd, bool required) {
        CLI::Option* opt =
            cmd->add_option("--config", config_path, "run configuration document (JSON)");
        opt->check(CLI::ExistingFile);
        if (required) opt->required();
    };
    auto add_out_dir = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", out_dir_flag,
                        "output directory (default: config output_dir)");
    };
    auto add_process = [&](CLI::App* cmd) {
        cmd->add_option("--speed", speed, "cruise velocity, mm/s")->capture_default_str();
        cmd->add_option("--accel", accel, "acceleration, m/s²")->capture_default_str();
    };
    auto add_motor = [&](CLI::App* cmd) {
        cmd->add_option("--motor", motor_id, "catalog motor id (default: first row)");
    };

    CLI::App* plan_cmd = app.add_subcommand("plan", "plan a reciprocating motion profile");
    add_config(plan_cmd, false);
    add_out_dir(plan_cmd);
    add_process(plan_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "run the closed-loop simulation");
    add_config(sim_cmd, true);
    add_out_dir(sim_cmd);
    add_process(sim_cmd);
    add_motor(sim_cmd);
    gain_flags.attach(sim_cmd);

    CLI::App* bode_cmd =
        app.add_subcommand("bode", "frequency response and margins of the position loop");
    add_config(bode_cmd, false);
    add_out_dir(bode_cmd);
    add_motor(bode_cmd);
    gain_flags.attach(bode_cmd);

    std::string algorithm = "both";
    std::size_t budget = 0;  // 0 = take from config
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t threads = 1;
    bool constrained = false;

    CLI::App* tune_cmd = app.add_subcommand("tune", "search gains for one scenario");
    add_config(tune_cmd, false);
    add_out_dir(tune_cmd);
    add_process(tune_cmd);
    add_motor(tune_cmd);
    tune_cmd->add_option("--algorithm", algorithm, "fwa | ga | both")
        ->check(CLI::IsMember({"fwa", "ga", "both"}))
        ->capture_default_str();
    tune_cmd->add_option("--budget", budget, "evaluations per search (default: config)");
    tune_cmd->add_option("--seed", seed, "search seed (default: config master_seed)")
        ->each([&](const std::string&) { seed_given = true; });
    tune_cmd->add_flag("--constrained", constrained, "enforce §-style margin constraints");
    tune_cmd->add_option("--threads", threads, "evaluation workers")->capture_default_str();

    std::string modes = "both";
    std::string protocol = "shared_pool";
    bool emit_plotdata = false;

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "tune every motor x process cell and report trends");
    add_config(sweep_cmd, false);
    add_out_dir(sweep_cmd);
    sweep_cmd->add_option("--modes", modes, "unconstrained | constrained | both")
        ->check(CLI::IsMember({"unconstrained", "constrained", "both"}))
        ->capture_default_str();
    sweep_cmd->add_option("--protocol", protocol, "shared_pool | independent")
        ->check(CLI::IsMember({"shared_pool", "independent"}))
        ->capture_default_str();
    sweep_cmd->add_option("--budget", budget, "evaluations per cell (default: config)");
    sweep_cmd->add_option("--seed", seed, "master seed (default: config master_seed)")
        ->each([&](const std::string&) { seed_given = true; });
    sweep_cmd->add_option("--threads", threads, "worker threads across cells")
        ->capture_default_str();
    sweep_cmd->add_flag("--emit-plotdata", emit_plotdata,
                        "write per-process capacity/W series files");

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "recompute catalog sizing columns and compare");
    add_config(validate_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_cfg(config_path, err);

        OutputMeta meta;
        meta.command = join_command(argc, argv);
        meta.config_digest = config_digest(cfg);

        const std::size_t run_budget = budget == 0 ? cfg.budget : budget;
        std::uint64_t run_seed = cfg.master_seed;
        if (seed_given) run_seed = seed;

        if (tune_cmd->parsed() || sweep_cmd->parsed()) {
            if (!seed_given)
                err << "note: --seed not given; using master seed " << run_seed
                    << (config_path.empty() ? " (built-in default)" : " from config") << '\n';
            meta.seed = std::to_string(run_seed);
        }

        if (validate_cmd->parsed()) return cmd_validate(cfg, meta, out);

        const fs::path dir = prepare_out_dir(out_dir_flag, cfg);
        if (plan_cmd->parsed()) return cmd_plan(cfg, meta, dir, speed, accel, out);
        if (sim_cmd->parsed())
            return cmd_simulate(cfg, meta, dir, pick_motor(cfg, motor_id), speed, accel,
                                gain_flags.gains(), out);
        if (bode_cmd->parsed())
            return cmd_bode(cfg, meta, dir, pick_motor(cfg, motor_id), gain_flags.gains(), out);
        if (tune_cmd->parsed())
            return cmd_tune(cfg, meta, dir, pick_motor(cfg, motor_id), speed, accel, constrained,
                            algorithm, run_budget, run_seed, threads, out);
        if (sweep_cmd->parsed())
            return cmd_sweep(cfg, meta, dir, modes, protocol, run_budget, run_seed, threads,
                             emit_plotdata, out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace feeddrive
