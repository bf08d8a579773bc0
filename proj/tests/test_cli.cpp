#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "feeddrive/catalog.hpp"
#include "feeddrive/cli.hpp"
#include "feeddrive/config.hpp"
#include "feeddrive/io.hpp"

using namespace feeddrive;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::vector<const char*> argv{"feeddrive"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(int(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

/// Fresh scratch directory under the build tree, unique per test case.
fs::path scratch(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("feeddrive_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream file(path);
    REQUIRE(file.good());
    std::ostringstream text;
    text << file.rdbuf();
    return text.str();
}

}  // namespace

TEST_CASE("config document round-trips and validates") {
    const RunConfig def;
    const std::string text = serialize_config(def);

    std::vector<std::string> provenance;
    const RunConfig back = parse_config(text, &provenance);
    CHECK(back.screw_stiffness_Nm_per_rad == def.screw_stiffness_Nm_per_rad);
    CHECK(back.coupling_damping_Nms_per_rad == def.coupling_damping_Nms_per_rad);
    CHECK(back.load_inertia_kgcm2 == def.load_inertia_kgcm2);
    CHECK(back.drive_coeff_mm_per_rad == def.drive_coeff_mm_per_rad);
    CHECK(back.catalog.size() == def.catalog.size());
    CHECK(back.budget == def.budget);
    CHECK(back.master_seed == def.master_seed);
    CHECK(back.fwa.amplitude_floor_init == def.fwa.amplitude_floor_init);
    CHECK(back.fwa.restart_after == def.fwa.restart_after);
    CHECK(serialize_config(back) == text);  // canonical form is a fixed point

    // Every effective value is echoed, and none is marked as a default.
    CHECK(!provenance.empty());
    for (const std::string& line : provenance)
        CHECK(line.find("(default)") == std::string::npos);
}

TEST_CASE("config parse errors carry the key path") {
    CHECK_THROWS_WITH_AS(parse_config("{\"mechanism\": {\"bogus_key\": 1}}"),
                         doctest::Contains("bogus_key"), std::domain_error);
}

TEST_CASE("negative physical values are rejected with the key name") {
    const std::string doc = R"({"catalog": [
        {"id": "x", "model": "m", "max_torque_Nm": 10, "rotor_inertia_kgcm2": -5}
    ]})";
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("rotor_inertia_kgcm2"),
                         std::domain_error);
}

TEST_CASE("defaults are echoed through provenance") {
    std::vector<std::string> provenance;
    parse_config("{}", &provenance);
    CHECK(!provenance.empty());
    bool saw_stiffness = false;
    for (const std::string& line : provenance)
        if (line.find("screw_stiffness_Nm_per_rad") != std::string::npos &&
            line.find("612") != std::string::npos)
            saw_stiffness = true;
    CHECK(saw_stiffness);
}

TEST_CASE("config digest is stable and sensitive") {
    RunConfig a, b;
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 16);
    b.budget = 1234;
    CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("format_number uses 9 significant digits and names non-finite values") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("unknown subcommand and missing required flags exit 2") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"simulate"}).code == 2);  // --config is required here
}

TEST_CASE("help exits 0") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"tune", "--help"}).code == 0);
}

TEST_CASE("validate prints the catalog report and exits by verdict") {
    const CliRun r = run({"validate"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"all_consistent\": true") != std::string::npos);
    CHECK(r.out.find("ISMH3-44C15CD") != std::string::npos);

    // A corrupted catalog row must flip the exit code.
    const fs::path dir = scratch("validate");
    RunConfig bad;
    bad.catalog[5].declared_capacity = 0.99;
    std::ofstream(dir / "bad.json") << serialize_config(bad);
    const CliRun flagged = run({"validate", "--config", (dir / "bad.json").string()});
    CHECK(flagged.code == 1);
    CHECK(flagged.out.find("\"all_consistent\": false") != std::string::npos);
}

TEST_CASE("config errors exit 2 with the offending path") {
    const fs::path dir = scratch("cfgerr");
    std::ofstream(dir / "bad.json") << "{\"optimizer\": {\"bogus\": 1}}";
    const CliRun r = run({"validate", "--config", (dir / "bad.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("bogus") != std::string::npos);

    CHECK(run({"validate", "--config", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("plan writes profile and trajectory with provenance headers") {
    const fs::path dir = scratch("plan");
    const CliRun r = run({"plan", "--speed", "400", "--accel", "1", "--out-dir", dir.string()});
    CHECK(r.code == 0);

    const std::string profile = slurp(dir / "profile.json");
    CHECK(profile.find("\"t1_s\": 0.4") != std::string::npos);

    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("# tool: feeddrive", 0) == 0);
    CHECK(csv.find("t_s,position_cmd_mm,velocity_cmd_mm_s,acceleration_cmd_mm_s2") !=
          std::string::npos);

    // Re-running the same command reproduces the files byte for byte,
    // apart from the header line recording the (differing) command line.
    const fs::path dir2 = scratch("plan2");
    run({"plan", "--speed", "400", "--accel", "1", "--out-dir", dir2.string()});
    const auto strip_command = [](std::string s) {
        const auto at = s.find("# command:");
        if (at == std::string::npos) return s;
        const auto end = s.find('\n', at);
        s.erase(at, end == std::string::npos ? s.size() - at : end - at + 1);
        return s;
    };
    CHECK(strip_command(slurp(dir2 / "trajectory.csv")) == strip_command(csv));
}

TEST_CASE("simulate writes a trace and metrics for a catalog motor") {
    const fs::path dir = scratch("simulate");
    RunConfig cfg;
    cfg.grid.cycles = 1;
    std::ofstream(dir / "cfg.json") << serialize_config(cfg);

    const CliRun r = run({"simulate", "--config", (dir / "cfg.json").string(), "--motor", "3",
                          "--speed", "100", "--accel", "1", "--out-dir", dir.string()});
    CHECK(r.code == 0);

    const std::string trace = slurp(dir / "trace.csv");
    CHECK(trace.find("t_s,position_cmd_mm,velocity_cmd_mm_s,position_mm,velocity_mm_s,"
                     "torque_cmd_Nm,torque_applied_Nm") != std::string::npos);
    const std::string metrics = slurp(dir / "metrics.json");
    CHECK(metrics.find("\"max_err_p_mm\"") != std::string::npos);
    CHECK(metrics.find("\"w\"") != std::string::npos);
    CHECK(metrics.find("\"gain_margin_db\"") != std::string::npos);
}

TEST_CASE("bode writes the response and the stability verdict") {
    const fs::path dir = scratch("bode");
    const CliRun r = run({"bode", "--motor", "1", "--kp", "20", "--kvp", "0.1", "--kvi", "10",
                          "--out-dir", dir.string()});
    CHECK(r.code == 0);
    const std::string csv = slurp(dir / "bode.csv");
    CHECK(csv.find("omega_rad_s,magnitude_db,phase_deg") != std::string::npos);
    const std::string report = slurp(dir / "stability.json");
    CHECK(report.find("\"phase_margin_deg\"") != std::string::npos);
    CHECK(report.find("\"feasible\"") != std::string::npos);
}

TEST_CASE("tune runs one algorithm, logs the seed default, and is reproducible") {
    const fs::path dir = scratch("tune");
    const std::vector<std::string> args = {"tune",    "--algorithm", "ga",       "--motor", "3",
                                           "--speed", "100",         "--accel",  "1",
                                           "--budget", "240",        "--out-dir", dir.string()};
    const CliRun r = run(args);
    CHECK(r.code == 0);
    CHECK(r.err.find("using master seed 2026") != std::string::npos);

    const std::string tune_doc = slurp(dir / "tune.json");
    CHECK(tune_doc.find("\"algorithm\": \"island_ga\"") != std::string::npos);
    CHECK(tune_doc.find("\"seed\": \"2026\"") != std::string::npos);
    const std::string history = slurp(dir / "history_island_ga.csv");
    CHECK(history.find("generation,best_w") != std::string::npos);

    const fs::path dir2 = scratch("tune2");
    std::vector<std::string> args2 = args;
    args2.back() = dir2.string();
    run(args2);
    // Byte-identical outputs modulo the command line itself.
    std::string a = tune_doc, b = slurp(dir2 / "tune.json");
    const auto strip = [](std::string& s) {
        const auto at = s.find("\"command\"");
        const auto end = s.find('\n', at);
        s.erase(at, end - at);
    };
    strip(a);
    strip(b);
    CHECK(a == b);
}

TEST_CASE("tune both cross-validates") {
    const fs::path dir = scratch("tuneboth");
    const CliRun r = run({"tune", "--algorithm", "both", "--motor", "3", "--speed", "100",
                          "--accel", "1", "--budget", "240", "--seed", "7", "--out-dir",
                          dir.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("using master seed") == std::string::npos);  // explicit seed: no note
    const std::string doc = slurp(dir / "tune.json");
    CHECK(doc.find("\"fireworks\"") != std::string::npos);
    CHECK(doc.find("\"island_ga\"") != std::string::npos);
    CHECK(doc.find("\"cross_validation\"") != std::string::npos);
    CHECK(doc.find("\"agree\"") != std::string::npos);
    slurp(dir / "history_fireworks.csv");
    slurp(dir / "history_island_ga.csv");
}

TEST_CASE("sweep writes rows, trends, and plot data") {
    const fs::path dir = scratch("sweep");
    RunConfig cfg;
    cfg.catalog = {cfg.catalog[2], cfg.catalog[5]};  // two motors keep it fast
    cfg.grid.speeds_mm_s = {100.0};
    cfg.grid.accels_m_s2 = {1.0};
    std::ofstream(dir / "cfg.json") << serialize_config(cfg);

    const CliRun r = run({"sweep", "--config", (dir / "cfg.json").string(), "--modes", "both",
                          "--budget", "400", "--seed", "5", "--emit-plotdata", "--out-dir",
                          dir.string()});
    CHECK(r.code == 0);

    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("motor_id") != std::string::npos);
    // 2 motors x 1 cell x 2 modes = 4 data rows.
    int data_rows = 0;
    std::istringstream lines(csv);
    std::string line;
    bool past_header = false;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#' && past_header) ++data_rows;
        if (!line.empty() && line.rfind("motor_id", 0) == 0) past_header = true;
    }
    CHECK(data_rows == 4);

    const std::string trend = slurp(dir / "trend.json");
    CHECK(trend.find("\"trends\"") != std::string::npos);
    CHECK(slurp(dir / "plotdata" / "wcurve_v100_a1_unconstrained.csv")
              .find("capacity_rotor_Nm_per_kgcm2,w") != std::string::npos);
    CHECK(fs::exists(dir / "plotdata" / "wcurve_v100_a1_constrained.csv"));
}
