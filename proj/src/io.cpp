#include "feeddrive/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace feeddrive {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

/// JSON value for a double: finite numbers re-parsed from their 9-digit text
/// so the emitted document never carries more precision than the CSV files;
/// non-finite values become strings (JSON has no literal for them).
json jnum(double v) {
    if (!std::isfinite(v)) return format_number(v);
    return std::strtod(format_number(v).c_str(), nullptr);
}

json meta_json(const OutputMeta& meta) {
    return json{{"tool", std::string(kToolName) + " " + kToolVersion},
                {"command", meta.command},
                {"seed", meta.seed},
                {"config_digest", meta.config_digest}};
}

json gains_json(const ControlGains& g) {
    return json{{"kp_per_s", jnum(g.kp)},
                {"kvp_Nms_per_rad", jnum(g.kvp)},
                {"kvi_Nm_per_rad", jnum(g.kvi)},
                {"kfv", jnum(g.kfv)}};
}

json performance_json(const PerformanceReport& p) {
    return json{{"max_err_p_mm", jnum(p.max_err_p)},
                {"max_err_v_mm_s", jnum(p.max_err_v)},
                {"vars_v_mm2_s2", jnum(p.vars_v)},
                {"w", jnum(p.w)}};
}

json stability_body(const StabilityReport& s) {
    return json{{"gain_margin_db", jnum(s.gain_margin_db)},
                {"phase_margin_deg", jnum(s.phase_margin_deg)},
                {"resonance_peak", jnum(s.resonance_peak)},
                {"gain_crossover_rad_s", jnum(s.gain_crossover_rad_s)},
                {"phase_crossover_rad_s", jnum(s.phase_crossover_rad_s)},
                {"closed_loop_stable", s.closed_loop_stable},
                {"feasible", s.feasible}};
}

json evaluation_json(const CandidateEvaluation& e) {
    json out{{"gains", gains_json(e.gains)},
             {"w", jnum(e.w)},
             {"penalized", jnum(e.penalized)},
             {"feasible", e.feasible},
             {"diverged", e.diverged},
             {"stability", stability_body(e.stability)}};
    if (e.diverged)
        out["blowup_time_s"] = jnum(e.blowup_time);
    else
        out["performance"] = performance_json(e.performance);
    return out;
}

json tune_body(const TuneResult& r) {
    return json{{"algorithm", to_string(r.algorithm)},
                {"scenario", r.scenario_id},
                {"seed", r.search.seed},
                {"evaluations_used", r.search.evaluations_used},
                {"best_value", jnum(r.search.best_value)},
                {"generations", r.search.history.size()},
                {"best", evaluation_json(r.best)}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_header(std::ostream& out, const OutputMeta& meta, const std::string& columns) {
    out << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
    out << "# command: " << meta.command << '\n';
    out << "# seed: " << meta.seed << '\n';
    out << "# config_digest: " << meta.config_digest << '\n';
    out << columns << '\n';
}

void write_trajectory_csv(std::ostream& out, const CommandTrajectory& trajectory,
                          const OutputMeta& meta) {
    write_header(out, meta, "t_s,position_cmd_mm,velocity_cmd_mm_s,acceleration_cmd_mm_s2");
    for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
        const CommandSample& s = trajectory.samples[k];
        out << format_number(double(k) * trajectory.dt) << ',' << format_number(s.position)
            << ',' << format_number(s.velocity) << ',' << format_number(s.acceleration) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const Trace& trace, const OutputMeta& meta) {
    write_header(out, meta,
                 "t_s,position_cmd_mm,velocity_cmd_mm_s,position_mm,velocity_mm_s,"
                 "torque_cmd_Nm,torque_applied_Nm");
    for (const TraceSample& s : trace.samples) {
        out << format_number(s.t) << ',' << format_number(s.pos_cmd) << ','
            << format_number(s.vel_cmd) << ',' << format_number(s.pos_actual) << ','
            << format_number(s.vel_actual) << ',' << format_number(s.torque_cmd) << ','
            << format_number(s.torque_applied) << '\n';
    }
}

void write_history_csv(std::ostream& out, const OptimizerResult& result,
                       const OutputMeta& meta) {
    write_header(out, meta, "generation,best_w");
    for (std::size_t g = 0; g < result.history.size(); ++g)
        out << g << ',' << format_number(result.history[g]) << '\n';
}

void write_bode_csv(std::ostream& out, const std::vector<BodePoint>& points,
                    const OutputMeta& meta) {
    write_header(out, meta, "omega_rad_s,magnitude_db,phase_deg");
    for (const BodePoint& p : points)
        out << format_number(p.omega) << ',' << format_number(p.magnitude_db) << ','
            << format_number(p.phase_deg) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputMeta& meta) {
    write_header(out, meta,
                 "motor_id,motor_model,speed_mm_s,accel_m_s2,capacity_rotor_Nm_per_kgcm2,"
                 "capacity_table_mm_per_s2_per_10000,inertia_ratio,mode,kp_per_s,"
                 "kvp_Nms_per_rad,kvi_Nm_per_rad,kfv,w,max_err_p_mm,max_err_v_mm_s,"
                 "vars_v_mm2_s2,gain_margin_db,phase_margin_deg,resonance_peak,feasible,"
                 "diverged,fallback,cv_agree,cv_gap,seed");
    for (const SweepRow& r : sweep.rows) {
        out << csv_escape(r.motor_id) << ',' << csv_escape(r.motor_model) << ','
            << format_number(r.speed_mm_s) << ',' << format_number(r.accel_m_s2) << ','
            << format_number(r.capacity_rotor) << ',' << format_number(r.capacity_table) << ','
            << format_number(r.inertia_ratio) << ',' << to_string(r.mode) << ','
            << format_number(r.gains.kp) << ',' << format_number(r.gains.kvp) << ','
            << format_number(r.gains.kvi) << ',' << format_number(r.gains.kfv) << ','
            << format_number(r.w) << ',' << format_number(r.max_err_p) << ','
            << format_number(r.max_err_v) << ',' << format_number(r.vars_v) << ','
            << format_number(r.gain_margin_db) << ',' << format_number(r.phase_margin_deg)
            << ',' << format_number(r.resonance_peak) << ',' << int(r.feasible) << ','
            << int(r.diverged) << ',' << int(r.fallback) << ',' << int(r.cv_agree) << ','
            << format_number(r.cv_gap) << ',' << r.seed << '\n';
    }
}

std::vector<std::string> write_plotdata(const std::string& directory, const SweepResult& sweep,
                                        const OutputMeta& meta) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::vector<std::string> paths;
    for (const TrendSummary& series : trend_report(sweep)) {
        char name[128];
        std::snprintf(name, sizeof name, "wcurve_v%g_a%g_%s.csv", series.speed_mm_s,
                      series.accel_m_s2, to_string(series.mode));
        const fs::path path = fs::path(directory) / name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        write_header(out, meta, "capacity_rotor_Nm_per_kgcm2,w");
        for (std::size_t i = 0; i < series.capacities.size(); ++i)
            out << format_number(series.capacities[i]) << ','
                << format_number(series.w_values[i]) << '\n';
        paths.push_back(path.string());
    }
    return paths;
}

std::string profile_json(const MotionProfile& profile, const OutputMeta& meta) {
    json doc{{"meta", meta_json(meta)},
             {"distance_mm", jnum(profile.distance)},
             {"cruise_velocity_mm_s", jnum(profile.cruise_velocity)},
             {"acceleration_mm_s2", jnum(profile.acceleration)},
             {"t1_s", jnum(profile.t1)},
             {"t2_s", jnum(profile.t2)},
             {"t3_s", jnum(profile.t3)},
             {"peak_velocity_mm_s", jnum(profile.peak_velocity)},
             {"shape", profile.triangular ? "triangular" : "trapezoidal"}};
    return dump(doc);
}

std::string metrics_json(const PerformanceReport& performance, const StabilityReport& stability,
                         const OutputMeta& meta) {
    json doc{{"meta", meta_json(meta)},
             {"performance", performance_json(performance)},
             {"stability", stability_body(stability)}};
    return dump(doc);
}

std::string stability_json(const StabilityReport& report, const OutputMeta& meta) {
    json doc{{"meta", meta_json(meta)}, {"stability", stability_body(report)}};
    return dump(doc);
}

std::string tune_json(const TuneResult& result, const OutputMeta& meta) {
    json doc = tune_body(result);
    doc["meta"] = meta_json(meta);
    return dump(doc);
}

std::string tune_pair_json(const TuneResult& fireworks, const TuneResult& island_ga,
                           const CrossValidation& cv, const OutputMeta& meta) {
    json doc{{"meta", meta_json(meta)},
             {"fireworks", tune_body(fireworks)},
             {"island_ga", tune_body(island_ga)},
             {"cross_validation",
              json{{"agree", cv.agree},
                   {"w_fireworks", jnum(cv.w_fireworks)},
                   {"w_island_ga", jnum(cv.w_island_ga)},
                   {"relative_gap", jnum(cv.relative_gap)},
                   {"consensus", evaluation_json(cv.consensus)}}}};
    return dump(doc);
}

std::string trend_json(const std::vector<TrendSummary>& summaries, const SweepResult& sweep,
                       const OutputMeta& meta) {
    json list = json::array();
    for (const TrendSummary& s : summaries) {
        json caps = json::array(), ws = json::array();
        for (double c : s.capacities) caps.push_back(jnum(c));
        for (double w : s.w_values) ws.push_back(jnum(w));
        list.push_back(json{{"speed_mm_s", jnum(s.speed_mm_s)},
                            {"accel_m_s2", jnum(s.accel_m_s2)},
                            {"mode", to_string(s.mode)},
                            {"classification", to_string(s.classification)},
                            {"capacities", caps},
                            {"w_values", ws},
                            {"w_min", jnum(s.w_min)},
                            {"w_last", jnum(s.w_last)}});
    }
    json doc{{"meta", meta_json(meta)},
             {"master_seed", sweep.master_seed},
             {"budget", sweep.budget},
             {"protocol", to_string(sweep.protocol)},
             {"load_inertia_kgcm2", jnum(sweep.load_inertia_kgcm2)},
             {"trends", list}};
    return dump(doc);
}

std::string catalog_report_json(const CatalogReport& report, const OutputMeta& meta) {
    json rows = json::array();
    for (const CatalogRowCheck& r : report.rows) {
        rows.push_back(json{{"id", r.id},
                            {"model", r.model},
                            {"inertia_ratio", jnum(r.ratio)},
                            {"capacity_Nm_per_kgcm2", jnum(r.capacity)},
                            {"declared_inertia_ratio", jnum(r.declared_ratio)},
                            {"declared_capacity_Nm_per_kgcm2", jnum(r.declared_capacity)},
                            {"ratio_deviation", jnum(r.ratio_deviation)},
                            {"capacity_deviation", jnum(r.capacity_deviation)},
                            {"consistent", r.ok()}});
    }
    json doc{{"meta", meta_json(meta)},
             {"load_inertia_kgcm2", jnum(report.load_inertia)},
             {"rows", rows},
             {"all_consistent", report.all_ok}};
    return dump(doc);
}

}  // namespace feeddrive
