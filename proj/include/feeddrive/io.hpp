#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "feeddrive/catalog.hpp"
#include "feeddrive/frequency.hpp"
#include "feeddrive/motion.hpp"
#include "feeddrive/simulation.hpp"
#include "feeddrive/sweep.hpp"
#include "feeddrive/tuning.hpp"

namespace feeddrive {

inline constexpr const char* kToolName = "feeddrive";
inline constexpr const char* kToolVersion = "1.0.0";

/// Provenance stamped at the top of every output file. No timestamps — two
/// runs with the same inputs must produce byte-identical files.
struct OutputMeta {
    std::string command;        ///< the invocation, reconstructed from argv
    std::string seed = "-";     ///< decimal seed, or "-" for non-random outputs
    std::string config_digest;  ///< 16-hex FNV-1a of the canonical config
};

/// %.9g decimal text; non-finite values become "inf", "-inf", "nan".
std::string format_number(double v);

/// Writes the comment header: tool version, command, seed, config digest,
/// then the column list. Data rows follow.
void write_header(std::ostream& out, const OutputMeta& meta, const std::string& columns);

/// columns: t_s,position_cmd_mm,velocity_cmd_mm_s,acceleration_cmd_mm_s2
void write_trajectory_csv(std::ostream& out, const CommandTrajectory& trajectory,
                          const OutputMeta& meta);

/// columns: t_s,position_cmd_mm,velocity_cmd_mm_s,position_mm,velocity_mm_s,
///          torque_cmd_Nm,torque_applied_Nm
void write_trace_csv(std::ostream& out, const Trace& trace, const OutputMeta& meta);

/// columns: generation,best_w
void write_history_csv(std::ostream& out, const OptimizerResult& result,
                       const OutputMeta& meta);

/// columns: omega_rad_s,magnitude_db,phase_deg
void write_bode_csv(std::ostream& out, const std::vector<BodePoint>& points,
                    const OutputMeta& meta);

/// One row per (motor, process, mode); columns documented in the header line.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const OutputMeta& meta);

/// Per-(speed, accel, mode) files "wcurve_v{speed}_a{accel}_{mode}.csv" with
/// capacity/W columns ordered by capacity, ready for external plotting.
/// Returns the paths written.
std::vector<std::string> write_plotdata(const std::string& directory, const SweepResult& sweep,
                                        const OutputMeta& meta);

// --- JSON documents (returned as text; numbers carry 9 significant digits,
// --- non-finite values are the strings "inf"/"-inf"/"nan") ----------------

std::string profile_json(const MotionProfile& profile, const OutputMeta& meta);
std::string metrics_json(const PerformanceReport& performance, const StabilityReport& stability,
                         const OutputMeta& meta);
std::string stability_json(const StabilityReport& report, const OutputMeta& meta);
std::string tune_json(const TuneResult& result, const OutputMeta& meta);
std::string tune_pair_json(const TuneResult& fireworks, const TuneResult& island_ga,
                           const CrossValidation& cv, const OutputMeta& meta);
std::string trend_json(const std::vector<TrendSummary>& summaries, const SweepResult& sweep,
                       const OutputMeta& meta);
std::string catalog_report_json(const CatalogReport& report, const OutputMeta& meta);

}  // namespace feeddrive
