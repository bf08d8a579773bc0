#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feeddrive/catalog.hpp"
#include "feeddrive/tuning.hpp"

namespace feeddrive {

enum class ConstraintMode { unconstrained, constrained };
const char* to_string(ConstraintMode mode);

/// How the two constraint modes of a cell relate:
///  - shared_pool: one evaluated candidate set per cell feeds both modes;
///    the unconstrained row takes the pool's best raw tracking score, the
///    constrained row the best among margin-feasible candidates. This makes
///    "constrained never beats unconstrained" an exact invariant.
///  - independent: each mode runs its own searches on its own objective;
///    cross-mode comparisons are then trends, not invariants.
enum class SweepProtocol { shared_pool, independent };
const char* to_string(SweepProtocol protocol);

/// The speed x acceleration test matrix, all run on the same stroke.
struct ProcessGrid {
    std::vector<double> speeds_mm_s = {100.0, 200.0, 400.0};
    std::vector<double> accels_m_s2 = {1.0, 2.0, 5.0};
    double stroke_mm = 200.0;
    int cycles = 1;
    double dwell_s = 0.2;

    void validate() const;
    std::size_t cells() const { return speeds_mm_s.size() * accels_m_s2.size(); }
};

struct SweepOptions {
    std::size_t budget = 3000;  ///< evaluations per (motor, process) cell; in
                                ///< independent mode, per cell per mode
    SweepProtocol protocol = SweepProtocol::shared_pool;
    std::vector<ConstraintMode> modes = {ConstraintMode::unconstrained,
                                         ConstraintMode::constrained};
    std::size_t threads = 1;     ///< worker pool across cells
    double cv_tolerance = 0.05;  ///< optimizer agreement threshold
    SimConfig sim;
    FireworksOptions fwa;
    IslandGaOptions ga;
};

/// One (motor, process, mode) outcome.
struct SweepRow {
    std::string motor_id;
    std::string motor_model;
    double speed_mm_s = 0.0;
    double accel_m_s2 = 0.0;
    double capacity_rotor = 0.0;  ///< T/(Jm+Jl), N·m per kg·cm²
    double capacity_table = 0.0;  ///< rotor capacity x drive coefficient
    double inertia_ratio = 0.0;   ///< Jl/Jm
    ConstraintMode mode = ConstraintMode::unconstrained;
    ControlGains gains;
    double w = 0.0;
    double max_err_p = 0.0;
    double max_err_v = 0.0;
    double vars_v = 0.0;
    double gain_margin_db = 0.0;
    double phase_margin_deg = 0.0;
    double resonance_peak = 0.0;
    bool feasible = false;   ///< margins of the selected gains
    bool diverged = false;   ///< selected candidate's simulation blew up
    bool fallback = false;   ///< constrained cell had no feasible candidate
    bool cv_agree = false;   ///< fireworks and GA winners within tolerance
    double cv_gap = 0.0;
    std::uint64_t seed = 0;  ///< per-cell seed derived from the master seed
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< motor-major, then speed, accel, mode
    std::uint64_t master_seed = 0;
    std::size_t budget = 0;
    SweepProtocol protocol = SweepProtocol::shared_pool;
    double load_inertia_kgcm2 = 0.0;
};

/// Tunes every (motor x process) cell and reports one row per requested
/// constraint mode. Deterministic for a fixed master seed regardless of
/// thread count; per-cell failures are recorded in-row, never thrown.
SweepResult run_sweep(const std::vector<MotorSpec>& catalog, const MechanicalParams& mech,
                      const ProcessGrid& grid, const SweepOptions& options,
                      std::uint64_t master_seed);

/// Fractional performance cost of requiring stability:
/// (W_stable - W_unstable) / W_unstable. Throws when W_unstable <= 0.
double relative_change(double w_stable, double w_unstable);

enum class TrendClass {
    improving_then_flat,  ///< falls, then settles within the flatness band
    interior_minimum,     ///< falls, bottoms out, degrades past the band
    monotone,             ///< never leaves one direction (constants included)
    irregular,
    inconclusive,  ///< fewer than 3 points
};
const char* to_string(TrendClass c);

/// W-versus-capacity shape for one (speed, acceleration, mode) series.
struct TrendSummary {
    double speed_mm_s = 0.0;
    double accel_m_s2 = 0.0;
    ConstraintMode mode = ConstraintMode::unconstrained;
    std::vector<double> capacities;  ///< ascending
    std::vector<double> w_values;    ///< same order
    TrendClass classification = TrendClass::inconclusive;
    double w_min = 0.0;
    double w_last = 0.0;
};

/// Relative band within which W values count as "flat".
inline constexpr double kTrendFlatBand = 0.10;

/// Classifies one W series ordered by ascending capacity.
TrendClass classify_trend(const std::vector<double>& w, double band = kTrendFlatBand);

/// Groups sweep rows per (speed, acceleration, mode), orders each group by
/// capacity, and classifies the W curve.
std::vector<TrendSummary> trend_report(const SweepResult& sweep);

}  // namespace feeddrive
