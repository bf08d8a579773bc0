#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "feeddrive/controller.hpp"
#include "feeddrive/plant.hpp"
#include "feeddrive/transfer_function.hpp"

namespace feeddrive {

/// Logarithmically spaced angular-frequency grid, rad/s.
struct FrequencyGrid {
    std::vector<double> omega;

    static FrequencyGrid log_spaced(double omega_min, double omega_max, std::size_t count);

    /// Default analysis grid: 2000 points over 1e-1 … 1e5 rad/s, two decades
    /// of headroom above the drive-train resonance.
    static FrequencyGrid standard() { return log_spaced(1e-1, 1e5, 2000); }
};

/// One row of Bode data (phase unwrapped along the grid).
struct BodePoint {
    double omega = 0.0;         ///< rad/s
    double magnitude_db = 0.0;  ///< 20·log10|H|
    double phase_deg = 0.0;     ///< unwrapped
};

/// Loop-stability summary per the feasibility rule
/// Am > 6 dB ∧ Pm > 30° ∧ Mr < 1.4 (all strict).
struct StabilityReport {
    double gain_margin_db = 0.0;        ///< +∞ when the phase never crosses −180°
    double phase_margin_deg = 0.0;      ///< +∞ when the gain never crosses 0 dB
    double resonance_peak = 0.0;        ///< closed-loop peak / DC magnitude; +∞ if unstable
    double gain_crossover_rad_s = 0.0;  ///< 0 when absent
    double phase_crossover_rad_s = 0.0; ///< 0 when absent
    bool closed_loop_stable = false;
    bool feasible = false;
};

/// Per-constraint violation magnitudes, 0 when satisfied.
struct ConstraintCheck {
    bool feasible = false;
    double violation_gain_margin = 0.0;   ///< max(0, (6 − Am)/6)
    double violation_phase_margin = 0.0;  ///< max(0, (30 − Pm)/30)
    double violation_resonance = 0.0;     ///< max(0, (Mr − 1.4)/1.4)
};

/// Torque → load angular velocity transfer of the two-inertia train.
TransferFunction velocity_plant(const MechanicalParams& params);

/// PI velocity compensator kvp + kvi/s.
TransferFunction velocity_controller(const ControlGains& gains);

/// Open position-loop transfer kp·G_v(s)/s, where G_v is the closed
/// velocity loop. The loop is broken at the position-feedback summing
/// junction; feedforward and saturation are excluded (small-signal).
TransferFunction open_position_loop(const MechanicalParams& params, const ControlGains& gains);

/// Closed command → position transfer L/(1+L) with exact origin
/// pole/zero cancellations removed.
TransferFunction closed_position_loop(const MechanicalParams& params, const ControlGains& gains);

/// Evaluates the open position loop over the grid.
std::vector<std::complex<double>> loop_response(const MechanicalParams& params,
                                                const ControlGains& gains,
                                                const FrequencyGrid& grid);

/// Magnitude/phase rows for a response, with the phase unwrapped so margin
/// interpolation never jumps across branch cuts.
std::vector<BodePoint> bode_points(const FrequencyGrid& grid,
                                   const std::vector<std::complex<double>>& response);

/// Classical margins read from a loop response. Crossings are located by
/// log-linear interpolation between grid points; with several crossings the
/// smallest margin of each kind is reported; with none the margin is +∞.
/// Throws std::domain_error when fewer than 2 points are supplied.
struct MarginReport {
    double gain_margin_db = 0.0;
    double phase_margin_deg = 0.0;
    double gain_crossover_rad_s = 0.0;
    double phase_crossover_rad_s = 0.0;
};
MarginReport margins(const FrequencyGrid& grid,
                     const std::vector<std::complex<double>>& response);

/// Peak closed-loop magnitude over the grid relative to the magnitude at the
/// lowest grid frequency (the DC proxy for the type-1 loop).
struct ResonancePeak {
    double mr = 0.0;
    bool closed_loop_stable = false;
};
ResonancePeak resonance_peak(const MechanicalParams& params, const ControlGains& gains,
                             const FrequencyGrid& grid);

/// Relative peak of an arbitrary transfer function over a grid (peak
/// magnitude / magnitude at the first grid point). Stability is not checked.
double relative_peak(const TransferFunction& tf, const FrequencyGrid& grid);

/// Full small-signal stability analysis: margins of the open position loop,
/// closed-loop resonance peak, and the feasibility verdict.
StabilityReport stability_report(const MechanicalParams& params, const ControlGains& gains,
                                 const FrequencyGrid& grid);

/// Applies the feasibility rule to a report and quantifies violations.
ConstraintCheck check_constraints(const StabilityReport& report);

}  // namespace feeddrive
