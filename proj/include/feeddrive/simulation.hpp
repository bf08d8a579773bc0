#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "feeddrive/controller.hpp"
#include "feeddrive/metrics.hpp"
#include "feeddrive/motion.hpp"
#include "feeddrive/plant.hpp"

namespace feeddrive {

/// Runtime knobs for a closed-loop run.
struct SimConfig {
    double dt = 1e-4;                  ///< step size, s (must match the trajectory grid)
    double settle_tail = 0.2;          ///< extra time simulated holding the final command, s
    int encoder_counts_per_rev = 0;    ///< quadrature encoder lines; 0 = ideal feedback

    void validate() const;
};

/// One record of the closed-loop time series.
struct TraceSample {
    double t = 0.0;               ///< s
    double pos_cmd = 0.0;         ///< mm
    double vel_cmd = 0.0;         ///< mm/s
    double pos_actual = 0.0;      ///< mm (table, load side)
    double vel_actual = 0.0;      ///< mm/s
    double torque_cmd = 0.0;      ///< N·m, pre-saturation
    double torque_applied = 0.0;  ///< N·m, post-saturation
};

/// Full stored result of a closed-loop run.
struct Trace {
    double dt = 0.0;
    std::vector<TraceSample> samples;
    ControlGains gains;
    MechanicalParams params;
    PlantState final_state;           ///< plant state after the last step
    double torque_impulse = 0.0;      ///< ∫ torque_applied dt over the run, N·m·s
    double abs_torque_impulse = 0.0;  ///< ∫ |torque_applied| dt, scale for residual checks

    double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// Thrown when the closed loop blows up (non-finite state or runaway
/// position). Carries the time at which the guard tripped.
class DivergenceError : public std::runtime_error {
  public:
    explicit DivergenceError(double t_blowup_s);
    double blowup_time() const { return blowup_time_; }

  private:
    double blowup_time_;
};

/// True when a sample breaches the runaway guard: any non-finite value or a
/// position beyond 100× the commanded stroke.
bool check_divergence(double pos_actual_mm, double vel_actual_mm_s, double stroke_mm);

/// Outcome summary shared by the storing and streaming run paths.
struct SimOutcome {
    bool diverged = false;
    double blowup_time = 0.0;     ///< valid when diverged
    double duration = 0.0;        ///< total simulated time, s
    PlantState final_state;
    double torque_impulse = 0.0;      ///< ∫ torque_applied dt, N·m·s
    double abs_torque_impulse = 0.0;  ///< ∫ |torque_applied| dt, N·m·s
};

/// Relative defect of the momentum balance Jm·ωm + Jl·ωl = ∫T dt on a trace
/// started from rest: |p_final − impulse| / max(∫|T| dt, ε). Near machine
/// epsilon for a correct integrator because the coupling torque is internal.
double momentum_residual_rel(const Trace& trace);

/// Runs the closed loop sample by sample, feeding every record to
/// `observer(t, pos_cmd, vel_cmd, pos_actual, vel_actual, torque_cmd,
/// torque_applied)`. Stops early (with the outcome flagged) when the
/// divergence guard trips. This is the allocation-free path the tuner uses.
template <typename Observer>
SimOutcome simulate_loop(const MechanicalParams& params, const ControlGains& gains,
                         const CommandTrajectory& trajectory, const SimConfig& config,
                         Observer&& observer);

/// Runs the closed loop and stores the full time series.
/// Throws DivergenceError when the run blows up; the exception carries the
/// blow-up time so callers can report (or penalize) the unstable gains.
Trace run_closed_loop(const MechanicalParams& params, const ControlGains& gains,
                      const CommandTrajectory& trajectory, const SimConfig& config);

/// Streaming variant: runs the loop accumulating error statistics only.
/// Never throws on divergence — the outcome flag carries it instead.
struct FastRunResult {
    SimOutcome outcome;
    PerformanceReport report;  ///< valid only when !outcome.diverged
};
FastRunResult run_for_metrics(const MechanicalParams& params, const ControlGains& gains,
                              const CommandTrajectory& trajectory, const SimConfig& config);

// --- implementation of the template ---------------------------------------

namespace detail {

/// Rounds a load angle to the encoder's quadrature step; q = 0 disables.
inline double quantize_angle(double theta, double q) {
    if (q <= 0.0) return theta;
    return std::nearbyint(theta / q) * q;
}

}  // namespace detail

template <typename Observer>
SimOutcome simulate_loop(const MechanicalParams& params, const ControlGains& gains,
                         const CommandTrajectory& trajectory, const SimConfig& config,
                         Observer&& observer) {
    params.validate();
    gains.validate();
    config.validate();
    if (trajectory.samples.empty()) throw std::domain_error("trajectory is empty");
    if (std::abs(trajectory.dt - config.dt) > 1e-12 * config.dt)
        throw std::domain_error("trajectory dt does not match simulation dt");

    const double dt = config.dt;
    const auto tail_steps = std::size_t(std::llround(config.settle_tail / dt));
    const std::size_t total = trajectory.samples.size() + tail_steps;
    const double quantum =
        config.encoder_counts_per_rev > 0
            ? 2.0 * std::numbers::pi / (4.0 * double(config.encoder_counts_per_rev))
            : 0.0;

    SimOutcome out;
    PlantState state;  // rest at zero
    ControllerState ctl;
    double prev_theta_fb = 0.0;

    for (std::size_t k = 0; k < total; ++k) {
        const double t = double(k) * dt;
        const CommandSample& cmd = k < trajectory.samples.size() ? trajectory.samples[k]
                                                                 : trajectory.samples.back();

        // Load-side feedback, optionally quantized like a quadrature encoder.
        // Quantized velocity comes from differencing the quantized angle, the
        // way a drive would estimate speed from counts.
        double pos_fb;
        double vel_fb;
        if (quantum > 0.0) {
            const double theta_fb = detail::quantize_angle(state.theta_l, quantum);
            pos_fb = params.drive_coeff * theta_fb;
            vel_fb = params.drive_coeff * (theta_fb - prev_theta_fb) / dt;
            prev_theta_fb = theta_fb;
        } else {
            pos_fb = params.drive_coeff * state.theta_l;
            vel_fb = params.drive_coeff * state.omega_l;
        }

        const ControlOutput u = control_step(gains, ctl, cmd.position, cmd.velocity, pos_fb,
                                             vel_fb, dt, params);

        observer(t, cmd.position, cmd.velocity, params.drive_coeff * state.theta_l,
                 params.drive_coeff * state.omega_l, u.torque_command, u.torque_applied);

        state = step_rk4(state, u.torque_applied, dt, params);
        out.torque_impulse += u.torque_applied * dt;
        out.abs_torque_impulse += std::abs(u.torque_applied) * dt;

        const double pos_now = params.drive_coeff * state.theta_l;
        const double vel_now = params.drive_coeff * state.omega_l;
        if (!state.finite() || check_divergence(pos_now, vel_now, trajectory.stroke)) {
            out.diverged = true;
            out.blowup_time = t + dt;
            out.duration = t + dt;
            out.final_state = state;
            return out;
        }
    }

    out.duration = double(total) * dt;
    out.final_state = state;
    return out;
}

}  // namespace feeddrive
