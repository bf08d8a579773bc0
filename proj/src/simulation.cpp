#include "feeddrive/simulation.hpp"

#include <cmath>

namespace feeddrive {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw std::domain_error("dt must be > 0");
    if (!(settle_tail >= 0.0)) throw std::domain_error("settle_tail must be >= 0");
    if (encoder_counts_per_rev < 0)
        throw std::domain_error("encoder_counts_per_rev must be >= 0");
}

DivergenceError::DivergenceError(double t_blowup_s)
    : std::runtime_error("closed loop diverged at t = " + std::to_string(t_blowup_s) + " s"),
      blowup_time_(t_blowup_s) {}

bool check_divergence(double pos_actual_mm, double vel_actual_mm_s, double stroke_mm) {
    if (!std::isfinite(pos_actual_mm) || !std::isfinite(vel_actual_mm_s)) return true;
    const double bound = 100.0 * std::max(stroke_mm, 1.0);
    return std::abs(pos_actual_mm) > bound;
}

Trace run_closed_loop(const MechanicalParams& params, const ControlGains& gains,
                      const CommandTrajectory& trajectory, const SimConfig& config) {
    Trace trace;
    trace.dt = config.dt;
    trace.gains = gains;
    trace.params = params;
    const auto tail_steps = std::size_t(std::llround(config.settle_tail / config.dt));
    trace.samples.reserve(trajectory.samples.size() + tail_steps);

    const SimOutcome outcome = simulate_loop(
        params, gains, trajectory, config,
        [&trace](double t, double pos_cmd, double vel_cmd, double pos_actual, double vel_actual,
                 double torque_cmd, double torque_applied) {
            trace.samples.push_back(
                {t, pos_cmd, vel_cmd, pos_actual, vel_actual, torque_cmd, torque_applied});
        });
    if (outcome.diverged) throw DivergenceError(outcome.blowup_time);

    trace.final_state = outcome.final_state;
    trace.torque_impulse = outcome.torque_impulse;
    trace.abs_torque_impulse = outcome.abs_torque_impulse;
    return trace;
}

double momentum_residual_rel(const Trace& trace) {
    const double momentum = angular_momentum(trace.final_state, trace.params);
    const double defect = std::abs(momentum - trace.torque_impulse);
    const double scale = std::max(trace.abs_torque_impulse, 1e-12);
    return defect / scale;
}

FastRunResult run_for_metrics(const MechanicalParams& params, const ControlGains& gains,
                              const CommandTrajectory& trajectory, const SimConfig& config) {
    FastRunResult result;
    ErrorAccumulator acc;
    result.outcome = simulate_loop(
        params, gains, trajectory, config,
        [&acc](double, double pos_cmd, double vel_cmd, double pos_actual, double vel_actual,
               double, double) { acc.add(pos_cmd - pos_actual, vel_cmd - vel_actual); });
    if (!result.outcome.diverged) result.report = acc.finish();
    return result;
}

}  // namespace feeddrive
