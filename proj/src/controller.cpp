#include "feeddrive/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace feeddrive {

void ControlGains::validate() const {
    if (!(kp >= 0.0) || !std::isfinite(kp)) throw std::domain_error("kp must be >= 0 and finite");
    if (!(kvp >= 0.0) || !std::isfinite(kvp))
        throw std::domain_error("kvp must be >= 0 and finite");
    if (!(kvi >= 0.0) || !std::isfinite(kvi))
        throw std::domain_error("kvi must be >= 0 and finite");
    if (!(kfv >= 0.0 && kfv <= 1.0)) throw std::domain_error("kfv must be in [0, 1]");
}

ControlOutput control_step(const ControlGains& gains, ControllerState& state,
                           double position_cmd_mm, double velocity_cmd_mm_s,
                           double position_fb_mm, double velocity_fb_mm_s, double dt_s,
                           const MechanicalParams& params) {
    const double r = params.drive_coeff;
    const double theta_cmd = position_cmd_mm / r;
    const double omega_cmd = velocity_cmd_mm_s / r;
    const double theta_fb = position_fb_mm / r;
    const double omega_fb = velocity_fb_mm_s / r;

    const double velocity_ref = gains.kp * (theta_cmd - theta_fb) + gains.kfv * omega_cmd;
    const double velocity_error = velocity_ref - omega_fb;

    ControlOutput out;
    out.torque_command = gains.kvp * velocity_error + gains.kvi * state.velocity_integrator;
    out.torque_applied = saturate_torque(out.torque_command, params);

    // Conditional anti-windup: freeze the integrator while saturated unless
    // the error is pushing the command back toward the linear range.
    const bool saturated = std::abs(out.torque_command) > params.max_torque;
    const bool unwinding = velocity_error * out.torque_command < 0.0;
    if (!saturated || unwinding) {
        state.velocity_integrator += velocity_error * dt_s;
    }
    return out;
}

}  // namespace feeddrive
