#pragma once

#include "feeddrive/plant.hpp"

namespace feeddrive {

/// Gains for the cascaded position/velocity controller.
///
/// The position loop is proportional-only and outputs a velocity reference;
/// the velocity loop is PI and outputs a torque command. A scaled command
/// velocity is fed forward past the position loop.
struct ControlGains {
    double kp = 0.0;   ///< position loop gain [1/s]
    double kvp = 0.0;  ///< velocity loop proportional gain [N·m·s/rad]
    double kvi = 0.0;  ///< velocity loop integral gain [N·m/rad]
    double kfv = 0.0;  ///< velocity feedforward fraction, 0 = off, 1 = full

    void validate() const;
};

/// Persistent controller state between steps.
struct ControllerState {
    double velocity_integrator = 0.0;  ///< accumulated velocity error [rad]
};

/// Result of one control update.
struct ControlOutput {
    double torque_command = 0.0;  ///< raw PI output before saturation [N·m]
    double torque_applied = 0.0;  ///< command clamped to the actuator limit [N·m]
};

/// Runs one controller update.
///
/// Commands and feedback both arrive in table coordinates (mm, mm/s) and are
/// converted to rotary coordinates through the drive coefficient. Feedback is
/// measured on the load side of the transmission.
///
/// Integrator windup is suppressed conditionally: when the raw torque command
/// exceeds the actuator limit the integrator only keeps accumulating if the
/// current velocity error is actively driving the command back toward the
/// linear range.
ControlOutput control_step(const ControlGains& gains, ControllerState& state,
                           double position_cmd_mm, double velocity_cmd_mm_s,
                           double position_fb_mm, double velocity_fb_mm_s, double dt_s,
                           const MechanicalParams& params);

}  // namespace feeddrive
