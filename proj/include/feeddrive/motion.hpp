#pragma once

#include <cstddef>
#include <vector>

namespace feeddrive {

/// Trapezoidal velocity plan for a single stroke. When the stroke is too
/// short to reach the cruise velocity the plan degenerates to a triangular
/// profile peaking at sqrt(a·distance).
struct MotionProfile {
    double distance = 0.0;         ///< stroke length, mm
    double cruise_velocity = 0.0;  ///< requested cruise velocity, mm/s
    double acceleration = 0.0;     ///< accel/decel magnitude, mm/s²
    double t1 = 0.0;               ///< end of acceleration, s
    double t2 = 0.0;               ///< end of cruise, s (== t1 for triangular)
    double t3 = 0.0;               ///< end of motion, s
    double peak_velocity = 0.0;    ///< velocity actually reached, mm/s
    bool triangular = false;
};

struct CommandSample {
    double position = 0.0;      ///< mm
    double velocity = 0.0;      ///< mm/s
    double acceleration = 0.0;  ///< mm/s²
};

/// Position/velocity/acceleration commands sampled on the simulation grid.
struct CommandTrajectory {
    double dt = 0.0;
    std::vector<CommandSample> samples;
    std::vector<std::size_t> stroke_markers;  ///< sample indices where a reversal begins
    double stroke = 0.0;                      ///< per-stroke travel, mm

    double duration() const { return samples.empty() ? 0.0 : dt * double(samples.size() - 1); }
};

/// Splits a stroke into acceleration, cruise and deceleration phases.
/// Throws std::domain_error on non-positive inputs.
MotionProfile plan(double distance_mm, double cruise_velocity_mm_s, double acceleration_mm_s2);

/// Piecewise evaluation of the profile; holds (distance, 0, 0) after t3.
CommandSample sample(const MotionProfile& profile, double t);

/// Forward stroke, dwell, mirrored return stroke, dwell, repeated `cycles`
/// times, sampled every dt. The command returns to position 0 at the end.
CommandTrajectory reciprocate(const MotionProfile& profile, int cycles, double dwell_s,
                              double dt_s);

}  // namespace feeddrive
