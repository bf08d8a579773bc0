#include "feeddrive/motion.hpp"

#include <cmath>
#include <stdexcept>

namespace feeddrive {

MotionProfile plan(double distance_mm, double cruise_velocity_mm_s, double acceleration_mm_s2) {
    if (!(distance_mm > 0.0)) throw std::domain_error("distance must be > 0");
    if (!(cruise_velocity_mm_s > 0.0)) throw std::domain_error("cruise velocity must be > 0");
    if (!(acceleration_mm_s2 > 0.0)) throw std::domain_error("acceleration must be > 0");

    MotionProfile p;
    p.distance = distance_mm;
    p.cruise_velocity = cruise_velocity_mm_s;
    p.acceleration = acceleration_mm_s2;

    const double ramp_distance = cruise_velocity_mm_s * cruise_velocity_mm_s / acceleration_mm_s2;
    if (ramp_distance <= distance_mm) {
        // Full trapezoid: s_a = ½at1², cruise covers the remainder, symmetric ramp down.
        p.triangular = false;
        p.peak_velocity = cruise_velocity_mm_s;
        p.t1 = cruise_velocity_mm_s / acceleration_mm_s2;
        const double cruise_distance = distance_mm - ramp_distance;
        p.t2 = p.t1 + cruise_distance / cruise_velocity_mm_s;
        p.t3 = p.t2 + p.t1;
    } else {
        p.triangular = true;
        p.peak_velocity = std::sqrt(acceleration_mm_s2 * distance_mm);
        p.t1 = p.peak_velocity / acceleration_mm_s2;
        p.t2 = p.t1;
        p.t3 = 2.0 * p.t1;
    }
    return p;
}

CommandSample sample(const MotionProfile& p, double t) {
    if (t <= 0.0) return {0.0, 0.0, p.acceleration};
    if (t <= p.t1) {
        return {0.5 * p.acceleration * t * t, p.acceleration * t, p.acceleration};
    }
    if (t <= p.t2) {
        const double ramp = 0.5 * p.acceleration * p.t1 * p.t1;
        return {ramp + p.peak_velocity * (t - p.t1), p.peak_velocity, 0.0};
    }
    if (t < p.t3) {
        // Anchored to the endpoint so position lands on `distance` exactly.
        const double remain = p.t3 - t;
        return {p.distance - 0.5 * p.acceleration * remain * remain, p.acceleration * remain,
                -p.acceleration};
    }
    return {p.distance, 0.0, 0.0};
}

CommandTrajectory reciprocate(const MotionProfile& profile, int cycles, double dwell_s,
                              double dt_s) {
    if (cycles < 1) throw std::domain_error("cycles must be >= 1");
    if (!(dt_s > 0.0)) throw std::domain_error("dt must be > 0");
    if (!(dwell_s >= 0.0)) throw std::domain_error("dwell must be >= 0");

    const double cycle_time = 2.0 * (profile.t3 + dwell_s);
    const double total_time = cycle_time * double(cycles);
    const auto count = std::size_t(std::llround(total_time / dt_s)) + 1;

    CommandTrajectory traj;
    traj.dt = dt_s;
    traj.stroke = profile.distance;
    traj.samples.reserve(count);

    const double half_cycle = profile.t3 + dwell_s;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = double(k) * dt_s;
        auto cycle = std::size_t(t / cycle_time);
        if (cycle >= std::size_t(cycles)) cycle = std::size_t(cycles) - 1;
        const double u = t - double(cycle) * cycle_time;
        CommandSample s;
        if (u < half_cycle) {
            s = sample(profile, u);  // forward stroke then dwell at `distance`
        } else {
            s = sample(profile, u - half_cycle);
            s.position = profile.distance - s.position;
            s.velocity = -s.velocity;
            s.acceleration = -s.acceleration;
        }
        traj.samples.push_back(s);
    }

    for (int c = 0; c < cycles; ++c) {
        const double mid = double(c) * cycle_time + half_cycle;
        traj.stroke_markers.push_back(std::size_t(std::llround(mid / dt_s)));
        if (c + 1 < cycles) {
            const double next = double(c + 1) * cycle_time;
            traj.stroke_markers.push_back(std::size_t(std::llround(next / dt_s)));
        }
    }
    return traj;
}

}  // namespace feeddrive
