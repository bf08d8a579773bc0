#include "feeddrive/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feeddrive/units.hpp"

namespace feeddrive {

void MechanicalParams::validate() const {
    if (!(stiffness > 0.0)) throw std::domain_error("stiffness must be > 0");
    if (!(motor_inertia > 0.0)) throw std::domain_error("motor_inertia must be > 0");
    if (!(load_inertia > 0.0)) throw std::domain_error("load_inertia must be > 0");
    if (!(damping >= 0.0)) throw std::domain_error("damping must be >= 0");
    if (!(drive_coeff > 0.0)) throw std::domain_error("drive_coeff must be > 0");
    if (!(max_torque > 0.0)) throw std::domain_error("max_torque must be > 0");
}

MechanicalParams MechanicalParams::from_catalog(double stiffness_nm_per_rad,
                                                double motor_inertia_kgcm2,
                                                double load_inertia_kgcm2,
                                                double damping_nms_per_rad,
                                                double drive_coeff_mm_per_rad,
                                                double max_torque_nm) {
    MechanicalParams p;
    p.stiffness = stiffness_nm_per_rad;
    p.motor_inertia = motor_inertia_kgcm2 * kKgcm2ToKgm2;
    p.load_inertia = load_inertia_kgcm2 * kKgcm2ToKgm2;
    p.damping = damping_nms_per_rad;
    p.drive_coeff = drive_coeff_mm_per_rad;
    p.max_torque = max_torque_nm;
    p.validate();
    return p;
}

bool PlantState::finite() const {
    return std::isfinite(theta_m) && std::isfinite(omega_m) && std::isfinite(theta_l) &&
           std::isfinite(omega_l);
}

double saturate_torque(double commanded_torque, const MechanicalParams& params) {
    return std::clamp(commanded_torque, -params.max_torque, params.max_torque);
}

PlantState state_derivative(const PlantState& state, double applied_torque,
                            const MechanicalParams& params) {
    const double coupling = params.stiffness * (state.theta_m - state.theta_l) +
                            params.damping * (state.omega_m - state.omega_l);
    PlantState rate;
    rate.theta_m = state.omega_m;
    rate.omega_m = (applied_torque - coupling) / params.motor_inertia;
    rate.theta_l = state.omega_l;
    rate.omega_l = coupling / params.load_inertia;
    return rate;
}

namespace {

PlantState axpy(const PlantState& s, const PlantState& r, double h) {
    return {s.theta_m + h * r.theta_m, s.omega_m + h * r.omega_m, s.theta_l + h * r.theta_l,
            s.omega_l + h * r.omega_l};
}

}  // namespace

PlantState step_rk4(const PlantState& state, double applied_torque, double dt,
                    const MechanicalParams& params) {
    const PlantState k1 = state_derivative(state, applied_torque, params);
    const PlantState k2 = state_derivative(axpy(state, k1, 0.5 * dt), applied_torque, params);
    const PlantState k3 = state_derivative(axpy(state, k2, 0.5 * dt), applied_torque, params);
    const PlantState k4 = state_derivative(axpy(state, k3, dt), applied_torque, params);
    const double h = dt / 6.0;
    return {state.theta_m + h * (k1.theta_m + 2.0 * k2.theta_m + 2.0 * k3.theta_m + k4.theta_m),
            state.omega_m + h * (k1.omega_m + 2.0 * k2.omega_m + 2.0 * k3.omega_m + k4.omega_m),
            state.theta_l + h * (k1.theta_l + 2.0 * k2.theta_l + 2.0 * k3.theta_l + k4.theta_l),
            state.omega_l + h * (k1.omega_l + 2.0 * k2.omega_l + 2.0 * k3.omega_l + k4.omega_l)};
}

double acceleration_capacity(double max_torque_nm, double motor_inertia_kgcm2,
                             double load_inertia_kgcm2) {
    if (!(motor_inertia_kgcm2 > 0.0) || !(load_inertia_kgcm2 > 0.0))
        throw std::domain_error("inertias must be > 0");
    return max_torque_nm / (motor_inertia_kgcm2 + load_inertia_kgcm2);
}

double table_acceleration_capacity(double max_torque_nm, double motor_inertia_kgcm2,
                                   double load_inertia_kgcm2, double drive_coeff_mm_per_rad) {
    return acceleration_capacity(max_torque_nm, motor_inertia_kgcm2, load_inertia_kgcm2) *
           drive_coeff_mm_per_rad;
}

double resonance_frequency(const MechanicalParams& params) {
    params.validate();
    return std::sqrt(params.stiffness * params.total_inertia() /
                     (params.motor_inertia * params.load_inertia));
}

double total_energy(const PlantState& state, const MechanicalParams& params) {
    const double twist = state.theta_m - state.theta_l;
    return 0.5 * params.motor_inertia * state.omega_m * state.omega_m +
           0.5 * params.load_inertia * state.omega_l * state.omega_l +
           0.5 * params.stiffness * twist * twist;
}

double angular_momentum(const PlantState& state, const MechanicalParams& params) {
    return params.motor_inertia * state.omega_m + params.load_inertia * state.omega_l;
}

}  // namespace feeddrive
