#pragma once

#include <cstddef>

namespace feeddrive {

/// Physical constants of the axis: motor rotor and reflected load coupled by
/// the torsional stiffness of the screw. All values in SI base units
/// (kg·m², N·m/rad, N·m·s/rad); the drive coefficient is mm per radian of
/// screw rotation, so table positions stay in millimetres.
struct MechanicalParams {
    double stiffness = 0.0;      ///< torsional screw stiffness, N·m/rad
    double motor_inertia = 0.0;  ///< rotor inertia, kg·m²
    double load_inertia = 0.0;   ///< reflected load inertia, kg·m²
    double damping = 0.0;        ///< transmission damping across the coupling, N·m·s/rad
    double drive_coeff = 0.0;    ///< table displacement per screw radian, mm/rad
    double max_torque = 0.0;     ///< motor torque limit, N·m

    double total_inertia() const { return motor_inertia + load_inertia; }

    /// Throws std::domain_error unless K, Jm, Jl, R, Tmax > 0 and B >= 0.
    void validate() const;

    /// Builds SI params from catalog-style inputs (inertias in kg·cm²).
    static MechanicalParams from_catalog(double stiffness_nm_per_rad,
                                         double motor_inertia_kgcm2,
                                         double load_inertia_kgcm2,
                                         double damping_nms_per_rad,
                                         double drive_coeff_mm_per_rad,
                                         double max_torque_nm);
};

/// Rigid-body state of the two-inertia train. Table position (mm) is
/// drive_coeff * theta_l, table velocity (mm/s) is drive_coeff * omega_l.
struct PlantState {
    double theta_m = 0.0;  ///< motor angle, rad
    double omega_m = 0.0;  ///< motor angular velocity, rad/s
    double theta_l = 0.0;  ///< load-side angle, rad
    double omega_l = 0.0;  ///< load-side angular velocity, rad/s

    bool finite() const;
};

double saturate_torque(double commanded_torque, const MechanicalParams& params);

/// Time derivative of the plant state under an (already saturated) torque.
/// Coupling torque K(θm−θl) + B(ωm−ωl) acts between the two inertias, so it
/// cancels in the total angular momentum balance.
PlantState state_derivative(const PlantState& state, double applied_torque,
                            const MechanicalParams& params);

/// Classical fourth-order Runge-Kutta step with the torque held constant
/// over the step (zero-order hold).
PlantState step_rk4(const PlantState& state, double applied_torque, double dt,
                    const MechanicalParams& params);

/// T/(Jm+Jl) in catalog units (N·m per kg·cm²), the rotor-side
/// acceleration capacity used to rank motor/load pairings.
double acceleration_capacity(double max_torque_nm, double motor_inertia_kgcm2,
                             double load_inertia_kgcm2);

/// Rotor-side capacity scaled to the table by the drive coefficient.
double table_acceleration_capacity(double max_torque_nm, double motor_inertia_kgcm2,
                                   double load_inertia_kgcm2,
                                   double drive_coeff_mm_per_rad);

/// Undamped resonance of the two-inertia mode, sqrt(K·(Jm+Jl)/(Jm·Jl)), rad/s.
double resonance_frequency(const MechanicalParams& params);

/// Kinetic plus coupling strain energy, J. Non-increasing under zero torque
/// when damping is non-negative.
double total_energy(const PlantState& state, const MechanicalParams& params);

/// Total angular momentum Jm·ωm + Jl·ωl, N·m·s.
double angular_momentum(const PlantState& state, const MechanicalParams& params);

}  // namespace feeddrive
