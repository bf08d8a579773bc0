#pragma once

#include <limits>
#include <string>
#include <vector>

#include "feeddrive/plant.hpp"

namespace feeddrive {

/// One servo motor as listed on a sizing sheet. Declared ratio/capacity are
/// the sheet's own (rounded) numbers; NaN means the sheet omits the column.
struct MotorSpec {
    std::string id;
    std::string model;
    double max_torque = 0.0;     ///< N·m
    double rotor_inertia = 0.0;  ///< kg·cm²
    double rated_power = 0.0;    ///< kW; 0 = unspecified
    double declared_ratio = std::numeric_limits<double>::quiet_NaN();
    double declared_capacity = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
};

/// Load-to-rotor inertia ratio r = Jl/Jm, both in kg·cm².
double inertia_ratio(const MotorSpec& motor, double load_inertia_kgcm2);

/// Acceleration capacity written in terms of the inertia ratio:
/// (T/Jm)/(r+1). Algebraically identical to T/(Jm+Jl) when r = Jl/Jm.
double capacity_from_ratio(double torque_over_jm, double r);

/// Copies the shared mechanism (stiffness, damping, load inertia, drive
/// coefficient) and installs this motor's rotor inertia and torque limit.
MechanicalParams instantiate_motor(const MechanicalParams& mech_template,
                                   const MotorSpec& motor);

/// Per-row recomputation of the sizing-sheet columns.
struct CatalogRowCheck {
    std::string id;
    std::string model;
    double ratio = 0.0;               ///< recomputed Jl/Jm
    double capacity = 0.0;            ///< recomputed T/(Jm+Jl), N·m per kg·cm²
    double declared_ratio = 0.0;      ///< NaN when the sheet omits it
    double declared_capacity = 0.0;   ///< NaN when the sheet omits it
    double ratio_deviation = 0.0;     ///< 0 when not declared
    double capacity_deviation = 0.0;  ///< 0 when not declared
    bool ratio_ok = true;
    bool capacity_ok = true;

    bool ok() const { return ratio_ok && capacity_ok; }
};

struct CatalogReport {
    double load_inertia = 0.0;  ///< kg·cm²
    std::vector<CatalogRowCheck> rows;
    bool all_ok = true;
};

/// Deviation allowed between a recomputed column and the sheet's printed
/// value before the row is flagged.
inline constexpr double kCatalogFlagThreshold = 0.015;

/// Recomputes ratio and capacity for every motor and compares against the
/// declared columns. Printed values are rounded (ratio to 1 decimal,
/// capacity to 2), so the deviation of a column is the smaller of the raw
/// difference and the difference after rounding the recomputed value to the
/// sheet's precision.
CatalogReport validate_catalog(const std::vector<MotorSpec>& catalog,
                               double load_inertia_kgcm2);

/// The six-motor set used for the simulation sweep (shared load 45.5 kg·cm²).
std::vector<MotorSpec> reference_catalog();

/// The three-motor set used on the experimental bench (shared load 48 kg·cm²).
std::vector<MotorSpec> experiment_catalog();

/// Shared mechanism template: stiffness 612 N·m/rad, damping 0.0288 N·m·s/rad,
/// load inertia 45.5 kg·cm², drive coefficient 10/2π mm/rad. Torque and rotor
/// inertia are placeholders replaced by instantiate_motor.
MechanicalParams reference_mechanism();

}  // namespace feeddrive
