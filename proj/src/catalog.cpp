#include "feeddrive/catalog.hpp"

#include <cmath>
#include <stdexcept>

#include "feeddrive/units.hpp"

namespace feeddrive {

void MotorSpec::validate() const {
    if (!(max_torque > 0.0) || !std::isfinite(max_torque))
        throw std::domain_error("motor '" + id + "': max torque must be positive");
    if (!(rotor_inertia > 0.0) || !std::isfinite(rotor_inertia))
        throw std::domain_error("motor '" + id + "': rotor inertia must be positive");
    if (rated_power < 0.0 || !std::isfinite(rated_power))
        throw std::domain_error("motor '" + id + "': rated power must be non-negative");
}

double inertia_ratio(const MotorSpec& motor, double load_inertia_kgcm2) {
    motor.validate();
    if (!(load_inertia_kgcm2 > 0.0))
        throw std::domain_error("load inertia must be positive");
    return load_inertia_kgcm2 / motor.rotor_inertia;
}

double capacity_from_ratio(double torque_over_jm, double r) {
    if (r < 0.0) throw std::domain_error("inertia ratio cannot be negative");
    return torque_over_jm / (r + 1.0);
}

MechanicalParams instantiate_motor(const MechanicalParams& mech_template,
                                   const MotorSpec& motor) {
    motor.validate();
    MechanicalParams p = mech_template;
    p.motor_inertia = motor.rotor_inertia * kKgcm2ToKgm2;
    p.max_torque = motor.max_torque;
    p.validate();
    return p;
}

namespace {

double round_to_decimals(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

/// Deviation against a printed (pre-rounded) sheet value: the smaller of the
/// raw difference and the difference after matching the sheet's precision.
double printed_deviation(double recomputed, double declared, int decimals) {
    const double raw = std::abs(recomputed - declared);
    const double rounded = std::abs(round_to_decimals(recomputed, decimals) - declared);
    return std::min(raw, rounded);
}

}  // namespace

CatalogReport validate_catalog(const std::vector<MotorSpec>& catalog,
                               double load_inertia_kgcm2) {
    if (!(load_inertia_kgcm2 > 0.0))
        throw std::domain_error("load inertia must be positive");

    CatalogReport report;
    report.load_inertia = load_inertia_kgcm2;
    for (const MotorSpec& motor : catalog) {
        motor.validate();
        CatalogRowCheck row;
        row.id = motor.id;
        row.model = motor.model;
        row.ratio = inertia_ratio(motor, load_inertia_kgcm2);
        row.capacity =
            acceleration_capacity(motor.max_torque, motor.rotor_inertia, load_inertia_kgcm2);
        row.declared_ratio = motor.declared_ratio;
        row.declared_capacity = motor.declared_capacity;

        if (std::isfinite(motor.declared_ratio)) {
            row.ratio_deviation = printed_deviation(row.ratio, motor.declared_ratio, 1);
            row.ratio_ok = row.ratio_deviation <= kCatalogFlagThreshold;
        }
        if (std::isfinite(motor.declared_capacity)) {
            row.capacity_deviation =
                printed_deviation(row.capacity, motor.declared_capacity, 2);
            row.capacity_ok = row.capacity_deviation <= kCatalogFlagThreshold;
        }
        report.all_ok = report.all_ok && row.ok();
        report.rows.push_back(row);
    }
    return report;
}

std::vector<MotorSpec> reference_catalog() {
    return {
        {"1", "ISMH3-44C15CD", 71.1, 88.9, 4.4, 0.5, 0.53},
        {"2", "ISMH3-29C15CD", 37.2, 55.0, 2.9, 0.8, 0.37},
        {"3", "ISMH3-18C15CD", 28.75, 25.5, 1.8, 1.8, 0.40},
        {"4", "ISMH3-13C15CD", 20.85, 19.3, 1.3, 2.4, 0.32},
        {"5", "ISMH3-85B15CD", 13.5, 13.0, 0.85, 3.5, 0.23},
        {"6", "1MH3-50B15CB", 9.6, 11.01, 0.5, 4.1, 0.17},
    };
}

std::vector<MotorSpec> experiment_catalog() {
    const double na = std::numeric_limits<double>::quiet_NaN();
    return {
        {"A", "ISMH3-29C15CD", 37.2, 55.0, 2.9, na, 0.36},
        {"B", "ISMH3-18C15CD", 28.75, 25.5, 1.8, na, 0.40},
        {"C", "ISMH3-85B15CD", 13.5, 13.0, 0.85, na, 0.22},
    };
}

MechanicalParams reference_mechanism() {
    return MechanicalParams::from_catalog(612.0, 88.9, 45.5, 0.0288,
                                          kDefaultDriveCoeffMmPerRad, 71.1);
}

}  // namespace feeddrive
