#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feeddrive/catalog.hpp"
#include "feeddrive/optimize.hpp"
#include "feeddrive/simulation.hpp"
#include "feeddrive/sweep.hpp"
#include "feeddrive/units.hpp"

namespace feeddrive {

/// Everything a run needs, read from one JSON document. Every key name
/// carries its unit so a value can never be mistaken for a different scale.
/// Missing blocks fall back to the reference values; unknown keys are hard
/// errors so a typo cannot silently change a run.
struct RunConfig {
    // mechanism template (per-motor rotor inertia / torque come from the catalog)
    double screw_stiffness_Nm_per_rad = 612.0;
    double coupling_damping_Nms_per_rad = 0.0288;
    double load_inertia_kgcm2 = 45.5;
    double drive_coeff_mm_per_rad = kDefaultDriveCoeffMmPerRad;

    std::vector<MotorSpec> catalog;  ///< defaults to reference_catalog()

    ProcessGrid grid;
    SimConfig sim;

    // optimizer block
    std::string algorithm = "both";  ///< "fwa" | "ga" | "both"
    std::size_t budget = 3000;       ///< evaluations per (motor, process) cell
    std::uint64_t master_seed = 2026;
    SearchSpace bounds = SearchSpace::servo_gains();
    FireworksOptions fwa;
    IslandGaOptions ga;

    std::string output_dir = ".";

    RunConfig();  ///< fills the catalog with the reference rows

    /// Mechanism template with placeholder rotor values, ready for
    /// instantiate_motor.
    MechanicalParams mechanism() const;

    /// Throws std::domain_error naming the offending field.
    void validate() const;
};

/// Parses and validates a config document. Defaulted fields are reported as
/// human-readable lines ("optimizer.budget = 3000 (default)") through
/// `provenance` when given. Throws std::domain_error with the JSON key path
/// on unknown keys, type mismatches, or out-of-range values.
RunConfig parse_config(const std::string& json_text,
                       std::vector<std::string>* provenance = nullptr);

/// Reads the file and parses it. Throws std::domain_error when unreadable.
RunConfig load_config(const std::string& path,
                      std::vector<std::string>* provenance = nullptr);

/// Canonical serialization: sorted keys, exact round-trip doubles.
/// parse_config(serialize_config(cfg)) reproduces cfg field for field.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64-bit digest of the canonical serialization, as 16 hex digits.
/// Stable across runs and platforms; recorded in every output header.
std::string config_digest(const RunConfig& config);

}  // namespace feeddrive
