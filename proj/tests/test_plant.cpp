#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "feeddrive/plant.hpp"
#include "feeddrive/units.hpp"

using namespace feeddrive;

namespace {

// Reference axis: stiff screw shared by all motors, largest rotor fitted.
MechanicalParams reference_axis() {
    return MechanicalParams::from_catalog(612.0, 88.9, 45.5, 0.0288,
                                          kDefaultDriveCoeffMmPerRad, 71.1);
}

}  // namespace

TEST_CASE("catalog conversion produces SI values") {
    const MechanicalParams p = reference_axis();
    CHECK(p.stiffness == 612.0);
    CHECK(p.motor_inertia == doctest::Approx(88.9e-4).epsilon(1e-12));
    CHECK(p.load_inertia == doctest::Approx(45.5e-4).epsilon(1e-12));
    CHECK(p.damping == 0.0288);
    CHECK(p.max_torque == 71.1);
    CHECK(p.total_inertia() == doctest::Approx(134.4e-4).epsilon(1e-12));
    CHECK(p.drive_coeff == doctest::Approx(1.5915494309).epsilon(1e-9));
}

TEST_CASE("validate rejects non-physical parameters") {
    MechanicalParams good = reference_axis();
    CHECK_NOTHROW(good.validate());

    MechanicalParams p = good;
    p.stiffness = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p = good;
    p.motor_inertia = -1e-4;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p = good;
    p.load_inertia = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p = good;
    p.damping = -0.01;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p = good;
    p.drive_coeff = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);

    p = good;
    p.max_torque = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}

TEST_CASE("torque saturation clamps symmetrically") {
    const MechanicalParams p = reference_axis();
    CHECK(saturate_torque(10.0, p) == 10.0);
    CHECK(saturate_torque(500.0, p) == 71.1);
    CHECK(saturate_torque(-500.0, p) == -71.1);
    CHECK(saturate_torque(0.0, p) == 0.0);
}

TEST_CASE("resonance frequency of the reference axis") {
    const double w = resonance_frequency(reference_axis());
    // Closed form sqrt(K (Jm+Jl) / (Jm Jl)) with the catalog numbers above.
    const double expected = std::sqrt(612.0 * 134.4e-4 / (88.9e-4 * 45.5e-4));
    CHECK(w == doctest::Approx(expected).epsilon(1e-12));
    CHECK(w == doctest::Approx(450.94).epsilon(2e-4));
    CHECK(w > 450.0);
    CHECK(w < 452.0);
}

TEST_CASE("acceleration capacity matches hand-computed ratios") {
    CHECK(acceleration_capacity(71.1, 88.9, 45.5) == doctest::Approx(0.52901786).epsilon(1e-7));
    CHECK(acceleration_capacity(28.75, 25.5, 45.5) == doctest::Approx(0.40492958).epsilon(1e-7));
    CHECK(acceleration_capacity(13.5, 13.0, 48.0) == doctest::Approx(0.22131148).epsilon(1e-7));

    SUBCASE("monotone in torque and load inertia") {
        const double base = acceleration_capacity(20.0, 20.0, 40.0);
        CHECK(acceleration_capacity(21.0, 20.0, 40.0) > base);
        CHECK(acceleration_capacity(20.0, 20.0, 41.0) < base);
        CHECK(acceleration_capacity(20.0, 21.0, 40.0) < base);
    }

    SUBCASE("rejects non-positive inertias") {
        CHECK_THROWS_AS(acceleration_capacity(10.0, 0.0, 40.0), std::domain_error);
        CHECK_THROWS_AS(acceleration_capacity(10.0, 20.0, -1.0), std::domain_error);
    }
}

TEST_CASE("table-side capacity scales by the drive coefficient") {
    const double rotor = acceleration_capacity(71.1, 88.9, 45.5);
    const double table =
        table_acceleration_capacity(71.1, 88.9, 45.5, kDefaultDriveCoeffMmPerRad);
    CHECK(table == doctest::Approx(rotor * kDefaultDriveCoeffMmPerRad).epsilon(1e-12));
}

TEST_CASE("constant torque propagates momentum exactly") {
    const MechanicalParams p = reference_axis();
    const double torque = 5.0;
    const double dt = 1e-4;
    PlantState s;
    for (int k = 0; k < 1000; ++k) s = step_rk4(s, torque, dt, p);
    const double momentum = angular_momentum(s, p);
    // The coupling torque is internal, so total momentum equals the applied
    // torque impulse; RK4 reproduces this up to float rounding.
    CHECK(momentum == doctest::Approx(torque * 0.1).epsilon(1e-12));
}

TEST_CASE("free oscillation dissipates energy") {
    MechanicalParams p = reference_axis();
    PlantState s;
    s.theta_m = 0.01;  // pre-twisted spring, everything else at rest
    double prev = total_energy(s, p);
    CHECK(prev > 0.0);
    for (int k = 0; k < 5000; ++k) {
        s = step_rk4(s, 0.0, 1e-4, p);
        const double e = total_energy(s, p);
        REQUIRE(e <= prev * (1.0 + 1e-12));
        prev = e;
    }
    // With positive damping a visible fraction of the energy must be gone.
    CHECK(prev < 0.9 * total_energy({0.01, 0.0, 0.0, 0.0}, p));
}

TEST_CASE("integrator is fourth order on smooth dynamics") {
    const MechanicalParams p = reference_axis();
    const double torque = 5.0;
    const double horizon = 0.05;

    auto load_angle_at = [&](double dt) {
        PlantState s;
        const auto steps = long(std::llround(horizon / dt));
        for (long k = 0; k < steps; ++k) s = step_rk4(s, torque, dt, p);
        return s.theta_l;
    };

    const double ref = load_angle_at(1e-4 / 64.0);
    const double coarse = std::abs(load_angle_at(1e-4) - ref);
    const double fine = std::abs(load_angle_at(5e-5) - ref);
    REQUIRE(coarse > 0.0);
    REQUIRE(fine > 0.0);
    const double order = std::log2(coarse / fine);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("stiff limit approaches the rigid single-inertia ramp") {
    MechanicalParams p = reference_axis();
    p.stiffness *= 1e4;  // effectively rigid coupling
    const double torque = 5.0;
    const double dt = 1e-6;  // resolves the (much faster) stiff mode
    PlantState s;
    for (int k = 0; k < 10000; ++k) s = step_rk4(s, torque, dt, p);
    const double t = 10000 * dt;
    const double rigid = 0.5 * torque / p.total_inertia() * t * t;
    CHECK(s.theta_l == doctest::Approx(rigid).epsilon(1e-3));
    CHECK(s.theta_m == doctest::Approx(rigid).epsilon(1e-3));
}
