#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feeddrive/sweep.hpp"

using namespace feeddrive;

namespace {

// Small but structurally complete sweep: 2 motors x (1 speed x 2 accels),
// short stroke, minimum viable budget.
SweepOptions quick_options() {
    SweepOptions opt;
    opt.budget = 400;  // 4 sub-runs x 100 (GA floor is 80)
    opt.sim.settle_tail = 0.1;
    return opt;
}

ProcessGrid quick_grid() {
    ProcessGrid grid;
    grid.speeds_mm_s = {100.0};
    grid.accels_m_s2 = {2.0, 5.0};
    grid.stroke_mm = 20.0;
    grid.dwell_s = 0.05;
    return grid;
}

std::vector<MotorSpec> two_motors() {
    const auto all = reference_catalog();
    return {all[1], all[4]};
}

}  // namespace

TEST_CASE("relative change arithmetic") {
    CHECK(relative_change(1.2, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(relative_change(1.0, 1.0) == 0.0);
    CHECK(relative_change(0.8, 1.0) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK_THROWS_AS(relative_change(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(relative_change(1.0, -1.0), std::domain_error);
}

TEST_CASE("process grid validation") {
    CHECK_NOTHROW(ProcessGrid{}.validate());
    ProcessGrid bad;
    bad.speeds_mm_s = {};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    ProcessGrid neg;
    neg.accels_m_s2 = {1.0, -2.0};
    CHECK_THROWS_AS(neg.validate(), std::domain_error);
    ProcessGrid zero_stroke;
    zero_stroke.stroke_mm = 0.0;
    CHECK_THROWS_AS(zero_stroke.validate(), std::domain_error);
    CHECK(ProcessGrid{}.cells() == 9);
}

TEST_CASE("trend classifier") {
    SUBCASE("improving then flat") {
        CHECK(classify_trend({5, 2, 1, 1.02, 0.99}) == TrendClass::improving_then_flat);
        CHECK(classify_trend({10, 3, 1.05, 1.0, 1.03}) == TrendClass::improving_then_flat);
        // Ends at its minimum: flat by construction of the band.
        CHECK(classify_trend({5, 4, 3, 2, 1}) == TrendClass::improving_then_flat);
    }
    SUBCASE("interior minimum") {
        CHECK(classify_trend({5, 2, 1, 1.5, 2.5}) == TrendClass::interior_minimum);
        CHECK(classify_trend({3, 1, 2}) == TrendClass::interior_minimum);
    }
    SUBCASE("monotone includes constants and pure growth") {
        CHECK(classify_trend({1, 1, 1}) == TrendClass::monotone);
        CHECK(classify_trend({1, 2, 3}) == TrendClass::monotone);
    }
    SUBCASE("irregular") {
        CHECK(classify_trend({1, 5, 1, 5, 1}) == TrendClass::irregular);
        // Wiggles without a 10% improvement from the start are irregular too.
        CHECK(classify_trend({1, 1.05, 1.02}) == TrendClass::irregular);
    }
    SUBCASE("inconclusive below three points") {
        CHECK(classify_trend({1, 2}) == TrendClass::inconclusive);
        CHECK(classify_trend({}) == TrendClass::inconclusive);
    }
}

TEST_CASE("shared-pool sweep structure and invariants") {
    const SweepResult result =
        run_sweep(two_motors(), reference_mechanism(), quick_grid(), quick_options(), 99);

    SUBCASE("row completeness: one row per motor x process x mode") {
        CHECK(result.rows.size() == 2 * 2 * 2);
        int count = 0;
        for (const SweepRow& row : result.rows)
            for (const SweepRow& other : result.rows)
                if (&row != &other && row.motor_id == other.motor_id &&
                    row.speed_mm_s == other.speed_mm_s && row.accel_m_s2 == other.accel_m_s2 &&
                    row.mode == other.mode)
                    ++count;
        CHECK(count == 0);
    }

    SUBCASE("capacity columns are consistent with the direct formula") {
        for (const SweepRow& row : result.rows) {
            const MotorSpec& motor =
                row.motor_id == "2" ? two_motors()[0] : two_motors()[1];
            const double direct = acceleration_capacity(motor.max_torque, motor.rotor_inertia,
                                                        result.load_inertia_kgcm2);
            CHECK(std::abs(row.capacity_rotor - direct) / direct < 1e-9);
            CHECK(row.capacity_table ==
                  doctest::Approx(row.capacity_rotor * reference_mechanism().drive_coeff)
                      .epsilon(1e-12));
            CHECK(row.inertia_ratio > 0.0);
        }
    }

    SUBCASE("constrained never beats unconstrained within a cell") {
        for (const SweepRow& row : result.rows) {
            if (row.mode != ConstraintMode::unconstrained) continue;
            const auto partner = std::find_if(
                result.rows.begin(), result.rows.end(), [&](const SweepRow& other) {
                    return other.mode == ConstraintMode::constrained &&
                           other.motor_id == row.motor_id &&
                           other.speed_mm_s == row.speed_mm_s &&
                           other.accel_m_s2 == row.accel_m_s2;
                });
            REQUIRE(partner != result.rows.end());
            CHECK(partner->w >= row.w);
            CHECK(relative_change(partner->w, row.w) >= 0.0);
        }
    }

    SUBCASE("rows carry plausible physics") {
        for (const SweepRow& row : result.rows) {
            CHECK_FALSE(row.diverged);
            CHECK(row.w > 0.0);
            CHECK(row.w < 1e6);
            CHECK(row.max_err_p > 0.0);
            CHECK(std::isfinite(row.phase_margin_deg));
        }
    }

    SUBCASE("constrained rows that are not fallbacks are feasible") {
        for (const SweepRow& row : result.rows)
            if (row.mode == ConstraintMode::constrained && !row.fallback)
                CHECK(row.feasible);
    }
}

TEST_CASE("sweep determinism across thread counts and reruns") {
    const auto catalog = two_motors();
    const auto mech = reference_mechanism();
    const auto grid = quick_grid();
    SweepOptions opt = quick_options();

    const SweepResult a = run_sweep(catalog, mech, grid, opt, 7);
    const SweepResult b = run_sweep(catalog, mech, grid, opt, 7);
    opt.threads = 4;
    const SweepResult c = run_sweep(catalog, mech, grid, opt, 7);

    REQUIRE(a.rows.size() == b.rows.size());
    REQUIRE(a.rows.size() == c.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].w == b.rows[i].w);
        CHECK(a.rows[i].w == c.rows[i].w);
        CHECK(a.rows[i].gains.kp == c.rows[i].gains.kp);
        CHECK(a.rows[i].gains.kvp == c.rows[i].gains.kvp);
        CHECK(a.rows[i].gains.kvi == c.rows[i].gains.kvi);
        CHECK(a.rows[i].gains.kfv == c.rows[i].gains.kfv);
        CHECK(a.rows[i].cv_gap == c.rows[i].cv_gap);
        CHECK(a.rows[i].seed == c.rows[i].seed);
    }

    SUBCASE("different master seeds differ somewhere") {
        const SweepResult d = run_sweep(catalog, mech, grid, opt, 8);
        bool any_difference = false;
        for (std::size_t i = 0; i < a.rows.size(); ++i)
            if (a.rows[i].w != d.rows[i].w) any_difference = true;
        CHECK(any_difference);
    }
}

TEST_CASE("independent protocol produces complete rows too") {
    SweepOptions opt = quick_options();
    opt.protocol = SweepProtocol::independent;
    opt.budget = 200;  // per mode: 100 each optimizer
    ProcessGrid grid = quick_grid();
    grid.accels_m_s2 = {5.0};

    const SweepResult result =
        run_sweep({two_motors()[0]}, reference_mechanism(), grid, opt, 3);
    CHECK(result.rows.size() == 2);
    for (const SweepRow& row : result.rows) {
        CHECK(row.w > 0.0);
        CHECK_FALSE(row.diverged);
    }
}

TEST_CASE("sweep input validation") {
    const auto mech = reference_mechanism();
    SweepOptions opt = quick_options();
    CHECK_THROWS_AS(run_sweep({}, mech, quick_grid(), opt, 1), std::domain_error);
    opt.budget = 300;  // 75 per sub-run: below the GA island floor
    CHECK_THROWS_AS(run_sweep(two_motors(), mech, quick_grid(), opt, 1), std::domain_error);
    opt.budget = 400;
    opt.modes = {};
    CHECK_THROWS_AS(run_sweep(two_motors(), mech, quick_grid(), opt, 1), std::domain_error);
}

TEST_CASE("trend report groups by process and mode and orders by capacity") {
    SweepResult synthetic;
    synthetic.load_inertia_kgcm2 = 45.5;
    auto add_row = [&](const char* id, double cap, double w, ConstraintMode mode) {
        SweepRow row;
        row.motor_id = id;
        row.speed_mm_s = 400.0;
        row.accel_m_s2 = 5.0;
        row.capacity_rotor = cap;
        row.w = w;
        row.mode = mode;
        synthetic.rows.push_back(row);
    };
    // Insert out of capacity order on purpose.
    add_row("d", 0.32, 1.02, ConstraintMode::unconstrained);
    add_row("a", 0.17, 5.0, ConstraintMode::unconstrained);
    add_row("e", 0.40, 0.99, ConstraintMode::unconstrained);
    add_row("b", 0.23, 2.0, ConstraintMode::unconstrained);
    add_row("c", 0.29, 1.0, ConstraintMode::unconstrained);
    add_row("d", 0.32, 1.5, ConstraintMode::constrained);
    add_row("a", 0.17, 5.0, ConstraintMode::constrained);
    add_row("e", 0.40, 2.5, ConstraintMode::constrained);
    add_row("b", 0.23, 2.0, ConstraintMode::constrained);
    add_row("c", 0.29, 1.0, ConstraintMode::constrained);

    const auto report = trend_report(synthetic);
    REQUIRE(report.size() == 2);

    const TrendSummary& unc = report[0];
    CHECK(unc.mode == ConstraintMode::unconstrained);
    CHECK(std::is_sorted(unc.capacities.begin(), unc.capacities.end()));
    CHECK(unc.w_values == std::vector<double>{5.0, 2.0, 1.0, 1.02, 0.99});
    CHECK(unc.classification == TrendClass::improving_then_flat);
    CHECK(unc.w_min == 0.99);
    CHECK(unc.w_last == 0.99);

    const TrendSummary& con = report[1];
    CHECK(con.mode == ConstraintMode::constrained);
    CHECK(con.w_values == std::vector<double>{5.0, 2.0, 1.0, 1.5, 2.5});
    CHECK(con.classification == TrendClass::interior_minimum);
    CHECK(con.w_last == 2.5);
}
