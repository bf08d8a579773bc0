#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "feeddrive/metrics.hpp"
#include "feeddrive/motion.hpp"
#include "feeddrive/simulation.hpp"
#include "feeddrive/units.hpp"

using namespace feeddrive;

namespace {

MechanicalParams reference_axis() {
    return MechanicalParams::from_catalog(612.0, 88.9, 45.5, 0.0288,
                                          kDefaultDriveCoeffMmPerRad, 71.1);
}

CommandTrajectory reference_move() {
    return reciprocate(plan(200.0, 100.0, 1000.0), 1, 0.2, 1e-4);
}

// Gentle gains well inside the stability region of the load-side loop.
ControlGains mild_gains() { return {4.0, 0.05, 2.0, 0.8}; }

}  // namespace

TEST_CASE("zero gains leave the table at rest") {
    const CommandTrajectory traj = reference_move();
    const Trace trace = run_closed_loop(reference_axis(), ControlGains{}, traj, SimConfig{});

    for (const TraceSample& s : trace.samples) {
        REQUIRE(s.pos_actual == 0.0);
        REQUIRE(s.torque_applied == 0.0);
    }
    const PerformanceReport r = evaluate(trace);
    CHECK(r.max_err_p == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("divergence guard") {
    SUBCASE("bounded finite samples pass") {
        CHECK_FALSE(check_divergence(150.0, -50.0, 200.0));
    }
    SUBCASE("non-finite values trip") {
        CHECK(check_divergence(std::nan(""), 0.0, 200.0));
        CHECK(check_divergence(0.0, INFINITY, 200.0));
    }
    SUBCASE("runaway position trips at 100x stroke") {
        CHECK(check_divergence(1e6, 0.0, 200.0));
        CHECK_FALSE(check_divergence(19999.0, 0.0, 200.0));
        CHECK(check_divergence(20001.0, 0.0, 200.0));
    }
}

TEST_CASE("closed loop tracks the reference move with mild gains") {
    const CommandTrajectory traj = reference_move();
    const Trace trace = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});

    const PerformanceReport r = evaluate(trace);
    CHECK(r.max_err_p < 200.0);
    CHECK(std::abs(trace.samples.back().pos_actual) < 20.0);  // settled near home

    for (const TraceSample& s : trace.samples) {
        REQUIRE(std::abs(s.torque_applied) <= 71.1 * (1.0 + 1e-12));
    }
}

TEST_CASE("momentum balance holds to float rounding") {
    const CommandTrajectory traj = reference_move();
    const Trace trace = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});
    CHECK(momentum_residual_rel(trace) < 1e-6);
}

TEST_CASE("settle tail extends the run with the final command held") {
    const CommandTrajectory traj = reference_move();
    SimConfig cfg;
    cfg.settle_tail = 0.5;
    const Trace trace = run_closed_loop(reference_axis(), mild_gains(), traj, cfg);
    CHECK(trace.samples.size() == traj.samples.size() + 5000);
    CHECK(trace.samples.back().pos_cmd == traj.samples.back().position);
}

TEST_CASE("reruns are bit-identical") {
    const CommandTrajectory traj = reference_move();
    const Trace a = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});
    const Trace b = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        REQUIRE(a.samples[k].pos_actual == b.samples[k].pos_actual);
        REQUIRE(a.samples[k].vel_actual == b.samples[k].vel_actual);
        REQUIRE(a.samples[k].torque_applied == b.samples[k].torque_applied);
    }
}

TEST_CASE("numerical blow-up raises a divergence diagnostic") {
    const CommandTrajectory traj = reference_move();
    // A coupling this stiff is far beyond what dt = 1e-4 can integrate; the
    // state overflows within milliseconds once any torque excites the spring.
    MechanicalParams stiff = reference_axis();
    stiff.stiffness *= 1e8;

    SUBCASE("storing path throws with the blow-up time") {
        double t_blow = -1.0;
        try {
            run_closed_loop(stiff, mild_gains(), traj, SimConfig{});
        } catch (const DivergenceError& e) {
            t_blow = e.blowup_time();
        }
        REQUIRE(t_blow > 0.0);
        CHECK(t_blow <= traj.duration() + 0.2 + 1e-9);
    }

    SUBCASE("metrics path reports instead of throwing") {
        const FastRunResult r = run_for_metrics(stiff, mild_gains(), traj, SimConfig{});
        CHECK(r.outcome.diverged);
        CHECK(r.outcome.blowup_time > 0.0);
    }
}

TEST_CASE("resonant-unstable gains ring within the saturation bound") {
    // With the torque clamped and the command bounded, gains that destabilize
    // the compliant mode produce a violent but finite limit cycle instead of
    // a runaway — the score collapses while the trace stays finite.
    const CommandTrajectory traj = reference_move();
    const ControlGains hot{50.0, 20.0, 500.0, 1.0};
    const FastRunResult bad = run_for_metrics(reference_axis(), hot, traj, SimConfig{});
    const FastRunResult good = run_for_metrics(reference_axis(), mild_gains(), traj, SimConfig{});

    REQUIRE_FALSE(bad.outcome.diverged);
    REQUIRE_FALSE(good.outcome.diverged);
    CHECK(bad.report.w > 10.0 * good.report.w);
}

TEST_CASE("streaming metrics equal the stored-trace metrics") {
    const CommandTrajectory traj = reference_move();
    const Trace trace = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});
    const FastRunResult fast = run_for_metrics(reference_axis(), mild_gains(), traj, SimConfig{});

    REQUIRE_FALSE(fast.outcome.diverged);
    const PerformanceReport stored = evaluate(trace);
    CHECK(fast.report.max_err_p == stored.max_err_p);
    CHECK(fast.report.max_err_v == stored.max_err_v);
    CHECK(fast.report.vars_v == doctest::Approx(stored.vars_v).epsilon(1e-12));
    CHECK(fast.report.w == doctest::Approx(stored.w).epsilon(1e-12));
}

TEST_CASE("encoder quantization perturbs but does not destabilize") {
    const CommandTrajectory traj = reference_move();
    SimConfig quantized;
    quantized.encoder_counts_per_rev = 2500;

    const Trace ideal = run_closed_loop(reference_axis(), mild_gains(), traj, SimConfig{});
    const Trace coarse = run_closed_loop(reference_axis(), mild_gains(), traj, quantized);

    REQUIRE(ideal.samples.size() == coarse.samples.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < ideal.samples.size(); ++k) {
        worst = std::max(worst,
                         std::abs(ideal.samples[k].pos_actual - coarse.samples[k].pos_actual));
    }
    // 2500-line quadrature on a 10 mm lead quantizes position to 1 µm; the
    // closed loop should stay within a small multiple of that.
    CHECK(worst < 1.0);
    CHECK(worst > 0.0);
}

TEST_CASE("input validation") {
    const CommandTrajectory traj = reference_move();

    SUBCASE("dt mismatch is rejected") {
        SimConfig cfg;
        cfg.dt = 2e-4;
        CHECK_THROWS_AS(run_closed_loop(reference_axis(), mild_gains(), traj, cfg),
                        std::domain_error);
    }
    SUBCASE("empty trajectory is rejected") {
        CommandTrajectory empty;
        empty.dt = 1e-4;
        CHECK_THROWS_AS(run_closed_loop(reference_axis(), mild_gains(), empty, SimConfig{}),
                        std::domain_error);
    }
    SUBCASE("config validation") {
        SimConfig bad;
        bad.dt = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        bad = SimConfig{};
        bad.settle_tail = -1.0;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        bad = SimConfig{};
        bad.encoder_counts_per_rev = -1;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
    }
}
