#include "feeddrive/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace feeddrive {

void TuningScenario::validate() const {
    params.validate();
    sim.validate();
    if (trajectory.samples.empty()) throw std::domain_error("scenario has an empty trajectory");
    if (id.empty()) throw std::domain_error("scenario needs an id");
}

namespace {

const FrequencyGrid& analysis_grid() {
    static const FrequencyGrid grid = FrequencyGrid::standard();
    return grid;
}

double clamped_violation(double v) { return std::min(v, kViolationClamp); }

}  // namespace

double constraint_penalty(const StabilityReport& report) {
    const ConstraintCheck check = check_constraints(report);
    const double va = clamped_violation(check.violation_gain_margin);
    const double vp = clamped_violation(check.violation_phase_margin);
    const double vr = clamped_violation(check.violation_resonance);
    return kConstraintPenaltyWeight * (va * va + vp * vp + vr * vr);
}

CandidateEvaluation evaluate_candidate(const TuningScenario& scenario,
                                       const ControlGains& gains) {
    CandidateEvaluation eval;
    eval.gains = gains;

    const FastRunResult run =
        run_for_metrics(scenario.params, gains, scenario.trajectory, scenario.sim);
    eval.stability = stability_report(scenario.params, gains, analysis_grid());
    eval.feasible = eval.stability.feasible;

    if (run.outcome.diverged) {
        eval.diverged = true;
        eval.blowup_time = run.outcome.blowup_time;
        const double planned = scenario.trajectory.duration() + scenario.sim.settle_tail;
        const double fraction =
            planned > 0.0 ? std::min(run.outcome.blowup_time / planned, 1.0) : 0.0;
        eval.w = kDivergencePenalty + kBlowupShaping * (1.0 - fraction);
    } else {
        eval.performance = run.report;
        eval.w = run.report.w;
    }

    eval.penalized = eval.w;
    if (scenario.constrained) eval.penalized += constraint_penalty(eval.stability);
    return eval;
}

double penalized_objective(const ControlGains& gains, const TuningScenario& scenario) {
    return evaluate_candidate(scenario, gains).penalized;
}

ControlGains gains_from_candidate(const Candidate& c) {
    if (c.size() != 4) throw std::domain_error("gain candidate needs 4 entries");
    ControlGains g;
    g.kp = c[0];
    g.kvp = c[1];
    g.kvi = c[2];
    g.kfv = c[3];
    return g;
}

Candidate candidate_from_gains(const ControlGains& g) { return {g.kp, g.kvp, g.kvi, g.kfv}; }

namespace {

/// Evaluates a generation on `threads` workers; results land at the index of
/// their candidate, so thread count cannot change the outcome.
BatchObjective scenario_batch(const TuningScenario& scenario, std::size_t threads) {
    return [&scenario, threads](const std::vector<Candidate>& candidates) {
        std::vector<double> values(candidates.size());
        const std::size_t workers =
            std::max<std::size_t>(1, std::min(threads, candidates.size()));
        if (workers == 1) {
            for (std::size_t i = 0; i < candidates.size(); ++i)
                values[i] =
                    penalized_objective(gains_from_candidate(candidates[i]), scenario);
            return values;
        }
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next.fetch_add(1); i < candidates.size();
                 i = next.fetch_add(1))
                values[i] =
                    penalized_objective(gains_from_candidate(candidates[i]), scenario);
        };
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (std::thread& t : pool) t.join();
        return values;
    };
}

}  // namespace

TuneResult tune(const TuningScenario& scenario, TuneAlgorithm algorithm, std::size_t budget,
                std::uint64_t seed, std::size_t threads, const FireworksOptions& fwa_options,
                const IslandGaOptions& ga_options) {
    scenario.validate();
    const SearchSpace space = SearchSpace::servo_gains();
    const BatchObjective objective = scenario_batch(scenario, threads);

    TuneResult result;
    result.algorithm = algorithm;
    result.scenario_id = scenario.id;
    result.search = algorithm == TuneAlgorithm::fireworks
                        ? fireworks_search(objective, space, budget, seed, fwa_options)
                        : island_ga_search(objective, space, budget, seed, ga_options);
    result.best = evaluate_candidate(scenario, gains_from_candidate(result.search.best));
    return result;
}

CrossValidation cross_validate(const TuneResult& fireworks, const TuneResult& island_ga,
                               double tolerance) {
    if (fireworks.scenario_id != island_ga.scenario_id)
        throw std::domain_error("cross-validation requires results from the same scenario");

    CrossValidation cv;
    cv.w_fireworks = fireworks.best.penalized;
    cv.w_island_ga = island_ga.best.penalized;
    cv.gains_fireworks = fireworks.best.gains;
    cv.gains_island_ga = island_ga.best.gains;

    const double lo = std::min(cv.w_fireworks, cv.w_island_ga);
    cv.relative_gap = std::abs(cv.w_fireworks - cv.w_island_ga) / std::max(lo, 1e-9);
    cv.agree = cv.relative_gap <= tolerance;
    cv.consensus = cv.w_fireworks <= cv.w_island_ga ? fireworks.best : island_ga.best;
    return cv;
}

}  // namespace feeddrive
