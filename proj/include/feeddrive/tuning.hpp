#pragma once

#include <cstdint>
#include <string>

#include "feeddrive/frequency.hpp"
#include "feeddrive/metrics.hpp"
#include "feeddrive/optimize.hpp"
#include "feeddrive/simulation.hpp"

namespace feeddrive {

/// Everything a gain candidate is judged against: one mechanism, one command
/// trajectory, and whether the stability constraints are enforced.
struct TuningScenario {
    MechanicalParams params;
    CommandTrajectory trajectory;
    SimConfig sim;
    bool constrained = false;  ///< apply margin/resonance penalties
    std::string id;            ///< used to reject cross-validation of unlike runs

    void validate() const;
};

/// Full record of one candidate's evaluation.
struct CandidateEvaluation {
    ControlGains gains;
    bool diverged = false;
    double blowup_time = 0.0;       ///< valid when diverged
    PerformanceReport performance;  ///< tracking stats (partial when diverged)
    StabilityReport stability;      ///< linearized margins, always computed
    double w = 0.0;                 ///< tracking score (penalty base when diverged)
    double penalized = 0.0;         ///< objective value seen by the optimizer
    bool feasible = false;          ///< margins satisfy the constraint block
};

/// Penalty weight on squared normalized constraint violations.
inline constexpr double kConstraintPenaltyWeight = 1e4;
/// Per-violation clamp that keeps the penalty finite when Mr = +inf.
inline constexpr double kViolationClamp = 10.0;
/// Base penalty for a diverging simulation.
inline constexpr double kDivergencePenalty = 1e6;
/// Weight of the "how early did it blow up" shaping term.
inline constexpr double kBlowupShaping = 1e3;

/// Quadratic penalty for the report's clamped normalized constraint
/// violations; zero iff the report is feasible.
double constraint_penalty(const StabilityReport& report);

/// Simulates and analyzes one gain set against a scenario. Never throws for
/// bad gains: divergence and infeasibility map to finite penalty values.
CandidateEvaluation evaluate_candidate(const TuningScenario& scenario, const ControlGains& gains);

/// The scalar the optimizers minimize: W, plus constraint penalties when the
/// scenario is constrained, or the divergence penalty.
double penalized_objective(const ControlGains& gains, const TuningScenario& scenario);

/// Gain vector layout used by the search: {kp, kvp, kvi, kfv}.
ControlGains gains_from_candidate(const Candidate& c);
Candidate candidate_from_gains(const ControlGains& g);

enum class TuneAlgorithm { fireworks, island_ga };

inline const char* to_string(TuneAlgorithm a) {
    return a == TuneAlgorithm::fireworks ? "fireworks" : "island_ga";
}

/// Search outcome plus the re-evaluated winner.
struct TuneResult {
    OptimizerResult search;
    CandidateEvaluation best;  ///< re-evaluation of search.best (must reproduce best_value)
    TuneAlgorithm algorithm = TuneAlgorithm::fireworks;
    std::string scenario_id;
};

/// Runs one optimizer against a scenario. Candidate evaluations within a
/// generation run on `threads` workers (1 = sequential) and are merged by
/// index, so the result is independent of thread count.
TuneResult tune(const TuningScenario& scenario, TuneAlgorithm algorithm, std::size_t budget,
                std::uint64_t seed, std::size_t threads = 1,
                const FireworksOptions& fwa_options = {}, const IslandGaOptions& ga_options = {});

/// Agreement report between the two metaheuristics on one scenario.
struct CrossValidation {
    bool agree = false;
    double w_fireworks = 0.0;  ///< penalized objective of the fireworks winner
    double w_island_ga = 0.0;  ///< penalized objective of the GA winner
    double relative_gap = 0.0;
    ControlGains gains_fireworks;
    ControlGains gains_island_ga;
    CandidateEvaluation consensus;  ///< the better of the two winners
};

/// Compares the two tuned results; throws std::domain_error when the results
/// come from different scenarios.
CrossValidation cross_validate(const TuneResult& fireworks, const TuneResult& island_ga,
                               double tolerance = 0.05);

}  // namespace feeddrive
