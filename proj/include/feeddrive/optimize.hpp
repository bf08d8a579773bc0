#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "feeddrive/rng.hpp"

namespace feeddrive {

/// A point in the search space.
using Candidate = std::vector<double>;

/// Evaluates a generation of candidates, returning one value per candidate
/// in order. Implementations may evaluate concurrently as long as the
/// returned ordering matches the input ordering.
using BatchObjective = std::function<std::vector<double>(const std::vector<Candidate>&)>;

/// Wraps a scalar objective into a sequential batch evaluator.
BatchObjective sequential_batch(std::function<double(const Candidate&)> objective);

/// How an axis is presented to the optimizers. Linear axes are searched
/// as-is; log axes are searched in ln-coordinates, so steps and explosion
/// amplitudes become multiplicative and a bound pair spanning decades is
/// covered evenly instead of being dominated by its top decade.
enum class AxisScale { linear, log };

/// Axis-aligned box bounds for the search.
struct SearchSpace {
    struct Bound {
        double lower = 0.0;
        double upper = 0.0;
        AxisScale scale = AxisScale::linear;
    };
    std::vector<Bound> bounds;

    /// The gain box used for controller tuning:
    /// kp ∈ [0.1, 500], kvp ∈ [0.01, 200], kvi ∈ [0.1, 5000], kfv ∈ [0, 1].
    /// The three gain axes span 3.5–5.7 decades and are searched on a log
    /// scale; kfv is linear.
    static SearchSpace servo_gains();

    std::size_t dims() const { return bounds.size(); }
    double range(std::size_t d) const { return bounds[d].upper - bounds[d].lower; }
    void validate() const;
    bool contains(const Candidate& c) const;
    Candidate sample_uniform(Rng& rng) const;
    double clip(std::size_t d, double value) const;

    /// The box the optimizers actually walk: log axes become [ln lo, ln hi]
    /// linear axes. Pure-linear spaces come back unchanged.
    SearchSpace internal_view() const;
    /// Maps an internal-view point back to physical coordinates.
    Candidate decode_internal(const Candidate& internal) const;
};

/// Outcome of one search run.
struct OptimizerResult {
    Candidate best;
    double best_value = 0.0;
    std::size_t evaluations_used = 0;
    std::vector<double> history;  ///< best-so-far after each generation (non-increasing)
    std::uint64_t seed = 0;
};

/// Knobs for the fireworks search. Defaults follow the published algorithm
/// scaled to a 4-d problem.
struct FireworksOptions {
    std::size_t fireworks = 5;          ///< population of explosion centers
    std::size_t total_sparks = 50;      ///< nominal sparks per generation
    std::size_t min_sparks = 2;         ///< per-firework clamp, lower
    std::size_t max_sparks = 20;        ///< per-firework clamp, upper
    double amplitude_factor = 0.4;       ///< max explosion amplitude as range fraction
    double amplitude_floor_init = 0.02;  ///< amplitude lower bound at the first generation
    double amplitude_floor = 1e-4;       ///< amplitude lower bound at budget exhaustion
    std::size_t gaussian_sparks = 5;    ///< extra mutation sparks per generation
    double gaussian_sigma = 0.1;        ///< mutation σ as range fraction
    std::size_t restart_after = 8;      ///< stagnant generations before the non-elite
                                        ///< fireworks are re-seeded; 0 disables
    double restart_tolerance = 1e-3;    ///< relative best-value improvement that
                                        ///< counts as progress
    std::size_t init_design = 40;       ///< deterministic space-filling points screened
                                        ///< at startup (shared with the island GA)
};

/// Fireworks algorithm: fitter fireworks get more sparks in tighter
/// explosions; a few Gaussian-mutated sparks add diversity; the best point
/// survives each generation and the rest of the population is refilled at
/// random from the spark pool. The amplitude floor shrinks linearly from
/// `amplitude_floor_init` to `amplitude_floor` over the budget, so the best
/// firework keeps exploring early and polishes late. Throws
/// std::domain_error when the budget cannot cover the initial population.
OptimizerResult fireworks_search(const BatchObjective& objective, const SearchSpace& space,
                                 std::size_t budget, std::uint64_t seed,
                                 const FireworksOptions& options = {});

/// Knobs for the island genetic search.
struct IslandGaOptions {
    std::size_t islands = 4;
    std::size_t island_size = 20;
    std::size_t tournament = 2;
    double crossover_rate = 0.9;
    double blx_alpha = 0.5;            ///< blend-crossover expansion
    double mutation_rate = 0.1;        ///< per-gene probability
    double mutation_sigma = 0.1;       ///< σ as range fraction
    std::size_t migration_interval = 10;  ///< generations between migrations; 0 disables
    std::size_t migrants = 2;          ///< island's best k replace neighbor's worst k
    std::size_t elites = 1;            ///< copied unchanged per island per generation
    std::size_t init_design = 40;      ///< deterministic space-filling points seeded into
                                       ///< the initial islands (shared with fireworks)
};

/// Real-coded genetic algorithm on a ring of islands: tournament selection,
/// blend crossover, Gaussian mutation, elitism, and periodic migration of
/// the best individuals to the next island. Throws std::domain_error when
/// the budget cannot cover the initial population.
OptimizerResult island_ga_search(const BatchObjective& objective, const SearchSpace& space,
                                 std::size_t budget, std::uint64_t seed,
                                 const IslandGaOptions& options = {});

}  // namespace feeddrive
