#include "feeddrive/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace feeddrive {

BatchObjective sequential_batch(std::function<double(const Candidate&)> objective) {
    return [objective = std::move(objective)](const std::vector<Candidate>& candidates) {
        std::vector<double> values;
        values.reserve(candidates.size());
        for (const Candidate& c : candidates) values.push_back(objective(c));
        return values;
    };
}

SearchSpace SearchSpace::servo_gains() {
    SearchSpace s;
    s.bounds = {{0.1, 500.0, AxisScale::log},
                {0.01, 200.0, AxisScale::log},
                {0.1, 5000.0, AxisScale::log},
                {0.0, 1.0, AxisScale::linear}};
    return s;
}

void SearchSpace::validate() const {
    if (bounds.empty()) throw std::domain_error("search space has no dimensions");
    for (const Bound& b : bounds) {
        if (!(b.lower < b.upper)) throw std::domain_error("bound requires lower < upper");
        if (b.scale == AxisScale::log && !(b.lower > 0.0))
            throw std::domain_error("log axis requires a positive lower bound");
    }
}

bool SearchSpace::contains(const Candidate& c) const {
    if (c.size() != bounds.size()) return false;
    for (std::size_t d = 0; d < bounds.size(); ++d)
        if (c[d] < bounds[d].lower || c[d] > bounds[d].upper) return false;
    return true;
}

Candidate SearchSpace::sample_uniform(Rng& rng) const {
    Candidate c(bounds.size());
    for (std::size_t d = 0; d < bounds.size(); ++d)
        c[d] = rng.uniform(bounds[d].lower, bounds[d].upper);
    return c;
}

double SearchSpace::clip(std::size_t d, double value) const {
    return std::clamp(value, bounds[d].lower, bounds[d].upper);
}

SearchSpace SearchSpace::internal_view() const {
    SearchSpace s = *this;
    for (Bound& b : s.bounds) {
        if (b.scale == AxisScale::log) {
            b.lower = std::log(b.lower);
            b.upper = std::log(b.upper);
            b.scale = AxisScale::linear;
        }
    }
    return s;
}

Candidate SearchSpace::decode_internal(const Candidate& internal) const {
    Candidate physical = internal;
    for (std::size_t d = 0; d < bounds.size() && d < physical.size(); ++d)
        if (bounds[d].scale == AxisScale::log) physical[d] = std::exp(physical[d]);
    return physical;
}

namespace {

struct Scored {
    Candidate x;
    double value;
};

// Evaluates internal-view candidates through an objective that expects
// physical coordinates. For pure-linear spaces this is a pass-through.
std::vector<double> evaluate_internal(const BatchObjective& objective, const SearchSpace& space,
                                      const std::vector<Candidate>& internal) {
    std::vector<Candidate> physical;
    physical.reserve(internal.size());
    for (const Candidate& c : internal) physical.push_back(space.decode_internal(c));
    return objective(physical);
}

// Van der Corput radical inverse of `index` in the given base, in [0, 1).
double radical_inverse(std::size_t index, std::size_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= double(base);
        r += f * double(index % base);
        index /= base;
    }
    return r;
}

// Deterministic Halton space-filling design over the box. Independent of any
// seed, so every search that screens these points sees the identical set —
// which anchors the fireworks search and the island GA on a common incumbent
// when they are run side by side for cross-validation.
std::vector<Candidate> halton_design(const SearchSpace& box, std::size_t count) {
    std::vector<std::size_t> bases;  // first primes, one per dimension
    for (std::size_t p = 2; bases.size() < box.dims(); ++p) {
        bool prime = true;
        for (std::size_t q = 2; q * q <= p; ++q)
            if (p % q == 0) { prime = false; break; }
        if (prime) bases.push_back(p);
    }
    std::vector<Candidate> points;
    points.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        Candidate c(box.dims());
        for (std::size_t d = 0; d < box.dims(); ++d) {
            const double u = radical_inverse(i, bases[d]);
            c[d] = box.bounds[d].lower + u * box.range(d);
        }
        points.push_back(std::move(c));
    }
    return points;
}

// Draws `count` distinct dimension indices (partial Fisher-Yates).
std::vector<std::size_t> pick_dims(Rng& rng, std::size_t dims, std::size_t count) {
    std::vector<std::size_t> idx(dims);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + std::size_t(rng.integer(dims - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

}  // namespace

OptimizerResult fireworks_search(const BatchObjective& objective, const SearchSpace& space,
                                 std::size_t budget, std::uint64_t seed,
                                 const FireworksOptions& opt) {
    space.validate();
    if (opt.fireworks == 0) throw std::domain_error("need at least one firework");
    if (budget < opt.fireworks)
        throw std::domain_error("budget cannot cover the initial population");

    Rng rng(seed);
    const SearchSpace box = space.internal_view();  // all walking happens here
    const std::size_t dims = box.dims();
    constexpr double kXi = 1e-12;  // keeps ratios defined on flat fitness

    OptimizerResult result;
    result.seed = seed;

    // Initial screen: seeded uniform draws plus the deterministic design
    // points; the best `fireworks` of the screen become the first population.
    std::vector<Candidate> init;
    for (std::size_t i = 0; i < opt.fireworks; ++i) init.push_back(box.sample_uniform(rng));
    const std::size_t design = std::min<std::size_t>(opt.init_design, budget - opt.fireworks);
    std::vector<Candidate> anchor = halton_design(box, design);
    for (Candidate& c : anchor) init.push_back(std::move(c));
    std::vector<double> init_values = evaluate_internal(objective, space, init);
    result.evaluations_used = init.size();

    std::vector<std::size_t> order(init.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + std::ptrdiff_t(opt.fireworks), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (init_values[a] != init_values[b])
                              return init_values[a] < init_values[b];
                          return a < b;  // stable under ties for determinism
                      });
    std::vector<Scored> fireworks;
    for (std::size_t i = 0; i < opt.fireworks; ++i)
        fireworks.push_back({std::move(init[order[i]]), init_values[order[i]]});

    auto best_of = [](const std::vector<Scored>& pop) {
        std::size_t k = 0;
        for (std::size_t i = 1; i < pop.size(); ++i)
            if (pop[i].value < pop[k].value) k = i;
        return k;
    };

    Scored best = fireworks[best_of(fireworks)];
    result.history.push_back(best.value);

    std::size_t stagnant_generations = 0;
    while (result.evaluations_used < budget) {
        // Escape hatch for a population camped on a local shelf: when the
        // best value has not moved for a while, every firework except the
        // incumbent is re-seeded from scratch.
        if (opt.restart_after > 0 && stagnant_generations >= opt.restart_after &&
            opt.fireworks > 1) {
            std::vector<Candidate> fresh;
            const std::size_t remaining = budget - result.evaluations_used;
            const std::size_t count = std::min(opt.fireworks - 1, remaining);
            for (std::size_t i = 0; i < count; ++i) fresh.push_back(box.sample_uniform(rng));
            const std::vector<double> fresh_values =
                evaluate_internal(objective, space, fresh);
            result.evaluations_used += fresh.size();

            const std::size_t keep = best_of(fireworks);
            std::vector<Scored> reseeded;
            reseeded.push_back(fireworks[keep]);
            for (std::size_t i = 0; i < fresh.size(); ++i)
                reseeded.push_back({std::move(fresh[i]), fresh_values[i]});
            fireworks = std::move(reseeded);
            for (const Scored& fw : fireworks)
                if (fw.value < best.value) best = fw;
            stagnant_generations = 0;
            if (result.evaluations_used >= budget) break;
        }

        double f_min = fireworks[0].value, f_max = fireworks[0].value;
        for (const Scored& fw : fireworks) {
            f_min = std::min(f_min, fw.value);
            f_max = std::max(f_max, fw.value);
        }

        double spark_denom = 0.0, amp_denom = 0.0;
        for (const Scored& fw : fireworks) {
            spark_denom += f_max - fw.value + kXi;
            amp_denom += fw.value - f_min + kXi;
        }

        // The floor under explosion amplitudes shrinks as the budget burns
        // down: exploration first, polishing at the end.
        const double progress = double(result.evaluations_used) / double(budget);
        const double floor_now =
            opt.amplitude_floor_init +
            (opt.amplitude_floor - opt.amplitude_floor_init) * progress;

        // Draw the whole generation before evaluating so that concurrent
        // evaluation cannot perturb the random stream.
        std::vector<Candidate> sparks;
        for (const Scored& fw : fireworks) {
            const double share = (f_max - fw.value + kXi) / spark_denom;
            auto count = std::size_t(std::llround(share * double(opt.total_sparks)));
            count = std::clamp(count, opt.min_sparks, opt.max_sparks);

            const double amp_share =
                opt.amplitude_factor * (fw.value - f_min + kXi) / amp_denom;

            for (std::size_t k = 0; k < count; ++k) {
                Candidate s = fw.x;
                const auto shake = std::size_t(1 + rng.integer(dims));
                for (std::size_t d : pick_dims(rng, dims, shake)) {
                    const double amp = std::max(amp_share, floor_now) * box.range(d);
                    s[d] += amp * rng.uniform(-1.0, 1.0);
                    if (s[d] < box.bounds[d].lower || s[d] > box.bounds[d].upper)
                        s[d] = rng.uniform(box.bounds[d].lower, box.bounds[d].upper);
                }
                sparks.push_back(std::move(s));
            }
        }
        for (std::size_t k = 0; k < opt.gaussian_sparks; ++k) {
            Candidate s = fireworks[rng.integer(fireworks.size())].x;
            const auto shake = std::size_t(1 + rng.integer(dims));
            for (std::size_t d : pick_dims(rng, dims, shake)) {
                s[d] += opt.gaussian_sigma * box.range(d) * rng.normal();
                if (s[d] < box.bounds[d].lower || s[d] > box.bounds[d].upper)
                    s[d] = rng.uniform(box.bounds[d].lower, box.bounds[d].upper);
            }
            sparks.push_back(std::move(s));
        }

        const std::size_t remaining = budget - result.evaluations_used;
        if (sparks.size() > remaining) sparks.resize(remaining);

        const std::vector<double> spark_values = evaluate_internal(objective, space, sparks);
        result.evaluations_used += sparks.size();

        std::vector<Scored> pool = fireworks;
        for (std::size_t i = 0; i < sparks.size(); ++i)
            pool.push_back({std::move(sparks[i]), spark_values[i]});

        // Elitist + random refill selection for the next generation.
        const std::size_t winner = best_of(pool);
        std::vector<Scored> next;
        next.push_back(pool[winner]);
        while (next.size() < opt.fireworks)
            next.push_back(pool[rng.integer(pool.size())]);
        fireworks = std::move(next);

        const double prev_best = best.value;
        if (fireworks[0].value < best.value) best = fireworks[0];
        result.history.push_back(best.value);

        const double improvement = prev_best - best.value;
        if (improvement > opt.restart_tolerance * std::abs(prev_best))
            stagnant_generations = 0;
        else
            ++stagnant_generations;
    }

    result.best = space.decode_internal(best.x);
    result.best_value = best.value;
    return result;
}

OptimizerResult island_ga_search(const BatchObjective& objective, const SearchSpace& space,
                                 std::size_t budget, std::uint64_t seed,
                                 const IslandGaOptions& opt) {
    space.validate();
    if (opt.islands == 0 || opt.island_size == 0)
        throw std::domain_error("need at least one island and one individual");
    if (opt.elites >= opt.island_size)
        throw std::domain_error("elites must leave room for children");
    const std::size_t total = opt.islands * opt.island_size;
    if (budget < total) throw std::domain_error("budget cannot cover the initial population");

    Rng rng(seed);
    const SearchSpace box = space.internal_view();  // all walking happens here
    const std::size_t dims = box.dims();

    OptimizerResult result;
    result.seed = seed;

    // The same deterministic design points the fireworks search screens,
    // spread round-robin across the islands, topped up with seeded draws.
    const std::size_t design = std::min<std::size_t>(opt.init_design, total);
    std::vector<Candidate> init = halton_design(box, design);
    for (std::size_t i = design; i < total; ++i) init.push_back(box.sample_uniform(rng));
    const std::vector<double> init_values = evaluate_internal(objective, space, init);
    result.evaluations_used = total;

    std::vector<std::vector<Scored>> islands(opt.islands);
    for (std::size_t i = 0; i < total; ++i)
        islands[i % opt.islands].push_back({std::move(init[i]), init_values[i]});

    Scored best = islands[0][0];
    for (const auto& isl : islands)
        for (const Scored& s : isl)
            if (s.value < best.value) best = s;
    result.history.push_back(best.value);

    auto tournament_pick = [&](const std::vector<Scored>& isl) -> const Scored& {
        std::size_t winner = std::size_t(rng.integer(isl.size()));
        for (std::size_t t = 1; t < opt.tournament; ++t) {
            const std::size_t rival = std::size_t(rng.integer(isl.size()));
            if (isl[rival].value < isl[winner].value) winner = rival;
        }
        return isl[winner];
    };

    auto by_value = [](const Scored& a, const Scored& b) { return a.value < b.value; };

    std::size_t generation = 0;
    while (result.evaluations_used < budget) {
        ++generation;

        // Draw every child for this generation up front (sequential RNG),
        // then evaluate them as a single ordered batch.
        const std::size_t children_per_island = opt.island_size - opt.elites;
        std::vector<Candidate> children;
        children.reserve(opt.islands * children_per_island);
        for (const auto& isl : islands) {
            for (std::size_t c = 0; c < children_per_island; ++c) {
                const Scored& pa = tournament_pick(isl);
                const Scored& pb = tournament_pick(isl);
                Candidate child(dims);
                if (rng.uniform() < opt.crossover_rate) {
                    for (std::size_t d = 0; d < dims; ++d) {
                        const double lo = std::min(pa.x[d], pb.x[d]);
                        const double hi = std::max(pa.x[d], pb.x[d]);
                        const double spread = (hi - lo) * opt.blx_alpha;
                        child[d] = box.clip(d, rng.uniform(lo - spread, hi + spread));
                    }
                } else {
                    child = pa.x;
                }
                for (std::size_t d = 0; d < dims; ++d) {
                    if (rng.uniform() < opt.mutation_rate)
                        child[d] = box.clip(
                            d, child[d] + opt.mutation_sigma * box.range(d) * rng.normal());
                }
                children.push_back(std::move(child));
            }
        }

        const std::size_t remaining = budget - result.evaluations_used;
        if (children.size() > remaining) children.resize(remaining);
        const std::vector<double> child_values = evaluate_internal(objective, space, children);
        result.evaluations_used += children.size();

        // Rebuild islands: elites survive, evaluated children replace the
        // rest, and any socket left by budget truncation keeps the old
        // next-best individual.
        std::size_t cursor = 0;
        for (auto& isl : islands) {
            std::sort(isl.begin(), isl.end(), by_value);
            std::vector<Scored> next(isl.begin(), isl.begin() + long(opt.elites));
            const std::size_t have = std::min(children_per_island, children.size() - cursor);
            for (std::size_t c = 0; c < have; ++c) {
                next.push_back({std::move(children[cursor]), child_values[cursor]});
                ++cursor;
            }
            for (std::size_t k = opt.elites; next.size() < opt.island_size; ++k)
                next.push_back(isl[k]);
            isl = std::move(next);
        }

        // Ring migration: island k's best replace island k+1's worst.
        if (opt.migration_interval > 0 && generation % opt.migration_interval == 0 &&
            opt.migrants > 0) {
            std::vector<std::vector<Scored>> outgoing(opt.islands);
            for (std::size_t k = 0; k < opt.islands; ++k) {
                std::vector<Scored> sorted = islands[k];
                std::sort(sorted.begin(), sorted.end(), by_value);
                sorted.resize(std::min(opt.migrants, sorted.size()));
                outgoing[k] = std::move(sorted);
            }
            for (std::size_t k = 0; k < opt.islands; ++k) {
                auto& target = islands[(k + 1) % opt.islands];
                std::sort(target.begin(), target.end(), by_value);
                const std::size_t incoming = outgoing[k].size();
                for (std::size_t m = 0; m < incoming; ++m)
                    target[target.size() - 1 - m] = outgoing[k][m];
            }
        }

        for (const auto& isl : islands)
            for (const Scored& s : isl)
                if (s.value < best.value) best = s;
        result.history.push_back(best.value);
    }

    result.best = space.decode_internal(best.x);
    result.best_value = best.value;
    return result;
}

}  // namespace feeddrive
