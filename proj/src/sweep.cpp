#include "feeddrive/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "feeddrive/motion.hpp"
#include "feeddrive/units.hpp"

namespace feeddrive {

const char* to_string(ConstraintMode mode) {
    return mode == ConstraintMode::unconstrained ? "unconstrained" : "constrained";
}

const char* to_string(SweepProtocol protocol) {
    return protocol == SweepProtocol::shared_pool ? "shared_pool" : "independent";
}

const char* to_string(TrendClass c) {
    switch (c) {
        case TrendClass::improving_then_flat: return "improving_then_flat";
        case TrendClass::interior_minimum: return "interior_minimum";
        case TrendClass::monotone: return "monotone";
        case TrendClass::irregular: return "irregular";
        case TrendClass::inconclusive: return "inconclusive";
    }
    return "unknown";
}

void ProcessGrid::validate() const {
    if (speeds_mm_s.empty() || accels_m_s2.empty())
        throw std::domain_error("process grid needs at least one speed and acceleration");
    for (double v : speeds_mm_s)
        if (!(v > 0.0)) throw std::domain_error("process speeds must be positive");
    for (double a : accels_m_s2)
        if (!(a > 0.0)) throw std::domain_error("process accelerations must be positive");
    if (!(stroke_mm > 0.0)) throw std::domain_error("stroke must be positive");
    if (cycles < 1) throw std::domain_error("cycle count must be at least 1");
    if (dwell_s < 0.0) throw std::domain_error("dwell cannot be negative");
}

double relative_change(double w_stable, double w_unstable) {
    if (!(w_unstable > 0.0))
        throw std::domain_error("relative change needs a positive unconstrained score");
    return (w_stable - w_unstable) / w_unstable;
}

namespace {

struct PooledEval {
    CandidateEvaluation eval;
    TuneAlgorithm source;
};

/// Objective that records every full evaluation while feeding the optimizer
/// its penalized scalar. Single-threaded: cells parallelize one level up.
BatchObjective recording_batch(const TuningScenario& scenario, TuneAlgorithm source,
                               std::vector<PooledEval>& pool) {
    return [&scenario, source, &pool](const std::vector<Candidate>& candidates) {
        std::vector<double> values(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            CandidateEvaluation eval =
                evaluate_candidate(scenario, gains_from_candidate(candidates[i]));
            values[i] = eval.penalized;
            pool.push_back({std::move(eval), source});
        }
        return values;
    };
}

/// Constrained-mode ranking scalar: raw W for feasible candidates, W plus
/// the margin penalty otherwise.
double constrained_scalar(const CandidateEvaluation& e) {
    return e.feasible ? e.w : e.w + constraint_penalty(e.stability);
}

/// Pool selection rule shared by the cell row and the per-optimizer
/// cross-check: unconstrained mode ranks by raw W; constrained mode prefers
/// any feasible candidate (by W), falling back to the penalized scalar.
struct Selection {
    std::size_t index = 0;
    double scalar = 0.0;  ///< value used for cross-optimizer agreement
    bool fallback = false;
    bool found = false;
};

template <typename Filter>
Selection select_best(const std::vector<PooledEval>& pool, ConstraintMode mode,
                      Filter&& include) {
    Selection sel;
    if (mode == ConstraintMode::unconstrained) {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!include(pool[i])) continue;
            if (!sel.found || pool[i].eval.w < sel.scalar) {
                sel.found = true;
                sel.index = i;
                sel.scalar = pool[i].eval.w;
            }
        }
        return sel;
    }
    // Constrained: best feasible by raw W first.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!include(pool[i]) || !pool[i].eval.feasible) continue;
        if (!sel.found || pool[i].eval.w < sel.scalar) {
            sel.found = true;
            sel.index = i;
            sel.scalar = pool[i].eval.w;
        }
    }
    if (sel.found) return sel;
    sel.fallback = true;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!include(pool[i])) continue;
        const double s = constrained_scalar(pool[i].eval);
        if (!sel.found || s < sel.scalar) {
            sel.found = true;
            sel.index = i;
            sel.scalar = s;
        }
    }
    return sel;
}

std::string cell_tag(const MotorSpec& motor, double speed, double accel) {
    std::ostringstream os;
    os << motor.id << "/" << speed << "mmps/" << accel << "mps2";
    return os.str();
}

SweepRow base_row(const MotorSpec& motor, double speed, double accel, double load_kgcm2,
                  double drive_coeff, ConstraintMode mode, std::uint64_t seed) {
    SweepRow row;
    row.motor_id = motor.id;
    row.motor_model = motor.model;
    row.speed_mm_s = speed;
    row.accel_m_s2 = accel;
    row.capacity_rotor =
        acceleration_capacity(motor.max_torque, motor.rotor_inertia, load_kgcm2);
    row.capacity_table = row.capacity_rotor * drive_coeff;
    row.inertia_ratio = feeddrive::inertia_ratio(motor, load_kgcm2);
    row.mode = mode;
    row.seed = seed;
    return row;
}

void fill_from_eval(SweepRow& row, const CandidateEvaluation& eval) {
    row.gains = eval.gains;
    row.w = eval.w;
    row.max_err_p = eval.performance.max_err_p;
    row.max_err_v = eval.performance.max_err_v;
    row.vars_v = eval.performance.vars_v;
    row.gain_margin_db = eval.stability.gain_margin_db;
    row.phase_margin_deg = eval.stability.phase_margin_deg;
    row.resonance_peak = eval.stability.resonance_peak;
    row.feasible = eval.feasible;
    row.diverged = eval.diverged;
}

std::vector<SweepRow> run_cell_shared_pool(const MotorSpec& motor, const MechanicalParams& params,
                                           double speed, double accel,
                                           const CommandTrajectory& trajectory,
                                           const ProcessGrid&, const SweepOptions& opt,
                                           std::uint64_t cell_seed, double load_kgcm2) {
    const std::string tag = cell_tag(motor, speed, accel);

    TuningScenario unc;
    unc.params = params;
    unc.trajectory = trajectory;
    unc.sim = opt.sim;
    unc.constrained = false;
    unc.id = tag;
    TuningScenario con = unc;
    con.constrained = true;

    // Four searches share one cell budget and one evaluation pool: each
    // optimizer explores both the raw and the penalized landscape so the
    // pool covers feasible and infeasible optima alike.
    std::vector<PooledEval> pool;
    pool.reserve(opt.budget);
    const SearchSpace space = SearchSpace::servo_gains();
    struct SubRun {
        const TuningScenario* scenario;
        TuneAlgorithm algo;
    };
    const SubRun sub_runs[4] = {
        {&unc, TuneAlgorithm::fireworks},
        {&unc, TuneAlgorithm::island_ga},
        {&con, TuneAlgorithm::fireworks},
        {&con, TuneAlgorithm::island_ga},
    };
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t sub_budget = opt.budget / 4 + (k < opt.budget % 4 ? 1 : 0);
        const BatchObjective objective =
            recording_batch(*sub_runs[k].scenario, sub_runs[k].algo, pool);
        const std::uint64_t sub_seed = derive_seed(cell_seed, k);
        if (sub_runs[k].algo == TuneAlgorithm::fireworks)
            fireworks_search(objective, space, sub_budget, sub_seed, opt.fwa);
        else
            island_ga_search(objective, space, sub_budget, sub_seed, opt.ga);
    }

    std::vector<SweepRow> rows;
    for (ConstraintMode mode : opt.modes) {
        SweepRow row = base_row(motor, speed, accel, load_kgcm2, params.drive_coeff, mode,
                                cell_seed);
        const auto any = [](const PooledEval&) { return true; };
        const Selection best = select_best(pool, mode, any);
        fill_from_eval(row, pool[best.index].eval);
        row.fallback = best.fallback;

        const Selection fwa = select_best(pool, mode, [](const PooledEval& p) {
            return p.source == TuneAlgorithm::fireworks;
        });
        const Selection ga = select_best(pool, mode, [](const PooledEval& p) {
            return p.source == TuneAlgorithm::island_ga;
        });
        const double lo = std::min(fwa.scalar, ga.scalar);
        row.cv_gap = std::abs(fwa.scalar - ga.scalar) / std::max(lo, 1e-9);
        row.cv_agree = row.cv_gap <= opt.cv_tolerance;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> run_cell_independent(const MotorSpec& motor, const MechanicalParams& params,
                                           double speed, double accel,
                                           const CommandTrajectory& trajectory,
                                           const ProcessGrid&, const SweepOptions& opt,
                                           std::uint64_t cell_seed, double load_kgcm2) {
    std::vector<SweepRow> rows;
    std::size_t mode_index = 0;
    for (ConstraintMode mode : opt.modes) {
        TuningScenario scenario;
        scenario.params = params;
        scenario.trajectory = trajectory;
        scenario.sim = opt.sim;
        scenario.constrained = mode == ConstraintMode::constrained;
        scenario.id = cell_tag(motor, speed, accel) + "/" + to_string(mode);

        const std::size_t fwa_budget = opt.budget / 2 + opt.budget % 2;
        const std::size_t ga_budget = opt.budget / 2;
        const TuneResult fwa =
            tune(scenario, TuneAlgorithm::fireworks, fwa_budget,
                 derive_seed(cell_seed, 2 * mode_index), 1, opt.fwa, opt.ga);
        const TuneResult ga =
            tune(scenario, TuneAlgorithm::island_ga, ga_budget,
                 derive_seed(cell_seed, 2 * mode_index + 1), 1, opt.fwa, opt.ga);
        const CrossValidation cv = cross_validate(fwa, ga, opt.cv_tolerance);

        SweepRow row = base_row(motor, speed, accel, load_kgcm2, params.drive_coeff, mode,
                                cell_seed);
        fill_from_eval(row, cv.consensus);
        row.cv_agree = cv.agree;
        row.cv_gap = cv.relative_gap;
        rows.push_back(std::move(row));
        ++mode_index;
    }
    return rows;
}

}  // namespace

SweepResult run_sweep(const std::vector<MotorSpec>& catalog, const MechanicalParams& mech,
                      const ProcessGrid& grid, const SweepOptions& options,
                      std::uint64_t master_seed) {
    if (catalog.empty()) throw std::domain_error("catalog is empty");
    grid.validate();
    mech.validate();
    options.sim.validate();
    if (options.modes.empty()) throw std::domain_error("no constraint modes requested");

    const std::size_t ga_floor = options.ga.islands * options.ga.island_size;
    const std::size_t fwa_floor = options.fwa.fireworks;
    if (options.protocol == SweepProtocol::shared_pool) {
        if (options.budget / 4 < std::max(ga_floor, fwa_floor))
            throw std::domain_error("cell budget cannot cover four searches");
    } else {
        if (options.budget / 2 < std::max(ga_floor, fwa_floor))
            throw std::domain_error("cell budget cannot cover both optimizers");
    }

    const double load_kgcm2 = mech.load_inertia / kKgcm2ToKgm2;

    struct Cell {
        const MotorSpec* motor;
        double speed;
        double accel;
        std::size_t index;
    };
    std::vector<Cell> cells;
    std::size_t index = 0;
    for (const MotorSpec& motor : catalog) {
        motor.validate();
        for (double speed : grid.speeds_mm_s)
            for (double accel : grid.accels_m_s2) cells.push_back({&motor, speed, accel, index++});
    }

    std::vector<std::vector<SweepRow>> per_cell(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            try {
                const Cell& cell = cells[i];
                const MechanicalParams params = instantiate_motor(mech, *cell.motor);
                const MotionProfile profile =
                    plan(grid.stroke_mm, cell.speed, cell.accel * 1000.0);
                const CommandTrajectory trajectory =
                    reciprocate(profile, grid.cycles, grid.dwell_s, options.sim.dt);
                const std::uint64_t cell_seed = derive_seed(master_seed, cell.index);
                per_cell[i] = options.protocol == SweepProtocol::shared_pool
                                  ? run_cell_shared_pool(*cell.motor, params, cell.speed,
                                                         cell.accel, trajectory, grid, options,
                                                         cell_seed, load_kgcm2)
                                  : run_cell_independent(*cell.motor, params, cell.speed,
                                                         cell.accel, trajectory, grid, options,
                                                         cell_seed, load_kgcm2);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, cells.size()));
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    result.master_seed = master_seed;
    result.budget = options.budget;
    result.protocol = options.protocol;
    result.load_inertia_kgcm2 = load_kgcm2;
    for (std::vector<SweepRow>& rows : per_cell)
        for (SweepRow& row : rows) result.rows.push_back(std::move(row));
    return result;
}

TrendClass classify_trend(const std::vector<double>& w, double band) {
    if (w.size() < 3) return TrendClass::inconclusive;
    const double w_min = *std::min_element(w.begin(), w.end());
    const double w_max = *std::max_element(w.begin(), w.end());
    // "Flat" is relative to the excursion of the whole series: wiggles that
    // are small against the capacity-starved end of the curve don't count
    // as structure.
    const double flat_ceiling = w_min + band * (w_max - w_min);
    const std::size_t i_min =
        std::size_t(std::min_element(w.begin(), w.end()) - w.begin());

    const bool improved = w.front() > flat_ceiling;

    // Descends (small wiggles inside the band allowed) and ends flat.
    bool descends_then_flat = true;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i + 1] > w[i] && w[i + 1] > flat_ceiling) descends_then_flat = false;
    if (improved && descends_then_flat && w.back() <= flat_ceiling)
        return TrendClass::improving_then_flat;

    // Clean descent into an interior minimum, then degradation past the band.
    if (improved && i_min > 0 && i_min + 1 < w.size() && w.back() > flat_ceiling) {
        bool prefix_descends = true;
        for (std::size_t i = 0; i < i_min; ++i)
            if (w[i + 1] > w[i] && w[i + 1] > flat_ceiling) prefix_descends = false;
        if (prefix_descends) return TrendClass::interior_minimum;
    }

    bool non_increasing = true, non_decreasing = true;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i + 1] > w[i]) non_increasing = false;
        if (w[i + 1] < w[i]) non_decreasing = false;
    }
    if (non_increasing || non_decreasing) return TrendClass::monotone;
    return TrendClass::irregular;
}

std::vector<TrendSummary> trend_report(const SweepResult& sweep) {
    // Collect the distinct (speed, accel, mode) groups in row order.
    std::vector<TrendSummary> groups;
    for (const SweepRow& row : sweep.rows) {
        auto match = std::find_if(groups.begin(), groups.end(), [&](const TrendSummary& g) {
            return g.speed_mm_s == row.speed_mm_s && g.accel_m_s2 == row.accel_m_s2 &&
                   g.mode == row.mode;
        });
        if (match == groups.end()) {
            TrendSummary g;
            g.speed_mm_s = row.speed_mm_s;
            g.accel_m_s2 = row.accel_m_s2;
            g.mode = row.mode;
            groups.push_back(g);
            match = groups.end() - 1;
        }
        match->capacities.push_back(row.capacity_rotor);
        match->w_values.push_back(row.w);
    }

    for (TrendSummary& g : groups) {
        // Order each series by ascending capacity.
        std::vector<std::size_t> order(g.capacities.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return g.capacities[a] < g.capacities[b];
        });
        TrendSummary sorted = g;
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.capacities[i] = g.capacities[order[i]];
            sorted.w_values[i] = g.w_values[order[i]];
        }
        g = std::move(sorted);
        g.classification = classify_trend(g.w_values);
        g.w_min = *std::min_element(g.w_values.begin(), g.w_values.end());
        g.w_last = g.w_values.back();
    }
    return groups;
}

}  // namespace feeddrive
