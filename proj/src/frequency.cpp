#include "feeddrive/frequency.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace feeddrive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinGainMarginDb = 6.0;
constexpr double kMinPhaseMarginDeg = 30.0;
constexpr double kMaxResonancePeak = 1.4;

}  // namespace

FrequencyGrid FrequencyGrid::log_spaced(double omega_min, double omega_max, std::size_t count) {
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw std::domain_error("grid requires 0 < omega_min < omega_max");
    if (count < 2) throw std::domain_error("grid requires at least 2 points");
    FrequencyGrid g;
    g.omega.reserve(count);
    const double log_min = std::log10(omega_min);
    const double step = (std::log10(omega_max) - log_min) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) g.omega.push_back(std::pow(10.0, log_min + double(i) * step));
    g.omega.front() = omega_min;
    g.omega.back() = omega_max;
    return g;
}

TransferFunction velocity_plant(const MechanicalParams& p) {
    p.validate();
    const double jm = p.motor_inertia;
    const double jl = p.load_inertia;
    const double j = jm + jl;
    // ωl(s)/T(s) = (B·s + K) / (s·(Jm·Jl·s² + (Jm+Jl)·B·s + (Jm+Jl)·K))
    return {{p.stiffness, p.damping},
            {0.0, j * p.stiffness, j * p.damping, jm * jl}};
}

TransferFunction velocity_controller(const ControlGains& g) {
    return {{g.kvi, g.kvp}, {0.0, 1.0}};
}

TransferFunction open_position_loop(const MechanicalParams& params, const ControlGains& gains) {
    gains.validate();
    const TransferFunction l_v = series(velocity_controller(gains), velocity_plant(params));
    const TransferFunction g_v = unity_feedback(l_v);
    // L_p = kp · G_v / s, the loop seen from the position summing junction.
    return {poly_scale(g_v.num, gains.kp), poly_shift_up(g_v.den)};
}

TransferFunction closed_position_loop(const MechanicalParams& params,
                                      const ControlGains& gains) {
    TransferFunction closed = unity_feedback(open_position_loop(params, gains));
    cancel_origin_pairs(closed.num, closed.den);
    return closed;
}

std::vector<std::complex<double>> loop_response(const MechanicalParams& params,
                                                const ControlGains& gains,
                                                const FrequencyGrid& grid) {
    const TransferFunction loop = open_position_loop(params, gains);
    std::vector<std::complex<double>> out;
    out.reserve(grid.omega.size());
    for (double w : grid.omega) out.push_back(loop.eval({0.0, w}));
    return out;
}

std::vector<BodePoint> bode_points(const FrequencyGrid& grid,
                                   const std::vector<std::complex<double>>& response) {
    if (response.size() != grid.omega.size())
        throw std::domain_error("response length does not match the grid");
    std::vector<BodePoint> out;
    out.reserve(response.size());
    double prev_phase = 0.0;
    for (std::size_t i = 0; i < response.size(); ++i) {
        const double mag = std::abs(response[i]);
        double phase = std::arg(response[i]);
        if (i > 0) {
            // Unwrap: keep successive phase steps within ±π.
            while (phase - prev_phase > std::numbers::pi) phase -= 2.0 * std::numbers::pi;
            while (phase - prev_phase < -std::numbers::pi) phase += 2.0 * std::numbers::pi;
        }
        prev_phase = phase;
        out.push_back({grid.omega[i], 20.0 * std::log10(mag), phase * 180.0 / std::numbers::pi});
    }
    return out;
}

namespace {

struct Crossing {
    double omega;
    double value;  // the other channel, interpolated at the crossing
};

// Finds zero crossings of `sig` along the grid and linearly interpolates
// `other` (and log-ω) at each crossing point.
std::vector<Crossing> zero_crossings(const std::vector<BodePoint>& pts,
                                     const std::vector<double>& sig,
                                     const std::vector<double>& other) {
    std::vector<Crossing> out;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (sig[i] == 0.0) {
            out.push_back({pts[i].omega, other[i]});
        } else if (i + 1 < sig.size() && std::isfinite(sig[i]) && std::isfinite(sig[i + 1]) &&
                   sig[i] * sig[i + 1] < 0.0) {
            const double t = sig[i] / (sig[i] - sig[i + 1]);
            const double logw =
                std::log10(pts[i].omega) +
                t * (std::log10(pts[i + 1].omega) - std::log10(pts[i].omega));
            out.push_back({std::pow(10.0, logw), other[i] + t * (other[i + 1] - other[i])});
        }
    }
    return out;
}

}  // namespace

MarginReport margins(const FrequencyGrid& grid,
                     const std::vector<std::complex<double>>& response) {
    if (response.size() < 2) throw std::domain_error("margins need at least 2 points");
    const std::vector<BodePoint> pts = bode_points(grid, response);

    std::vector<double> mag_db(pts.size()), phase_deg(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mag_db[i] = pts[i].magnitude_db;
        phase_deg[i] = pts[i].phase_deg;
    }

    MarginReport rep;
    rep.phase_margin_deg = kInf;
    rep.gain_margin_db = kInf;
    rep.gain_crossover_rad_s = 0.0;
    rep.phase_crossover_rad_s = 0.0;

    // Gain crossovers: |L| through 0 dB; margin 180° + phase there.
    for (const Crossing& c : zero_crossings(pts, mag_db, phase_deg)) {
        const double pm = 180.0 + c.value;
        if (pm < rep.phase_margin_deg) {
            rep.phase_margin_deg = pm;
            rep.gain_crossover_rad_s = c.omega;
        }
    }

    // Phase crossovers: phase through −180°; margin −|L|dB there.
    std::vector<double> phase_off(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) phase_off[i] = phase_deg[i] + 180.0;
    for (const Crossing& c : zero_crossings(pts, phase_off, mag_db)) {
        const double am = -c.value;
        if (am < rep.gain_margin_db) {
            rep.gain_margin_db = am;
            rep.phase_crossover_rad_s = c.omega;
        }
    }
    return rep;
}

double relative_peak(const TransferFunction& tf, const FrequencyGrid& grid) {
    if (grid.omega.size() < 2) throw std::domain_error("grid too small");
    const double dc = std::abs(tf.eval({0.0, grid.omega.front()}));
    if (!(dc > 0.0) || !std::isfinite(dc)) return kInf;
    double peak = 0.0;
    for (double w : grid.omega) peak = std::max(peak, std::abs(tf.eval({0.0, w})));
    return peak / dc;
}

ResonancePeak resonance_peak(const MechanicalParams& params, const ControlGains& gains,
                             const FrequencyGrid& grid) {
    const TransferFunction closed = closed_position_loop(params, gains);

    ResonancePeak out;
    bool degenerate = true;
    for (double c : closed.num)
        if (c != 0.0) degenerate = false;
    if (degenerate) {
        // No signal path at all (kp or the whole velocity loop is zero).
        out.mr = kInf;
        out.closed_loop_stable = false;
        return out;
    }

    out.closed_loop_stable = routh_hurwitz_stable(closed.den);
    out.mr = out.closed_loop_stable ? relative_peak(closed, grid) : kInf;
    return out;
}

StabilityReport stability_report(const MechanicalParams& params, const ControlGains& gains,
                                 const FrequencyGrid& grid) {
    const MarginReport m = margins(grid, loop_response(params, gains, grid));
    const ResonancePeak r = resonance_peak(params, gains, grid);

    StabilityReport rep;
    rep.gain_margin_db = m.gain_margin_db;
    rep.phase_margin_deg = m.phase_margin_deg;
    rep.gain_crossover_rad_s = m.gain_crossover_rad_s;
    rep.phase_crossover_rad_s = m.phase_crossover_rad_s;
    rep.resonance_peak = r.mr;
    rep.closed_loop_stable = r.closed_loop_stable;
    rep.feasible = check_constraints(rep).feasible;
    return rep;
}

ConstraintCheck check_constraints(const StabilityReport& report) {
    ConstraintCheck c;
    c.violation_gain_margin =
        std::max(0.0, (kMinGainMarginDb - report.gain_margin_db) / kMinGainMarginDb);
    c.violation_phase_margin =
        std::max(0.0, (kMinPhaseMarginDeg - report.phase_margin_deg) / kMinPhaseMarginDeg);
    c.violation_resonance =
        std::max(0.0, (report.resonance_peak - kMaxResonancePeak) / kMaxResonancePeak);
    c.feasible = report.gain_margin_db > kMinGainMarginDb &&
                 report.phase_margin_deg > kMinPhaseMarginDeg &&
                 report.resonance_peak < kMaxResonancePeak;
    return c;
}

}  // namespace feeddrive
