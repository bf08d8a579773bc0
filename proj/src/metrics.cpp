#include "feeddrive/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "feeddrive/simulation.hpp"

namespace feeddrive {

void ErrorAccumulator::add(double err_p, double err_v) {
    ++count_;
    max_abs_err_p_ = std::max(max_abs_err_p_, std::abs(err_p));
    max_abs_err_v_ = std::max(max_abs_err_v_, std::abs(err_v));
    // Welford update for the running variance of the velocity error.
    const double delta = err_v - mean_err_v_;
    mean_err_v_ += delta / double(count_);
    m2_err_v_ += delta * (err_v - mean_err_v_);
}

PerformanceReport ErrorAccumulator::finish() const {
    if (count_ == 0) throw std::domain_error("no samples accumulated");
    PerformanceReport r;
    r.max_err_p = max_abs_err_p_;
    r.max_err_v = max_abs_err_v_;
    r.vars_v = m2_err_v_ / double(count_);
    r.w = 0.5 * r.max_err_p + 0.25 * r.max_err_v + 0.25 * r.vars_v;
    return r;
}

PerformanceReport evaluate(const Trace& trace) {
    if (trace.samples.empty()) throw std::domain_error("trace is empty");
    ErrorAccumulator acc;
    for (const TraceSample& s : trace.samples) {
        acc.add(s.pos_cmd - s.pos_actual, s.vel_cmd - s.vel_actual);
    }
    return acc.finish();
}

bool better_than(const PerformanceReport& a, const PerformanceReport& b) {
    if (a.w != b.w) return a.w < b.w;
    return a.max_err_p < b.max_err_p;
}

}  // namespace feeddrive
