#pragma once

#include <cstddef>

namespace feeddrive {

struct Trace;

/// Scalar tracking-quality summary of one closed-loop run.
///
/// W folds the three error statistics into a single figure of merit with
/// fixed weights; the three terms keep their native units (mm, mm/s,
/// (mm/s)²) and are summed as-is. Smaller is better.
struct PerformanceReport {
    double max_err_p = 0.0;  ///< max |position command − actual|, mm
    double max_err_v = 0.0;  ///< max |velocity command − actual|, mm/s
    double vars_v = 0.0;     ///< population variance of the velocity error, (mm/s)²
    double w = 0.0;          ///< 0.5·max_err_p + 0.25·max_err_v + 0.25·vars_v
};

/// Streaming accumulator for PerformanceReport statistics. Feed one
/// (position error, velocity error) pair per sample; variance uses Welford's
/// algorithm so no samples are stored.
class ErrorAccumulator {
  public:
    void add(double err_p, double err_v);
    std::size_t count() const { return count_; }

    /// Finalizes the report. Requires at least one sample.
    PerformanceReport finish() const;

  private:
    std::size_t count_ = 0;
    double max_abs_err_p_ = 0.0;
    double max_abs_err_v_ = 0.0;
    double mean_err_v_ = 0.0;
    double m2_err_v_ = 0.0;
};

/// Computes the report over a full stored trace.
/// Throws std::domain_error on an empty trace.
PerformanceReport evaluate(const Trace& trace);

/// Total order used to rank candidate tunings: lower W wins, ties broken by
/// lower max_err_p. Returns true when `a` is strictly better than `b`.
bool better_than(const PerformanceReport& a, const PerformanceReport& b);

}  // namespace feeddrive
