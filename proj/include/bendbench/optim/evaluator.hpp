#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bendbench/objectives.hpp"

namespace bendbench {

struct RunBudget {
  std::int64_t max_fes = 100'000;
  double target_f = 1e-6;

  bool valid() const { return max_fes >= 1 && target_f > 0; }
  friend bool operator==(const RunBudget&, const RunBudget&) = default;
};

struct TracePoint {
  std::int64_t fes = 0;
  double best_f = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct RunResult {
  Point2 best_x{};
  double best_f = std::numeric_limits<double>::infinity();
  std::int64_t fes_used = 0;
  bool success = false;
  std::vector<TracePoint> trace;
  int restarts = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Counts evaluations against a budget and keeps the best-so-far record.
///
/// Every call to operator() evaluates the objective exactly once. The
/// evaluator reports done() as soon as the target is reached or the budget is
/// spent; calling it afterwards is a logic error. Success is measured on
/// f - optimum_f so that the FES of the first hit is what gets reported.
class Evaluator {
 public:
  Evaluator(const Objective& f, RunBudget budget) : f_(&f), budget_(budget) {
    if (!budget.valid()) throw std::invalid_argument("Evaluator: invalid run budget");
  }

  double operator()(Point2 x) {
    if (done()) throw std::logic_error("Evaluator: budget exhausted or target already reached");
    const double v = f_->eval(x);
    ++fes_;
    if (v < best_f_ || fes_ == 1) {
      best_f_ = v;
      best_x_ = x;
      trace_.push_back({fes_, v});
      if (v - f_->optimum_f <= budget_.target_f) hit_ = true;
    }
    return v;
  }

  bool done() const { return hit_ || fes_ >= budget_.max_fes; }
  bool target_reached() const { return hit_; }
  std::int64_t fes() const { return fes_; }
  std::int64_t remaining() const { return budget_.max_fes - fes_; }
  double best_f() const { return best_f_; }
  Point2 best_x() const { return best_x_; }
  const Objective& objective() const { return *f_; }

  RunResult result(int restarts = 0) const {
    return {.best_x = best_x_,
            .best_f = best_f_,
            .fes_used = fes_,
            .success = hit_,
            .trace = trace_,
            .restarts = restarts};
  }

 private:
  const Objective* f_;
  RunBudget budget_;
  std::int64_t fes_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  Point2 best_x_{};
  bool hit_ = false;
  std::vector<TracePoint> trace_;
};

inline Point2 clamp_to_box(Point2 x, double lo, double hi) {
  return {std::clamp(x.x1, lo, hi), std::clamp(x.x2, lo, hi)};
}

}  // namespace bendbench
