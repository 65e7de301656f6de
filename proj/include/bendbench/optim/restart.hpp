#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "bendbench/optim/evaluator.hpp"
#include "bendbench/rng.hpp"

namespace bendbench {

struct RestartPolicy {
  int stagnation_window = 120;    // iterations without improvement before an inner run gives up
  double population_growth = 2.0; // population multiplier applied at each restart
  int max_restarts = std::numeric_limits<int>::max();
};

/// What an inner run is told about its place in the restart sequence.
struct RestartContext {
  int restart_index = 0;
  double population_scale = 1.0;  // population_growth ^ restart_index
  int stagnation_window = 120;
};

/// Restarts `inner` on a shared evaluator until the target is hit or the
/// budget runs out.
///
/// `inner` is any callable `void(Evaluator&, Rng&, const RestartContext&)`
/// that returns when it stops making progress. Run k draws from substream k of
/// the caller's seed. FES accumulate across runs.
template <class InnerRun>
class MultiRestart {
 public:
  MultiRestart(InnerRun inner, RestartPolicy policy)
      : inner_(std::move(inner)), policy_(policy) {}

  RunResult operator()(const Objective& f, RunBudget budget, std::uint64_t seed) const {
    Evaluator eval(f, budget);
    int restarts = 0;
    for (int k = 0;; ++k) {
      Rng rng(seed, static_cast<std::uint64_t>(k));
      const RestartContext ctx{.restart_index = k,
                               .population_scale = std::pow(policy_.population_growth, k),
                               .stagnation_window = policy_.stagnation_window};
      const auto fes_before = eval.fes();
      inner_(eval, rng, ctx);
      restarts = k;
      if (eval.done() || k >= policy_.max_restarts) break;
      // an inner run that cannot spend budget would otherwise spin forever
      if (eval.fes() == fes_before) break;
    }
    return eval.result(restarts);
  }

  const RestartPolicy& policy() const { return policy_; }

 private:
  InnerRun inner_;
  RestartPolicy policy_;
};

template <class InnerRun>
MultiRestart<InnerRun> multi_restart(InnerRun inner, RestartPolicy policy) {
  return MultiRestart<InnerRun>(std::move(inner), policy);
}

}  // namespace bendbench
