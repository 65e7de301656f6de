#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bendbench/optim/evaluator.hpp"
#include "bendbench/rng.hpp"

namespace bendbench {

struct PsoConfig {
  int swarm_size = 40;
  double inertia = 0.7298;
  double c1 = 1.49618;
  double c2 = 1.49618;
  double v_max_fraction = 0.5;  // of the box width, per dimension

  bool valid() const {
    return swarm_size >= 2 && inertia > 0 && inertia < 1 && c1 > 0 && c2 > 0 &&
           v_max_fraction > 0;
  }

  friend bool operator==(const PsoConfig&, const PsoConfig&) = default;
};

/// Global-best PSO with inertia weight.
///
/// Positions start uniform in the box, velocities uniform in [-v_max, v_max].
/// Velocities are clamped to v_max; a coordinate that leaves the box is
/// clamped to the wall and its velocity zeroed. The global best is refreshed
/// after every evaluation.
inline RunResult pso_run(const Objective& f, const PsoConfig& cfg, RunBudget budget,
                         std::uint64_t seed) {
  if (f.dim != 2) throw std::invalid_argument("pso_run: objective must be 2-D");
  if (!cfg.valid()) throw std::invalid_argument("pso_run: invalid PsoConfig");

  Evaluator eval(f, budget);
  Rng rng(seed);
  const double lo = f.lower;
  const double hi = f.upper;
  const double v_max = cfg.v_max_fraction * (hi - lo);
  const auto n = static_cast<std::size_t>(cfg.swarm_size);

  using Vec = std::array<double, 2>;
  std::vector<Vec> pos(n), vel(n), pbest(n);
  std::vector<double> pbest_f(n, std::numeric_limits<double>::infinity());
  Vec gbest{};
  double gbest_f = std::numeric_limits<double>::infinity();

  auto evaluate = [&](std::size_t i) {
    const double v = eval({pos[i][0], pos[i][1]});
    if (v < pbest_f[i]) {
      pbest_f[i] = v;
      pbest[i] = pos[i];
    }
    if (v < gbest_f) {
      gbest_f = v;
      gbest = pos[i];
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < 2; ++d) {
      pos[i][d] = rng.uniform(lo, hi);
      vel[i][d] = rng.uniform(-v_max, v_max);
    }
  }
  for (std::size_t i = 0; i < n && !eval.done(); ++i) evaluate(i);

  while (!eval.done()) {
    for (std::size_t i = 0; i < n && !eval.done(); ++i) {
      for (int d = 0; d < 2; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double v = cfg.inertia * vel[i][d] + cfg.c1 * r1 * (pbest[i][d] - pos[i][d]) +
                   cfg.c2 * r2 * (gbest[d] - pos[i][d]);
        v = std::clamp(v, -v_max, v_max);
        double x = pos[i][d] + v;
        if (x < lo || x > hi) {
          x = std::clamp(x, lo, hi);
          v = 0.0;
        }
        pos[i][d] = x;
        vel[i][d] = v;
      }
      evaluate(i);
    }
  }
  return eval.result();
}

}  // namespace bendbench
