#pragma once

// (mu/mu_w, lambda)-CMA-ES with IPOP restarts for two-dimensional objectives.
//
// Learning rates, weights and damping follow the standard published
// defaults (Hansen, "The CMA Evolution Strategy: A Tutorial").

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bendbench/optim/evaluator.hpp"
#include "bendbench/optim/restart.hpp"
#include "bendbench/rng.hpp"

namespace bendbench {

enum class RestartMode { kNone, kIpop };

struct CmaConfig {
  int lambda = 6;                 // 4 + floor(3 ln 2)
  std::optional<double> sigma0;   // unset: 0.3 * (upper - lower)
  RestartMode restart = RestartMode::kIpop;
  double population_growth = 2.0;
  int stagnation_window = 120;
  double tol_fun = 1e-12;
  double tol_x = 1e-12;

  bool valid() const {
    return lambda >= 4 && (!sigma0 || *sigma0 > 0) && stagnation_window >= 1 &&
           population_growth >= 1.0 && tol_fun >= 0 && tol_x >= 0;
  }

  friend bool operator==(const CmaConfig&, const CmaConfig&) = default;
};

/// Optional instrumentation; called with the covariance after every update.
struct CmaHooks {
  std::function<void(const Eigen::Matrix2d&)> on_covariance;
};

/// Eigenvalue floor relative to the largest eigenvalue.
inline constexpr double kCovarianceFloor = 1e-20;

/// Resampling attempts before an out-of-box candidate is clamped.
inline constexpr int kMaxResample = 100;

/// One CMA-ES run on a shared evaluator, returning on target, budget,
/// stagnation, or step-size collapse.
inline void cmaes_single_run(Evaluator& eval, Rng& rng, const CmaConfig& cfg,
                             const RestartContext& ctx, const CmaHooks& hooks = {}) {
  using Vec = Eigen::Vector2d;
  using Mat = Eigen::Matrix2d;
  constexpr double n = 2.0;

  const Objective& f = eval.objective();
  const double lo = f.lower;
  const double hi = f.upper;

  const int lambda = std::max(4, static_cast<int>(std::lround(cfg.lambda * ctx.population_scale)));
  const int mu = lambda / 2;

  std::vector<double> w(mu);
  for (int i = 0; i < mu; ++i) w[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& wi : w) wi /= wsum;
  const double mueff = 1.0 / std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu =
      std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Vec mean(rng.uniform(lo, hi), rng.uniform(lo, hi));
  double sigma = cfg.sigma0.value_or(0.3 * (hi - lo));
  Mat C = Mat::Identity();
  Mat B = Mat::Identity();
  Vec D = Vec::Ones();  // sqrt of eigenvalues
  Vec pc = Vec::Zero();
  Vec ps = Vec::Zero();

  std::vector<Vec> xs(lambda);
  std::vector<double> fs(lambda);
  std::vector<int> order(lambda);

  double run_best = std::numeric_limits<double>::infinity();
  long last_improvement = 0;

  for (long gen = 0;; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      Vec x;
      for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        const Vec z(rng.normal(), rng.normal());
        x = mean + sigma * (B * D.asDiagonal() * z);
        if (x(0) >= lo && x(0) <= hi && x(1) >= lo && x(1) <= hi) break;
      }
      x = x.cwiseMax(lo).cwiseMin(hi);
      xs[k] = x;
      fs[k] = eval({x(0), x(1)});
      if (eval.done()) return;
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });

    const Vec old_mean = mean;
    mean.setZero();
    for (int i = 0; i < mu; ++i) mean += w[i] * xs[order[i]];
    const Vec y_w = (mean - old_mean) / sigma;

    const Mat inv_sqrt_C = B * D.cwiseInverse().asDiagonal() * B.transpose();
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_C * y_w);
    const double ps_norm = ps.norm();
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) / chi_n <
                      1.4 + 2.0 / (n + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    Mat rank_mu = Mat::Zero();
    for (int i = 0; i < mu; ++i) {
      const Vec yi = (xs[order[i]] - old_mean) / sigma;
      rank_mu += w[i] * yi * yi.transpose();
    }
    C = (1.0 - c1 - cmu) * C +
        c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
    C = 0.5 * (C + C.transpose());

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    Vec ev = es.eigenvalues();
    B = es.eigenvectors();
    const double ev_max = std::max(ev.maxCoeff(), std::numeric_limits<double>::min());
    ev = ev.cwiseMax(kCovarianceFloor * ev_max);
    C = B * ev.asDiagonal() * B.transpose();
    C = 0.5 * (C + C.transpose());
    D = ev.cwiseSqrt();
    if (hooks.on_covariance) hooks.on_covariance(C);

    const double gen_best = fs[order[0]];
    if (gen_best < run_best - cfg.tol_fun) {
      run_best = gen_best;
      last_improvement = gen;
    } else if (gen_best < run_best) {
      run_best = gen_best;
    }
    if (gen - last_improvement >= ctx.stagnation_window) return;
    if (!std::isfinite(sigma) || !mean.allFinite()) return;
    if (sigma * D.maxCoeff() < cfg.tol_x) return;
  }
}

/// Multi-restart CMA-ES: IPOP doubles lambda at each restart; kNone stops
/// after the first run.
inline RunResult cmaes_run(const Objective& f, const CmaConfig& cfg, RunBudget budget,
                           std::uint64_t seed, const CmaHooks& hooks = {}) {
  if (f.dim != 2) throw std::invalid_argument("cmaes_run: objective must be 2-D");
  if (!cfg.valid()) throw std::invalid_argument("cmaes_run: invalid CmaConfig");
  RestartPolicy policy{.stagnation_window = cfg.stagnation_window,
                       .population_growth = cfg.population_growth,
                       .max_restarts = cfg.restart == RestartMode::kNone
                                           ? 0
                                           : std::numeric_limits<int>::max()};
  auto inner = [&cfg, &hooks](Evaluator& eval, Rng& rng, const RestartContext& ctx) {
    cmaes_single_run(eval, rng, cfg, ctx, hooks);
  };
  return multi_restart(inner, policy)(f, budget, seed);
}

}  // namespace bendbench
