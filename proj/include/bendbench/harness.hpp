#pragma once

// Repeated trials, ERT aggregation and single-parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bendbench/errors.hpp"
#include "bendbench/objectives.hpp"
#include "bendbench/optim/cmaes.hpp"
#include "bendbench/optim/pso.hpp"

namespace bendbench {

enum class TransformKind { kRaw, kRotated, kConformal };
enum class OptimizerId { kCmaes, kPso };

/// Everything needed to rebuild an objective.
struct ObjectiveSpec {
  std::string base = "bent_cigar";
  TransformKind transform = TransformKind::kConformal;
  std::uint64_t rotation_seed = kBaselineRotationSeed;
  std::optional<double> rotation_angle;  // overrides rotation_seed when set
  BendParams bend{};
  double penalty = kDefaultPenalty;

  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

inline Objective base_objective(const std::string& name) {
  if (name == "bent_cigar") return bent_cigar_objective();
  if (name == "sphere") return sphere_objective();
  throw ConstructionError("unknown base objective '" + name + "'");
}

inline Objective build_objective(const ObjectiveSpec& spec) {
  Objective base = base_objective(spec.base);
  switch (spec.transform) {
    case TransformKind::kRaw:
      return base;
    case TransformKind::kRotated:
      return make_rotated(base, spec.rotation_angle ? make_rotation(*spec.rotation_angle)
                                                    : random_rotation(spec.rotation_seed));
    case TransformKind::kConformal: {
      Objective f = make_conformal(base, spec.bend, spec.penalty);
      f.lower = -spec.bend.L / 2.0;
      f.upper = spec.bend.L / 2.0;
      return f;
    }
  }
  throw ConstructionError("unknown transform kind");
}

struct TrialConfig {
  int n_trials = 100;
  std::uint64_t base_seed = 0;
  RunBudget budget{};
  OptimizerId optimizer = OptimizerId::kCmaes;
  ObjectiveSpec objective{};
  CmaConfig cma{};
  PsoConfig pso{};

  bool valid() const { return n_trials >= 1 && budget.valid() && cma.valid() && pso.valid(); }
};

struct TrialRecord {
  int trial_id = 0;
  std::uint64_t seed = 0;
  std::int64_t fes_used = 0;
  bool success = false;
  double best_f = 0.0;
  std::vector<TracePoint> trace;  // downsampled best-so-far

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ErtSummary {
  double rt_s = 0.0;
  double rt_us = 0.0;
  double p_s = 0.0;
  double ert = std::numeric_limits<double>::infinity();
  int n_success = 0;
  int n_trials = 0;
};

/// Best-so-far at FES checkpoints ceil(ratio^k), plus the final point of the
/// run (which is the first-success point for successful runs).
inline std::vector<TracePoint> downsample_trace(const RunResult& r, double ratio = 1.1) {
  std::vector<TracePoint> out;
  if (r.trace.empty()) return out;
  std::size_t idx = 0;
  double checkpoint = 1.0;
  std::int64_t last_cp = 0;
  while (true) {
    const auto cp = static_cast<std::int64_t>(std::ceil(checkpoint));
    checkpoint *= ratio;
    if (cp > r.fes_used) break;
    if (cp == last_cp) continue;
    last_cp = cp;
    while (idx + 1 < r.trace.size() && r.trace[idx + 1].fes <= cp) ++idx;
    out.push_back({cp, r.trace[idx].best_f});
  }
  if (out.empty() || out.back().fes != r.fes_used) out.push_back({r.fes_used, r.best_f});
  return out;
}

inline RunResult run_optimizer(const Objective& f, const TrialConfig& cfg, std::uint64_t seed) {
  switch (cfg.optimizer) {
    case OptimizerId::kCmaes:
      return cmaes_run(f, cfg.cma, cfg.budget, seed);
    case OptimizerId::kPso:
      return pso_run(f, cfg.pso, cfg.budget, seed);
  }
  throw std::invalid_argument("unknown optimizer");
}

/// Runs trials with seeds base_seed + i on up to `jobs` worker threads.
/// The result is ordered by trial_id and does not depend on `jobs`.
inline std::vector<TrialRecord> run_trials(const TrialConfig& cfg, int jobs = 1) {
  if (!cfg.valid()) throw std::invalid_argument("run_trials: invalid TrialConfig");
  const Objective f = build_objective(cfg.objective);
  std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.n_trials));

  auto run_one = [&](int i) {
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
    const RunResult r = run_optimizer(f, cfg, seed);
    records[i] = {.trial_id = i,
                  .seed = seed,
                  .fes_used = r.fes_used,
                  .success = r.success,
                  .best_f = r.best_f,
                  .trace = downsample_trace(r)};
  };

  const int workers = std::clamp(jobs, 1, cfg.n_trials);
  if (workers == 1) {
    for (int i = 0; i < cfg.n_trials; ++i) run_one(i);
    return records;
  }

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < cfg.n_trials; i = next++) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = cfg.n_trials;
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

/// ERT = RT_s + (1 - p_s) / p_s * RT_us, or +inf without successes.
inline ErtSummary compute_ert(std::span<const TrialRecord> records) {
  if (records.empty()) throw EmptyInput("compute_ert: no trial records");
  ErtSummary s;
  s.n_trials = static_cast<int>(records.size());
  double sum_s = 0.0, sum_us = 0.0;
  for (const auto& r : records) {
    if (r.success) {
      ++s.n_success;
      sum_s += static_cast<double>(r.fes_used);
    } else {
      sum_us += static_cast<double>(r.fes_used);
    }
  }
  const int n_fail = s.n_trials - s.n_success;
  s.rt_s = s.n_success > 0 ? sum_s / s.n_success : 0.0;
  s.rt_us = n_fail > 0 ? sum_us / n_fail : 0.0;
  s.p_s = static_cast<double>(s.n_success) / s.n_trials;
  s.ert = s.n_success > 0 ? s.rt_s + (1.0 - s.p_s) / s.p_s * s.rt_us
                          : std::numeric_limits<double>::infinity();
  return s;
}

enum class SweepParam { kXi, kPsi, kUpsilon, kVarpi };

inline const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kXi: return "xi";
    case SweepParam::kPsi: return "psi";
    case SweepParam::kUpsilon: return "upsilon";
    case SweepParam::kVarpi: return "varpi";
  }
  return "?";
}

inline std::optional<SweepParam> parse_sweep_param(const std::string& s) {
  if (s == "xi") return SweepParam::kXi;
  if (s == "psi") return SweepParam::kPsi;
  if (s == "upsilon") return SweepParam::kUpsilon;
  if (s == "varpi") return SweepParam::kVarpi;
  return std::nullopt;
}

inline double& bend_field(BendParams& p, SweepParam which) {
  switch (which) {
    case SweepParam::kXi: return p.xi;
    case SweepParam::kPsi: return p.psi;
    case SweepParam::kUpsilon: return p.upsilon;
    case SweepParam::kVarpi: return p.varpi;
  }
  throw std::invalid_argument("unknown sweep parameter");
}

struct SweepEntry {
  double value = 0.0;
  ErtSummary summary;
  std::vector<TrialRecord> records;
};

struct SweepResult {
  SweepParam param = SweepParam::kXi;
  std::vector<double> values;
  std::vector<SweepEntry> per_value;
};

/// For each value, rebuilds the conformal objective with only `param`
/// changed and aggregates a full trial set.
inline SweepResult sweep(SweepParam param, std::span<const double> values,
                         const TrialConfig& base_cfg, int jobs = 1) {
  if (values.empty()) throw EmptyInput("sweep: no parameter values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i]))
      throw NonPositiveInput("sweep: parameter values must be positive");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw std::invalid_argument("sweep: parameter values must be strictly increasing");
  }
  SweepResult out;
  out.param = param;
  out.values.assign(values.begin(), values.end());
  for (double v : values) {
    TrialConfig cfg = base_cfg;
    cfg.objective.transform = TransformKind::kConformal;
    bend_field(cfg.objective.bend, param) = v;
    SweepEntry e{.value = v, .summary = {}, .records = run_trials(cfg, jobs)};
    e.summary = compute_ert(e.records);
    out.per_value.push_back(std::move(e));
  }
  return out;
}

/// log10(raw_i / min(raw)); +inf entries come back as nullopt.
inline std::vector<std::optional<double>> normalize_series(std::span<const double> raw) {
  if (raw.empty()) throw EmptyInput("normalize_series: empty series");
  double lo = std::numeric_limits<double>::infinity();
  for (double v : raw) {
    if (std::isnan(v) || !(v > 0)) throw NonPositiveInput("normalize_series: values must be > 0");
    if (std::isfinite(v)) lo = std::min(lo, v);
  }
  std::vector<std::optional<double>> out;
  out.reserve(raw.size());
  for (double v : raw) {
    if (std::isfinite(v)) out.emplace_back(std::log10(v / lo));
    else out.emplace_back(std::nullopt);
  }
  return out;
}

}  // namespace bendbench
