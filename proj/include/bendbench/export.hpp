#pragma once

// CSV writers for grids, trials, traces, summaries and sweeps.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <system_error>

#include "bendbench/harness.hpp"
#include "bendbench/objectives.hpp"

namespace bendbench {

/// Shortest decimal that round-trips to the same double; "inf"/"-inf"/"nan"
/// for non-finite values.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest round-trip digits; plain decimal for magnitudes in [1e-4, 1e16).
  const double a = std::abs(v);
  const auto fmt = (a == 0 || (a >= 1e-4 && a < 1e16)) ? std::chars_format::fixed
                                                       : std::chars_format::scientific;
  char buf[400];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, fmt);
  if (ec != std::errc{}) return "nan";
  return {buf, end};
}

inline std::string format_number(std::optional<double> v) {
  return v ? format_number(*v) : std::string("inf");
}

inline const char* format_bool(bool b) { return b ? "true" : "false"; }

/// Row-major with x2 as the outer loop.
inline void write_grid_csv(std::ostream& os, const GridSample& g) {
  os << "x1,x2,value,singular\n";
  for (std::size_t r = 0; r < g.ys.size(); ++r) {
    for (std::size_t c = 0; c < g.xs.size(); ++c) {
      os << format_number(g.xs[c]) << ',' << format_number(g.ys[r]) << ','
         << format_number(g.values[r][c]) << ',' << format_bool(g.singular_mask[r][c]) << '\n';
    }
  }
}

inline void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
  os << "trial_id,seed,fes_used,success,best_f\n";
  for (const auto& r : records) {
    os << r.trial_id << ',' << r.seed << ',' << r.fes_used << ',' << format_bool(r.success) << ','
       << format_number(r.best_f) << '\n';
  }
}

inline void write_traces_csv(std::ostream& os, std::span<const TrialRecord> records) {
  os << "trial_id,fes,best_f\n";
  for (const auto& r : records) {
    for (const auto& t : r.trace) {
      os << r.trial_id << ',' << t.fes << ',' << format_number(t.best_f) << '\n';
    }
  }
}

inline void write_summary_header(std::ostream& os) { os << "param_value,rt_s,rt_us,p_s,ert\n"; }

/// An absent param_value (plain run, no sweep) leaves the first field empty.
inline void write_summary_row(std::ostream& os, std::optional<double> param_value,
                              const ErtSummary& s) {
  if (param_value) os << format_number(*param_value);
  os << ',' << format_number(s.rt_s) << ',' << format_number(s.rt_us) << ','
     << format_number(s.p_s) << ',' << format_number(s.ert) << '\n';
}

inline double mean_fes(std::span<const TrialRecord> records) {
  double sum = 0.0;
  for (const auto& r : records) sum += static_cast<double>(r.fes_used);
  return records.empty() ? 0.0 : sum / static_cast<double>(records.size());
}

/// One row per value; norm_* columns are log10(x / min x) over the sweep,
/// with "inf" where the raw value is infinite.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
  std::vector<double> erts, means;
  for (const auto& e : sw.per_value) {
    erts.push_back(e.summary.ert);
    means.push_back(mean_fes(e.records));
  }
  const auto norm_ert = normalize_series(erts);
  const auto norm_mean = normalize_series(means);

  os << "param_value,rt_s,rt_us,p_s,ert,mean_fes,norm_ert,norm_mean_fes\n";
  for (std::size_t i = 0; i < sw.per_value.size(); ++i) {
    const auto& s = sw.per_value[i].summary;
    os << format_number(sw.per_value[i].value) << ',' << format_number(s.rt_s) << ','
       << format_number(s.rt_us) << ',' << format_number(s.p_s) << ',' << format_number(s.ert)
       << ',' << format_number(means[i]) << ',' << format_number(norm_ert[i]) << ','
       << format_number(norm_mean[i]) << '\n';
  }
}

/// Per-trial #FES for every sweep value (feeds box plots).
inline void write_sweep_trials_csv(std::ostream& os, const SweepResult& sw) {
  os << "param_value,trial_id,seed,fes_used,success,best_f\n";
  for (const auto& e : sw.per_value) {
    for (const auto& r : e.records) {
      os << format_number(e.value) << ',' << r.trial_id << ',' << r.seed << ',' << r.fes_used
         << ',' << format_bool(r.success) << ',' << format_number(r.best_f) << '\n';
    }
  }
}

}  // namespace bendbench
