#pragma once

// `bendbench` command line: eval, grid, run, sweep.
//
// Exit codes: 0 success, 2 argument/parse error, 3 I/O error,
// 4 objective construction error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bendbench/export.hpp"
#include "bendbench/harness.hpp"
#include "bendbench/run_spec.hpp"

namespace bendbench::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIoError = 3,
  kConstructionError = 4,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flag values; unset optionals leave the config (or default) untouched.
struct Overrides {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> trials;
  std::optional<std::int64_t> max_fes;
  std::optional<double> target;
  std::optional<double> xi, psi, upsilon, varpi, L;
  std::optional<double> penalty;
  std::optional<std::string> base, transform, optimizer, offset_mode;
  std::optional<std::uint64_t> rotation_seed;
  std::optional<double> angle;
};

inline void add_common_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config, "JSON run configuration");
  cmd.add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Base seed (falls back to config, then BENDBENCH_SEED)");
  cmd.add_option("--jobs", o.jobs, "Worker threads (default: available parallelism)");
  cmd.add_option("--trials", o.trials, "Number of independent trials");
  cmd.add_option("--max-fes", o.max_fes, "Evaluation budget per trial");
  cmd.add_option("--target", o.target, "Success threshold on f - f_opt");
  cmd.add_option("--xi", o.xi, "Forward box scale along x1 (> 0)");
  cmd.add_option("--psi", o.psi, "Forward box scale along x2 (> 0)");
  cmd.add_option("--upsilon", o.upsilon, "Inverse box scale along x1 (> 0)");
  cmd.add_option("--varpi", o.varpi, "Inverse box scale along x2 (> 0)");
  cmd.add_option("--L", o.L, "Box edge length used by the bend transform");
  cmd.add_option("--penalty", o.penalty, "Value returned at the inversion pole");
  cmd.add_option("--base", o.base, "Base function: bent_cigar | sphere");
  cmd.add_option("--transform", o.transform, "raw | rotated | conformal");
  cmd.add_option("--optimizer", o.optimizer, "cmaes | pso");
  cmd.add_option("--offset-mode", o.offset_mode, "Forward box offset: zero | shifted");
  cmd.add_option("--rotation-seed", o.rotation_seed, "Seed of the random rotation (rotated transform)");
  cmd.add_option("--angle", o.angle, "Fixed rotation angle in radians");
}

inline std::optional<std::uint64_t> parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// "x1,x2" -> Point2
inline std::optional<Point2> parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return std::nullopt;
  const auto a = parse_double(std::string_view(s).substr(0, comma));
  const auto b = parse_double(std::string_view(s).substr(comma + 1));
  if (!a || !b) return std::nullopt;
  return Point2{*a, *b};
}

/// "1,2,3" -> {1, 2, 3}
inline std::optional<std::vector<double>> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto v = parse_double(std::string_view(s).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Config file, then flags; the seed falls back to BENDBENCH_SEED when
/// neither sets it. Throws ConfigError on any invalid input.
inline RunSpec resolve_spec(const Overrides& o) {
  RunSpec s;
  bool seed_from_config = false;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    s = run_spec_from_json(j);
    seed_from_config = j.contains("trials") && j["trials"].contains("base_seed");
  }
  if (o.seed) {
    s.base_seed = *o.seed;
  } else if (!seed_from_config) {
    if (const char* env = std::getenv("BENDBENCH_SEED"); env && *env) {
      const auto v = parse_u64(env);
      if (!v) throw ConfigError("BENDBENCH_SEED is not a non-negative integer");
      s.base_seed = *v;
    }
  }
  if (o.trials) s.n_trials = *o.trials;
  if (o.max_fes) s.budget.max_fes = *o.max_fes;
  if (o.target) s.budget.target_f = *o.target;
  if (o.xi) s.objective.bend.xi = *o.xi;
  if (o.psi) s.objective.bend.psi = *o.psi;
  if (o.upsilon) s.objective.bend.upsilon = *o.upsilon;
  if (o.varpi) s.objective.bend.varpi = *o.varpi;
  if (o.L) s.objective.bend.L = *o.L;
  if (o.penalty) s.objective.penalty = *o.penalty;
  if (o.base) s.objective.base = *o.base;
  if (o.transform) s.objective.transform = parse_transform(*o.transform);
  if (o.optimizer) s.optimizer = parse_optimizer(*o.optimizer);
  if (o.offset_mode) s.objective.bend.forward_offset = parse_forward_offset(*o.offset_mode);
  if (o.rotation_seed) s.objective.rotation_seed = *o.rotation_seed;
  if (o.angle) s.objective.rotation_angle = *o.angle;
  s.validate();
  return s;
}

inline int resolve_jobs(const Overrides& o) {
  if (o.jobs) {
    if (*o.jobs < 1) throw ConfigError("--jobs must be >= 1");
    return *o.jobs;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

/// meta.json: the resolved spec plus what was derived from it. The output
/// directory and worker count are left out so reruns compare byte-for-byte.
inline nlohmann::json make_meta(const std::string& command, const RunSpec& s, const Objective& f) {
  return {{"command", command},
          {"spec", to_json(s)},
          {"objective_name", f.name},
          {"box", {f.lower, f.upper}},
          {"optimum_x", {f.optimum_x.x1, f.optimum_x.x2}},
          {"optimum_f", f.optimum_f}};
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "'");
  return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(os);
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

inline void write_meta(const std::filesystem::path& dir, const nlohmann::json& meta) {
  write_file(dir / "meta.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
}

inline std::string summary_line(const ErtSummary& s) {
  std::ostringstream os;
  os << "rt_s=" << format_number(s.rt_s) << " rt_us=" << format_number(s.rt_us)
     << " p_s=" << format_number(s.p_s) << " ert=" << format_number(s.ert)
     << " successes=" << s.n_success << '/' << s.n_trials;
  return os.str();
}

inline void cmd_eval(const RunSpec& spec, const std::vector<Point2>& points, std::ostream& out) {
  const Objective f = build_objective(spec.objective);
  char buf[64];
  for (const Point2& p : points) {
    if (const auto v = f.field(p)) {
      std::snprintf(buf, sizeof buf, "%.17g", *v);
      out << buf << '\n';
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", f.penalty);
      out << "singular(penalty=" << buf << ")\n";
    }
  }
}

inline void cmd_grid(const RunSpec& spec, int resolution, const std::string& out_dir) {
  const Objective f = build_objective(spec.objective);
  const GridSample g = grid_evaluate(f, resolution);
  const auto dir = prepare_out_dir(out_dir);
  write_file(dir / "grid.csv", [&](std::ostream& os) { write_grid_csv(os, g); });
  auto meta = make_meta("grid", spec, f);
  meta["resolution"] = resolution;
  write_meta(dir, meta);
}

inline ErtSummary cmd_run(const RunSpec& spec, int jobs, const std::string& out_dir) {
  const Objective f = build_objective(spec.objective);
  const auto records = run_trials(spec.trial_config(), jobs);
  const ErtSummary s = compute_ert(records);
  const auto dir = prepare_out_dir(out_dir);
  write_file(dir / "trials.csv", [&](std::ostream& os) { write_trials_csv(os, records); });
  write_file(dir / "traces.csv", [&](std::ostream& os) { write_traces_csv(os, records); });
  write_file(dir / "summary.csv", [&](std::ostream& os) {
    write_summary_header(os);
    write_summary_row(os, std::nullopt, s);
  });
  write_meta(dir, make_meta("run", spec, f));
  return s;
}

inline SweepResult cmd_sweep(const RunSpec& spec, SweepParam param,
                             const std::vector<double>& values, int jobs,
                             const std::string& out_dir) {
  RunSpec resolved = spec;
  resolved.objective.transform = TransformKind::kConformal;
  const Objective f = build_objective(resolved.objective);
  const SweepResult sw = sweep(param, values, resolved.trial_config(), jobs);
  const auto dir = prepare_out_dir(out_dir);
  const std::string stem = std::string("sweep_") + to_string(param);
  write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_sweep_csv(os, sw); });
  write_file(dir / (stem + "_trials.csv"),
             [&](std::ostream& os) { write_sweep_trials_csv(os, sw); });
  auto meta = make_meta("sweep", resolved, f);
  meta["sweep"] = {{"param", to_string(param)}, {"values", values}};
  write_meta(dir, meta);
  return sw;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformally bent benchmark landscapes: evaluation, grids, trials and sweeps",
               "bendbench"};
  app.require_subcommand(1);

  Overrides o;
  std::vector<std::string> point_args;
  int resolution = 201;
  std::string sweep_param;
  std::string sweep_values;

  auto* eval = app.add_subcommand("eval", "Evaluate the objective at points \"x1,x2\"");
  add_common_options(*eval, o);
  eval->add_option("points", point_args, "Points as x1,x2")->required();

  auto* grid = app.add_subcommand("grid", "Export grid.csv and meta.json");
  add_common_options(*grid, o);
  grid->add_option("--resolution", resolution, "Lattice points per axis [2, 4001]")
      ->capture_default_str();

  auto* run_cmd = app.add_subcommand("run", "Run repeated trials and write CSV summaries");
  add_common_options(*run_cmd, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one bend parameter");
  add_common_options(*sweep_cmd, o);
  sweep_cmd->add_option("--param", sweep_param, "xi | psi | upsilon | varpi")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated increasing values")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    const RunSpec spec = resolve_spec(o);
    if (eval->parsed()) {
      std::vector<Point2> points;
      for (const auto& a : point_args) {
        const auto p = parse_point(a);
        if (!p) throw ConfigError("malformed point '" + a + "' (expected x1,x2)");
        points.push_back(*p);
      }
      cmd_eval(spec, points, out);
    } else if (grid->parsed()) {
      if (resolution < 2 || resolution > 4001)
        throw ConfigError("--resolution must be in [2, 4001]");
      cmd_grid(spec, resolution, o.out);
    } else if (run_cmd->parsed()) {
      const int jobs = resolve_jobs(o);
      out << summary_line(cmd_run(spec, jobs, o.out)) << '\n';
    } else if (sweep_cmd->parsed()) {
      const auto param = parse_sweep_param(sweep_param);
      if (!param) throw ConfigError("unknown --param '" + sweep_param + "'");
      const auto values = parse_list(sweep_values);
      if (!values) throw ConfigError("malformed --values '" + sweep_values + "'");
      for (std::size_t i = 0; i < values->size(); ++i) {
        if (!((*values)[i] > 0)) throw ConfigError("sweep values must be positive");
        if (i > 0 && !((*values)[i] > (*values)[i - 1]))
          throw ConfigError("sweep values must be strictly increasing");
      }
      const int jobs = resolve_jobs(o);
      const auto sw = cmd_sweep(spec, *param, *values, jobs, o.out);
      for (const auto& e : sw.per_value)
        out << sweep_param << '=' << format_number(e.value) << ' ' << summary_line(e.summary)
            << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ConstructionError& e) {
    err << "error: " << e.what() << '\n';
    return kConstructionError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConstructionError;
  }
  return kOk;
}

}  // namespace bendbench::cli
