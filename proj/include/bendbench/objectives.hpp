#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bendbench/errors.hpp"
#include "bendbench/xform.hpp"

namespace bendbench {

/// Value returned at the inversion pole by conformal objectives.
inline constexpr double kDefaultPenalty = 1e12;

/// Scalar field over the box [lower, upper]^2 with known optimum.
///
/// `field` returns nullopt where the underlying transform is singular;
/// eval() substitutes `penalty` there. Instances are immutable once built and
/// may be evaluated concurrently.
struct Objective {
  using Field = std::function<std::optional<double>(Point2)>;

  std::string name;
  int dim = 2;
  double lower = -5.0;
  double upper = 5.0;
  Point2 optimum_x{};
  double optimum_f = 0.0;
  double penalty = kDefaultPenalty;
  Field field;

  double eval(Point2 x) const { return field(x).value_or(penalty); }
  bool singular_at(Point2 x) const { return !field(x).has_value(); }
  bool contains(Point2 x) const {
    return x.x1 >= lower && x.x1 <= upper && x.x2 >= lower && x.x2 <= upper;
  }
};

/// x1^2 + 1e6 * x2^2
inline double bent_cigar(Point2 x) { return x.x1 * x.x1 + 1e6 * x.x2 * x.x2; }

inline double sphere(Point2 x) { return x.x1 * x.x1 + x.x2 * x.x2; }

inline Objective bent_cigar_objective() {
  return {.name = "bent_cigar",
          .optimum_x = {0.0, 0.0},
          .optimum_f = 0.0,
          .field = [](Point2 x) -> std::optional<double> { return bent_cigar(x); }};
}

inline Objective sphere_objective() {
  return {.name = "sphere",
          .optimum_x = {0.0, 0.0},
          .optimum_f = 0.0,
          .field = [](Point2 x) -> std::optional<double> { return sphere(x); }};
}

/// base(r x); the optimum moves to r^T base.optimum_x.
inline Objective make_rotated(const Objective& base, const Rotation2& r) {
  if (base.dim != 2) throw ConstructionError("make_rotated: base objective must be 2-D");
  Objective out = base;
  out.name = "rotated_" + base.name;
  out.optimum_x = r.apply_transpose(base.optimum_x);
  out.field = [inner = base.field, r](Point2 x) { return inner(r.apply(x)); };
  return out;
}

/// base(bend_pipeline(x, p)), with `penalty` at the pole.
inline Objective make_conformal(const Objective& base, const BendParams& p,
                                double penalty = kDefaultPenalty) {
  if (base.dim != 2) throw ConstructionError("make_conformal: base objective must be 2-D");
  if (!p.valid()) throw ConstructionError("make_conformal: bend parameters must be positive");
  Objective out = base;
  out.name = "conformal_" + base.name;
  out.penalty = penalty;
  try {
    out.optimum_x = bend_preimage(base.optimum_x, p);
  } catch (const SingularPoint&) {
    throw ConstructionError("make_conformal: base optimum has no finite preimage");
  }
  out.field = [inner = base.field, p](Point2 x) -> std::optional<double> {
    const auto y = try_bend_pipeline(x, p);
    if (!y) return std::nullopt;
    return inner(*y);
  };
  return out;
}

/// Uniform resolution x resolution lattice over an objective's box.
/// values/singular_mask are indexed [row][col] with row along x2, col along x1.
struct GridSample {
  int resolution = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> singular_mask;
};

/// i-th of n evenly spaced points spanning [lo, hi]; endpoints are exact.
inline double lattice_coord(double lo, double hi, int i, int n) {
  if (i == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

inline GridSample grid_evaluate(const Objective& f, int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid_evaluate: resolution must be >= 2");
  GridSample g;
  g.resolution = resolution;
  const auto n = static_cast<std::size_t>(resolution);
  g.xs.resize(n);
  g.ys.resize(n);
  for (int i = 0; i < resolution; ++i) {
    g.xs[i] = lattice_coord(f.lower, f.upper, i, resolution);
    g.ys[i] = g.xs[i];
  }
  g.values.assign(n, std::vector<double>(n, 0.0));
  g.singular_mask.assign(n, std::vector<bool>(n, false));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto v = f.field({g.xs[c], g.ys[r]});
      g.values[r][c] = v.value_or(f.penalty);
      g.singular_mask[r][c] = !v.has_value();
    }
  }
  return g;
}

}  // namespace bendbench
