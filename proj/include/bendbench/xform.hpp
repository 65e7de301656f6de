#pragma once

// Coordinate transformations for conformally bent landscapes.
//
// A point x in the search box is carried through three stages:
//   x'   = x o s_fwd + o_fwd              (forward box: shrink into the plane)
//   x''  = decomplex(1 / complex(x'))     (inversion, a Moebius map)
//   x''' = (x'' - o_inv) / s_inv           (inverse box: back to search units)
// with s_fwd = (2 xi / L, -2 psi / L), s_inv = (2 upsilon / L, -2 varpi / L),
// o_inv = (-upsilon, varpi) and o_fwd either (0, 0) or (-xi, psi).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "bendbench/errors.hpp"
#include "bendbench/rng.hpp"

namespace bendbench {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }

constexpr Point2 hadamard(Point2 a, Point2 b) { return {a.x1 * b.x1, a.x2 * b.x2}; }
constexpr Point2 hadamard_div(Point2 a, Point2 b) { return {a.x1 / b.x1, a.x2 / b.x2}; }

inline bool is_finite(Point2 p) { return std::isfinite(p.x1) && std::isfinite(p.x2); }

enum class ForwardOffset {
  kZero,      // o_fwd = (0, 0); the configuration used for all reported experiments
  kShifted,  // o_fwd = (-xi, psi)
};

struct BendParams {
  double xi = 1.0;
  double psi = 1.0;
  double upsilon = 1.0;
  double varpi = 1.0;
  double L = 10.0;
  ForwardOffset forward_offset = ForwardOffset::kZero;

  bool valid() const {
    return xi > 0 && psi > 0 && upsilon > 0 && varpi > 0 && L > 0 && std::isfinite(xi) &&
           std::isfinite(psi) && std::isfinite(upsilon) && std::isfinite(varpi) &&
           std::isfinite(L);
  }

  Point2 forward_scale() const { return {2.0 * xi / L, -2.0 * psi / L}; }
  Point2 forward_shift() const {
    return forward_offset == ForwardOffset::kZero ? Point2{0.0, 0.0} : Point2{-xi, psi};
  }
  Point2 inverse_scale() const { return {2.0 * upsilon / L, -2.0 * varpi / L}; }
  Point2 inverse_shift() const { return {-upsilon, varpi}; }

  friend bool operator==(const BendParams&, const BendParams&) = default;
};

/// Real coefficients of w = (a z + b) / (c z + d).
class MobiusCoeffs {
 public:
  static constexpr double kMinDeterminant = 1e-12;

  MobiusCoeffs(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
    if (!(std::abs(a * d - b * c) > kMinDeterminant)) {
      throw std::invalid_argument("MobiusCoeffs: ad - bc must be nonzero");
    }
  }

  static MobiusCoeffs inversion() { return {0.0, 1.0, 1.0, 0.0}; }
  static MobiusCoeffs identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double determinant() const { return a_ * d_ - b_ * c_; }

 private:
  double a_, b_, c_, d_;
};

/// Squared distance to the pole below which a Moebius map is treated as singular.
inline constexpr double kPoleTolerance = 1e-30;

/// Moebius map on (Re z, Im z); nullopt when z sits on the pole -d/c.
inline std::optional<Point2> try_mobius(Point2 z, const MobiusCoeffs& m) {
  // den = c z + d; w = (a z + b) * conj(den) / |den|^2
  const double den_re = m.c() * z.x1 + m.d();
  const double den_im = m.c() * z.x2;
  if (m.c() != 0.0) {
    const double pole_re = -m.d() / m.c();
    const double dr = z.x1 - pole_re;
    if (dr * dr + z.x2 * z.x2 < kPoleTolerance) return std::nullopt;
  }
  const double num_re = m.a() * z.x1 + m.b();
  const double num_im = m.a() * z.x2;
  const double den2 = den_re * den_re + den_im * den_im;
  return Point2{(num_re * den_re + num_im * den_im) / den2,
                (num_im * den_re - num_re * den_im) / den2};
}

inline Point2 mobius(Point2 z, const MobiusCoeffs& m) {
  if (auto w = try_mobius(z, m)) return *w;
  throw SingularPoint("mobius: point coincides with the pole");
}

inline Point2 forward_box(Point2 x, const BendParams& p) {
  return hadamard(x, p.forward_scale()) + p.forward_shift();
}

inline Point2 inverse_box(Point2 x2, const BendParams& p) {
  return hadamard_div(x2 - p.inverse_shift(), p.inverse_scale());
}

inline std::optional<Point2> try_bend_pipeline(Point2 x, const BendParams& p) {
  const auto w = try_mobius(forward_box(x, p), MobiusCoeffs::inversion());
  if (!w) return std::nullopt;
  return inverse_box(*w, p);
}

/// x -> x''' through forward box, inversion and inverse box.
inline Point2 bend_pipeline(Point2 x, const BendParams& p) {
  if (auto y = try_bend_pipeline(x, p)) return *y;
  throw SingularPoint("bend_pipeline: point maps onto the inversion pole");
}

/// Closed-form preimage: forward_box^-1 o inversion o inverse_box^-1.
inline Point2 bend_preimage(Point2 y, const BendParams& p) {
  const Point2 w = hadamard(y, p.inverse_scale()) + p.inverse_shift();
  const auto z = try_mobius(w, MobiusCoeffs::inversion());
  if (!z) throw SingularPoint("bend_preimage: intermediate point hits the inversion pole");
  return hadamard_div(*z - p.forward_shift(), p.forward_scale());
}

/// Proper rotation of the plane.
class Rotation2 {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Row-major entries; throws std::invalid_argument unless orthogonal with det +1.
  Rotation2(double m11, double m12, double m21, double m22) : m_{m11, m12, m21, m22} {
    const double r11 = m11 * m11 + m12 * m12 - 1.0;
    const double r22 = m21 * m21 + m22 * m22 - 1.0;
    const double r12 = m11 * m21 + m12 * m22;
    const double det = m11 * m22 - m12 * m21;
    if (std::abs(r11) > kTolerance || std::abs(r22) > kTolerance ||
        std::abs(r12) > kTolerance || std::abs(det - 1.0) > kTolerance) {
      throw std::invalid_argument("Rotation2: matrix is not a proper rotation");
    }
  }

  double operator()(int row, int col) const { return m_[2 * row + col]; }

  Point2 apply(Point2 x) const {
    return {m_[0] * x.x1 + m_[1] * x.x2, m_[2] * x.x1 + m_[3] * x.x2};
  }
  Point2 apply_transpose(Point2 x) const {
    return {m_[0] * x.x1 + m_[2] * x.x2, m_[1] * x.x1 + m_[3] * x.x2};
  }

  friend bool operator==(const Rotation2&, const Rotation2&) = default;

 private:
  double m_[4];
};

inline Rotation2 make_rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

/// Angle drawn uniformly from [0, 2 pi) using substream 0 of `seed`.
inline Rotation2 random_rotation(std::uint64_t seed) {
  Rng rng(seed);
  return make_rotation(2.0 * std::numbers::pi * rng.uniform());
}

/// Seed of the rotation used for the rotated baseline experiments.
inline constexpr std::uint64_t kBaselineRotationSeed = 20210101;

}  // namespace bendbench
