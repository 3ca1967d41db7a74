#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "mvem/solve.hpp"

namespace mvem {

/// Second-order forward-mode jet: value, gradient, and Hessian entries of a
/// scalar expression in two variables. Enough calculus to derive f, sigma,
/// div sigma, and dg/ds from a closed-form u alone.
struct Dual2 {
  double v = 0.0;
  double dx = 0.0, dy = 0.0;
  double dxx = 0.0, dxy = 0.0, dyy = 0.0;

  Dual2() = default;
  Dual2(double value) : v(value) {} // NOLINT: implicit constant lift

  static Dual2 var_x(double x) {
    Dual2 d(x);
    d.dx = 1.0;
    return d;
  }
  static Dual2 var_y(double y) {
    Dual2 d(y);
    d.dy = 1.0;
    return d;
  }
};

inline Dual2 operator+(const Dual2 &a, const Dual2 &b) {
  Dual2 r;
  r.v = a.v + b.v;
  r.dx = a.dx + b.dx;
  r.dy = a.dy + b.dy;
  r.dxx = a.dxx + b.dxx;
  r.dxy = a.dxy + b.dxy;
  r.dyy = a.dyy + b.dyy;
  return r;
}

inline Dual2 operator-(const Dual2 &a, const Dual2 &b) {
  Dual2 r;
  r.v = a.v - b.v;
  r.dx = a.dx - b.dx;
  r.dy = a.dy - b.dy;
  r.dxx = a.dxx - b.dxx;
  r.dxy = a.dxy - b.dxy;
  r.dyy = a.dyy - b.dyy;
  return r;
}

inline Dual2 operator-(const Dual2 &a) { return Dual2(0.0) - a; }

inline Dual2 operator*(const Dual2 &a, const Dual2 &b) {
  Dual2 r;
  r.v = a.v * b.v;
  r.dx = a.dx * b.v + a.v * b.dx;
  r.dy = a.dy * b.v + a.v * b.dy;
  r.dxx = a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx;
  r.dyy = a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy;
  r.dxy = a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy;
  return r;
}

/// Chain rule for a scalar map applied to a jet: needs f(g), f'(g), f''(g).
inline Dual2 compose(const Dual2 &g, double f, double fp, double fpp) {
  Dual2 r;
  r.v = f;
  r.dx = fp * g.dx;
  r.dy = fp * g.dy;
  r.dxx = fpp * g.dx * g.dx + fp * g.dxx;
  r.dyy = fpp * g.dy * g.dy + fp * g.dyy;
  r.dxy = fpp * g.dx * g.dy + fp * g.dxy;
  return r;
}

inline Dual2 inverse(const Dual2 &a) {
  const double w = 1.0 / a.v;
  return compose(a, w, -w * w, 2.0 * w * w * w);
}

inline Dual2 operator/(const Dual2 &a, const Dual2 &b) {
  return a * inverse(b);
}

inline Dual2 sqrt(const Dual2 &a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Dual2 sin(const Dual2 &a) {
  return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}

inline Dual2 cos(const Dual2 &a) {
  return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}

/// Closed-form scalar solution as a jet-valued function of jet coordinates.
using JetFn = std::function<Dual2(const Dual2 &, const Dual2 &)>;

/// Fills every ProblemData field from u alone, with kappa = I:
/// f = -div(grad u), sigma = grad u, g = u, dg/ds = grad u . t.
ProblemData data_from_jet(const JetFn &u);

/// A named manufactured problem: data, boundary labeling, and the domain the
/// mesh generators must match.
struct TestCase {
  enum class Domain { UnitSquare, LShape };

  std::string name;
  Domain domain = Domain::UnitSquare;
  ProblemData data;
  PolyMesh::Labeler labeler;
  JetFn jet;
};

/// Builds test1, test2, test3, patch-0, patch-1, or patch-2.
/// Throws Error for unknown names.
TestCase make_case(const std::string &name);

struct VerifyReport {
  double max_pde_residual = 0.0;      // relative, finite differences vs f
  double max_gradient_mismatch = 0.0; // relative, finite differences vs sigma
  double max_neumann_flux = 0.0;      // absolute sigma . nu on Gamma_N
  int interior_samples = 0;
  int neumann_samples = 0;
};

/// Samples 1000 interior points checking -div(kappa grad u) = f and
/// kappa grad u = sigma by central finite differences (relative tolerance
/// 1e-5 with floor 1), plus 100 Gamma_N points checking sigma . nu = 0 to
/// 1e-10. Throws ManufacturedMismatch naming the identity that failed.
VerifyReport verify_manufactured(const TestCase &c);

} // namespace mvem
