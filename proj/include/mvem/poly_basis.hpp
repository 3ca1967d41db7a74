#pragma once

#include <functional>

#include "mvem/geometry.hpp"

namespace mvem {

/// Scaled monomials ((x - center) / scale)^a1 * ((y - center) / scale)^a2 in
/// graded lexicographic order: 1, X, Y, X^2, XY, Y^2, ...
struct ScaledMonomialBasis {
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  int degree = 0;

  static int dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
  int size() const { return dim(degree); }

  /// Exponents (a1, a2) of basis member idx.
  static std::pair<int, int> exponent(int idx);
  static int index(int a1, int a2) { return (a1 + a2) * (a1 + a2 + 1) / 2 + a2; }

  double eval_one(int idx, const Vec2 &p) const;

  /// Value table, one row per point, one column per member.
  Eigen::MatrixXd eval(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts) const;

  /// Gradient tables matching eval layout.
  void eval_grad(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts, Eigen::MatrixXd &gx,
                 Eigen::MatrixXd &gy) const;

  /// Value of the polynomial with the given coefficients at p.
  double value(const Eigen::VectorXd &coeffs, const Vec2 &p) const;
};

/// Basis anchored at the element centroid with the diameter as scale.
ScaledMonomialBasis element_basis(const Polygon &poly, int degree);

/// Monomials of the arclength coordinate s = (x - midpoint) . tangent, scaled
/// by the edge length: q_j(x) = (s / length)^j, j = 0..degree.
struct EdgeBasis {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  int degree = 0;

  Vec2 midpoint() const { return 0.5 * (a + b); }
  double length() const { return (b - a).norm(); }
  Vec2 tangent() const { return (b - a) / length(); }
  /// Tangent rotated by -90 degrees; outward when the edge is traversed CCW.
  Vec2 normal() const {
    const Vec2 t = tangent();
    return Vec2(t.y(), -t.x());
  }

  int size() const { return degree + 1; }
  Eigen::MatrixXd eval(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts) const;
};

/// d/dx or d/dy (var 0/1) as a coefficient map degree -> degree - 1.
Eigen::VectorXd derivative_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs, int var);

/// Divergence of a vector polynomial in component-major coefficients
/// (first dim(degree) entries: x component). Returns degree - 1 coefficients.
Eigen::VectorXd divergence_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs2);

/// rot tau = d(tau_2)/dx - d(tau_1)/dy, degree -> degree - 1 coefficients.
Eigen::VectorXd rot_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs2);

/// Divergence as a matrix: dim(degree - 1) x 2 dim(degree).
Eigen::MatrixXd divergence_map(int degree, double scale);

/// Gradients of the non-constant monomials up to degree + 1, as columns of
/// vector-polynomial coefficients of degree `degree`:
/// (2 dim(degree)) x (dim(degree + 1) - 1).
Eigen::MatrixXd gradient_columns(int degree, double scale);

/// Product of two polynomials in the same scaled basis.
Eigen::VectorXd multiply_coeffs(int deg_a, const Eigen::VectorXd &a, int deg_b,
                                const Eigen::VectorXd &b);

/// Mass matrix of the basis under the given rule (exactness >= 2 degree).
Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis &basis, const QuadratureRule &quad);

/// Solves M X = B for SPD M after diagonal equilibration. When the
/// equilibrated matrix still fails a 1e12 condition estimate (needle cells
/// from deep local refinement), falls back to a spectrally truncated inverse:
/// eigendirections below 1e-14 of the largest carry negligible mass on the
/// cell and are dropped instead of aborting the solve. Throws IllConditioned
/// only for matrices that are degenerate outright.
Eigen::MatrixXd robust_spd_solve(const Eigen::MatrixXd &M, const Eigen::MatrixXd &B,
                                 const char *what);

/// L2(K) projection of a scalar field onto P_degree(K), coefficients in
/// element_basis(K, degree). Throws IllConditioned when the mass matrix
/// condition estimate exceeds 1e12.
Eigen::VectorXd l2_project(const std::function<double(const Vec2 &)> &f, const Polygon &poly,
                           int degree);

/// Componentwise projection of a vector field; component-major coefficients.
Eigen::VectorXd l2_project_vector(const std::function<Vec2(const Vec2 &)> &f, const Polygon &poly,
                                  int degree);

/// Orthogonal complement of grad P_{k+1} inside [P_k]^2 on the element.
/// Members are columns of component-major coefficients, built from the seeds
/// x_perp m_beta, |beta| <= k - 1, x_perp = (-(y - y_K), x - x_K) / h_K,
/// then L2(K)-orthogonalized against the gradient space and orthonormalized
/// in the area-scaled L2 inner product, (1/|K|) (m_i, m_j)_K = delta_ij.
struct GPerpBasis {
  int k = 0;
  ScaledMonomialBasis basis;   // degree k, element anchored
  Eigen::MatrixXd members;     // 2 dim(k) x (k (k+1) / 2)

  int size() const { return static_cast<int>(members.cols()); }
};

GPerpBasis gperp_basis(const Polygon &poly, int k);

/// Default exactness degrees used by the method's integrals.
inline int default_volume_degree(int k) { return 2 * k + 4; }
inline int default_edge_degree(int k) { return 2 * k + 3; }

} // namespace mvem
