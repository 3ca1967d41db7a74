#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mvem/errors.hpp"

namespace mvem {

using Vec2 = Eigen::Vector2d;

/// Simple polygon with CCW vertex cycle and strictly positive area.
/// Collinear consecutive vertices are allowed (hanging nodes appear as
/// extra vertices on straight cell boundaries after local refinement).
class Polygon {
public:
  explicit Polygon(std::vector<Vec2> vertices);

  const std::vector<Vec2> &vertices() const { return verts_; }
  int size() const { return static_cast<int>(verts_.size()); }
  const Vec2 &vertex(int i) const { return verts_[i]; }

  double area() const { return area_; }
  Vec2 centroid() const { return centroid_; }
  Vec2 vertex_centroid() const;
  double diameter() const { return diameter_; }

private:
  std::vector<Vec2> verts_;
  double area_ = 0.0;
  Vec2 centroid_ = Vec2::Zero();
  double diameter_ = 0.0;
};

/// Fan triangulation of a polygon around an interior star point.
/// Triangle i has vertices (v_i, v_{i+1}, star_point), all CCW.
struct SubTriangulation {
  Vec2 star_point;
  std::vector<std::array<Vec2, 3>> triangles;
};

/// Star point selection: vertex centroid, then area centroid, then the
/// incenters of an ear decomposition. Throws StarPointNotInterior if no
/// candidate yields an all-positive fan.
SubTriangulation sub_triangulate(const Polygon &poly);

/// Positive-weight quadrature points in global coordinates.
/// Integrates all polynomials up to exactness degree.
struct QuadratureRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Vec2 point(int i) const { return points.row(i).transpose(); }
};

/// Rule over the polygon built by mapping a reference triangle rule to each
/// fan triangle of sub_triangulate. Weights sum to the polygon area.
QuadratureRule polygon_quadrature(const Polygon &poly, int degree);

/// Gauss rule along the segment [a, b]; weights carry the ds measure and sum
/// to the segment length.
QuadratureRule edge_quadrature(const Vec2 &a, const Vec2 &b, int degree);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

/// Reference rule on the unit triangle {x >= 0, y >= 0, x + y <= 1} exact for
/// all bivariate polynomials of the given total degree (collapsed tensor rule).
QuadratureRule reference_triangle_rule(int degree);

} // namespace mvem
