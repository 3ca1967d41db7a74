#include "mvem/poly_basis.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace mvem {

std::pair<int, int> ScaledMonomialBasis::exponent(int idx) {
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= idx) ++d;
  const int j = idx - d * (d + 1) / 2;
  return {d - j, j};
}

double ScaledMonomialBasis::eval_one(int idx, const Vec2 &p) const {
  const auto [a1, a2] = exponent(idx);
  const double X = (p.x() - center.x()) / scale;
  const double Y = (p.y() - center.y()) / scale;
  return std::pow(X, a1) * std::pow(Y, a2);
}

Eigen::MatrixXd ScaledMonomialBasis::eval(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts) const {
  const int np = static_cast<int>(pts.rows());
  const int nb = size();
  Eigen::MatrixXd V(np, nb);
  Eigen::VectorXd px(degree + 1), py(degree + 1);
  for (int q = 0; q < np; ++q) {
    const double X = (pts(q, 0) - center.x()) / scale;
    const double Y = (pts(q, 1) - center.y()) / scale;
    px(0) = py(0) = 1.0;
    for (int d = 1; d <= degree; ++d) {
      px(d) = px(d - 1) * X;
      py(d) = py(d - 1) * Y;
    }
    for (int i = 0; i < nb; ++i) {
      const auto [a1, a2] = exponent(i);
      V(q, i) = px(a1) * py(a2);
    }
  }
  return V;
}

void ScaledMonomialBasis::eval_grad(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts,
                                    Eigen::MatrixXd &gx, Eigen::MatrixXd &gy) const {
  const int np = static_cast<int>(pts.rows());
  const int nb = size();
  gx.resize(np, nb);
  gy.resize(np, nb);
  Eigen::VectorXd px(degree + 1), py(degree + 1);
  for (int q = 0; q < np; ++q) {
    const double X = (pts(q, 0) - center.x()) / scale;
    const double Y = (pts(q, 1) - center.y()) / scale;
    px(0) = py(0) = 1.0;
    for (int d = 1; d <= degree; ++d) {
      px(d) = px(d - 1) * X;
      py(d) = py(d - 1) * Y;
    }
    for (int i = 0; i < nb; ++i) {
      const auto [a1, a2] = exponent(i);
      gx(q, i) = a1 > 0 ? a1 / scale * px(a1 - 1) * py(a2) : 0.0;
      gy(q, i) = a2 > 0 ? a2 / scale * px(a1) * py(a2 - 1) : 0.0;
    }
  }
}

double ScaledMonomialBasis::value(const Eigen::VectorXd &coeffs, const Vec2 &p) const {
  double s = 0.0;
  for (int i = 0; i < coeffs.size(); ++i) s += coeffs(i) * eval_one(i, p);
  return s;
}

ScaledMonomialBasis element_basis(const Polygon &poly, int degree) {
  return ScaledMonomialBasis{poly.centroid(), poly.diameter(), degree};
}

Eigen::MatrixXd EdgeBasis::eval(const Eigen::Matrix<double, Eigen::Dynamic, 2> &pts) const {
  const int np = static_cast<int>(pts.rows());
  Eigen::MatrixXd V(np, degree + 1);
  const Vec2 m = midpoint(), t = tangent();
  const double h = length();
  for (int q = 0; q < np; ++q) {
    const double s = ((Vec2(pts(q, 0), pts(q, 1)) - m).dot(t)) / h;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      V(q, j) = p;
      p *= s;
    }
  }
  return V;
}

Eigen::VectorXd derivative_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs, int var) {
  const int dim_out = ScaledMonomialBasis::dim(std::max(degree - 1, 0));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_out);
  if (degree == 0) return out;
  for (int i = 0; i < coeffs.size(); ++i) {
    const auto [a1, a2] = ScaledMonomialBasis::exponent(i);
    if (var == 0 && a1 > 0) out(ScaledMonomialBasis::index(a1 - 1, a2)) += a1 / scale * coeffs(i);
    if (var == 1 && a2 > 0) out(ScaledMonomialBasis::index(a1, a2 - 1)) += a2 / scale * coeffs(i);
  }
  return out;
}

Eigen::VectorXd divergence_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs2) {
  const int nd = ScaledMonomialBasis::dim(degree);
  return derivative_coeffs(degree, scale, coeffs2.head(nd), 0) +
         derivative_coeffs(degree, scale, coeffs2.tail(nd), 1);
}

Eigen::VectorXd rot_coeffs(int degree, double scale, const Eigen::VectorXd &coeffs2) {
  const int nd = ScaledMonomialBasis::dim(degree);
  return derivative_coeffs(degree, scale, coeffs2.tail(nd), 0) -
         derivative_coeffs(degree, scale, coeffs2.head(nd), 1);
}

Eigen::MatrixXd divergence_map(int degree, double scale) {
  const int nd = ScaledMonomialBasis::dim(degree);
  const int nr = ScaledMonomialBasis::dim(std::max(degree - 1, 0));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nr, 2 * nd);
  if (degree == 0) return D;
  for (int i = 0; i < nd; ++i) {
    const auto [a1, a2] = ScaledMonomialBasis::exponent(i);
    if (a1 > 0) D(ScaledMonomialBasis::index(a1 - 1, a2), i) += a1 / scale;
    if (a2 > 0) D(ScaledMonomialBasis::index(a1, a2 - 1), nd + i) += a2 / scale;
  }
  return D;
}

Eigen::MatrixXd gradient_columns(int degree, double scale) {
  const int nd = ScaledMonomialBasis::dim(degree);
  const int cols = ScaledMonomialBasis::dim(degree + 1) - 1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * nd, cols);
  for (int c = 0; c < cols; ++c) {
    const auto [a1, a2] = ScaledMonomialBasis::exponent(c + 1);
    if (a1 > 0) G(ScaledMonomialBasis::index(a1 - 1, a2), c) = a1 / scale;
    if (a2 > 0) G(nd + ScaledMonomialBasis::index(a1, a2 - 1), c) = a2 / scale;
  }
  return G;
}

Eigen::VectorXd multiply_coeffs(int deg_a, const Eigen::VectorXd &a, int deg_b,
                                const Eigen::VectorXd &b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ScaledMonomialBasis::dim(deg_a + deg_b));
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) == 0.0) continue;
    const auto [i1, i2] = ScaledMonomialBasis::exponent(i);
    for (int j = 0; j < b.size(); ++j) {
      if (b(j) == 0.0) continue;
      const auto [j1, j2] = ScaledMonomialBasis::exponent(j);
      out(ScaledMonomialBasis::index(i1 + j1, i2 + j2)) += a(i) * b(j);
    }
  }
  return out;
}

Eigen::MatrixXd mass_matrix(const ScaledMonomialBasis &basis, const QuadratureRule &quad) {
  const Eigen::MatrixXd V = basis.eval(quad.points);
  return V.transpose() * quad.weights.asDiagonal() * V;
}

Eigen::MatrixXd robust_spd_solve(const Eigen::MatrixXd &M, const Eigen::MatrixXd &B,
                                 const char *what) {
  const Eigen::VectorXd d = M.diagonal();
  if ((d.array() <= 0.0).any())
    throw IllConditioned(std::string(what) + ": nonpositive diagonal");
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd Ms = s.asDiagonal() * M * s.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Ms);
  if (ldlt.info() == Eigen::Success && ldlt.rcond() >= 1e-12)
    return s.asDiagonal() * ldlt.solve(s.asDiagonal() * B);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ms);
  if (eig.info() != Eigen::Success)
    throw IllConditioned(std::string(what) + ": eigen decomposition failed");
  const double floor = eig.eigenvalues().maxCoeff() * 1e-14;
  if (!(floor > 0.0))
    throw IllConditioned(std::string(what) + ": matrix is numerically zero");
  Eigen::VectorXd inv = eig.eigenvalues();
  for (int i = 0; i < inv.size(); ++i)
    inv(i) = inv(i) > floor ? 1.0 / inv(i) : 0.0;
  const Eigen::MatrixXd pinv =
      eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return s.asDiagonal() * (pinv * (s.asDiagonal() * B));
}

Eigen::VectorXd l2_project(const std::function<double(const Vec2 &)> &f, const Polygon &poly,
                           int degree) {
  const ScaledMonomialBasis basis = element_basis(poly, degree);
  const QuadratureRule quad = polygon_quadrature(poly, default_volume_degree(degree));
  const Eigen::MatrixXd V = basis.eval(quad.points);
  const Eigen::MatrixXd H = V.transpose() * quad.weights.asDiagonal() * V;
  Eigen::VectorXd fh(quad.size());
  for (int q = 0; q < quad.size(); ++q) fh(q) = f(quad.point(q));
  const Eigen::VectorXd rhs = V.transpose() * (quad.weights.cwiseProduct(fh));
  return robust_spd_solve(H, rhs, "l2_project mass matrix");
}

Eigen::VectorXd l2_project_vector(const std::function<Vec2(const Vec2 &)> &f, const Polygon &poly,
                                  int degree) {
  const ScaledMonomialBasis basis = element_basis(poly, degree);
  const QuadratureRule quad = polygon_quadrature(poly, default_volume_degree(degree));
  const Eigen::MatrixXd V = basis.eval(quad.points);
  const Eigen::MatrixXd H = V.transpose() * quad.weights.asDiagonal() * V;
  Eigen::VectorXd f1(quad.size()), f2(quad.size());
  for (int q = 0; q < quad.size(); ++q) {
    const Vec2 v = f(quad.point(q));
    f1(q) = v.x();
    f2(q) = v.y();
  }
  Eigen::MatrixXd rhs(basis.size(), 2);
  rhs.col(0) = V.transpose() * quad.weights.cwiseProduct(f1);
  rhs.col(1) = V.transpose() * quad.weights.cwiseProduct(f2);
  const Eigen::MatrixXd sol = robust_spd_solve(H, rhs, "l2_project mass matrix");
  Eigen::VectorXd out(2 * basis.size());
  out.head(basis.size()) = sol.col(0);
  out.tail(basis.size()) = sol.col(1);
  return out;
}

GPerpBasis gperp_basis(const Polygon &poly, int k) {
  GPerpBasis gp;
  gp.k = k;
  gp.basis = element_basis(poly, k);
  const int nd = gp.basis.size();
  const int count = k * (k + 1) / 2;
  gp.members.resize(2 * nd, count);
  if (count == 0) return gp;

  const QuadratureRule quad = polygon_quadrature(poly, default_volume_degree(k));
  const Eigen::MatrixXd V = gp.basis.eval(quad.points);
  const Eigen::MatrixXd H = V.transpose() * quad.weights.asDiagonal() * V;

  // Seeds x_perp m_beta in component-major coefficients of degree k.
  Eigen::MatrixXd seeds = Eigen::MatrixXd::Zero(2 * nd, count);
  for (int c = 0; c < count; ++c) {
    const auto [b1, b2] = ScaledMonomialBasis::exponent(c);
    seeds(ScaledMonomialBasis::index(b1, b2 + 1), c) = -1.0;      // -Y m_beta
    seeds(nd + ScaledMonomialBasis::index(b1 + 1, b2), c) = 1.0;  // X m_beta
  }

  const Eigen::MatrixXd G = gradient_columns(k, gp.basis.scale);
  Eigen::MatrixXd Mvec = Eigen::MatrixXd::Zero(2 * nd, 2 * nd);
  Mvec.topLeftCorner(nd, nd) = H;
  Mvec.bottomRightCorner(nd, nd) = H;

  const Eigen::MatrixXd gram = G.transpose() * Mvec * G;
  gp.members = seeds - G * robust_spd_solve(gram, G.transpose() * Mvec * seeds,
                                            "gperp gradient gram matrix");

  // Orthonormalize in the area-scaled L2 inner product. Without this the
  // member gram degrades quickly with k and anything built on unit member
  // coefficients (dof scaling, stabilization size) inherits the skew.
  const Eigen::MatrixXd gram_perp =
      (gp.members.transpose() * Mvec * gp.members) / poly.area();
  Eigen::LLT<Eigen::MatrixXd> llt(gram_perp);
  if (llt.info() == Eigen::Success) {
    gp.members = llt.matrixU().solve<Eigen::OnTheRight>(gp.members);
    return gp;
  }

  // Near-degenerate perp space (needle cells). Whiten with floored
  // eigenvalues; directions at the floor stay small instead of blowing up.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_perp);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().maxCoeff() > 0.0))
    throw IllConditioned("gperp member gram matrix: not positive definite");
  const double floor = eig.eigenvalues().maxCoeff() * 1e-14;
  Eigen::VectorXd w = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  gp.members = gp.members * eig.eigenvectors() * w.asDiagonal();
  return gp;
}

} // namespace mvem
