#pragma once

#include "mvem/poly_basis.hpp"

namespace mvem {

using VectorField = std::function<Vec2(const Vec2 &)>;

/// Diffusion tensor kappa(x), SPD wherever sampled. The flag marks fields
/// that are constant in space; several estimator terms are exactly zero in
/// that case and are short-circuited rather than computed as tiny residuals.
struct Diffusion {
  std::function<Eigen::Matrix2d(const Vec2 &)> tensor;
  bool constant = false;

  Eigen::Matrix2d operator()(const Vec2 &x) const { return tensor(x); }

  static Diffusion identity();
  static Diffusion isotropic(const std::function<double(const Vec2 &)> &value);
};

/// Functional layout of one element: per-edge normal moments against the
/// scaled edge monomials, then interior gradient moments against grad m_a
/// (m_a nonconstant of degree <= k), then interior moments against the G-perp
/// members. All functionals are normalized (1/h_e edgewise, h_K/|K| and 1/|K|
/// inside) so DOF values scale like point values of the field.
struct DofLayout {
  int k = 0;
  int n_edges = 0;

  int n_edge() const { return n_edges * (k + 1); }
  int n_grad() const { return ScaledMonomialBasis::dim(k) - 1; }
  int n_perp() const { return k * (k + 1) / 2; }
  int size() const { return n_edge() + n_grad() + n_perp(); }

  int edge_dof(int edge, int j) const { return edge * (k + 1) + j; }
  int grad_dof(int a) const { return n_edge() + a; } // pairs with monomial a+1
  int perp_dof(int i) const { return n_edge() + n_grad() + i; }
};

/// Everything computable about one element. P reconstructs the L2 projection
/// onto [P_k]^2 from DOFs, Dv the divergence coefficients, B the divergence
/// moment pairing, Ah = Ac + S the stabilized local form.
struct LocalOperators {
  /// Builds every kappa-independent operator; local_matrices adds the
  /// weighted forms M_lam, Ac, S, Ah.
  LocalOperators(const Polygon &K, int k);

  int k = 0;
  Polygon poly;
  DofLayout layout;
  ScaledMonomialBasis basis_k;  // degree k
  ScaledMonomialBasis basis_k1; // degree k + 1
  std::vector<EdgeBasis> edges; // cycle order, outward normals
  GPerpBasis gperp;

  Eigen::MatrixXd edge_gram_inv; // (k+1)^2 inverse Gram of scaled edge monomials
  Eigen::MatrixXd H_k;           // mass of basis_k
  Eigen::MatrixXd H_k1;          // mass of basis_k1
  Eigen::MatrixXd M_vec;         // blockdiag(H_k, H_k)

  Eigen::MatrixXd B;      // dim(k) x n: moments of div against basis_k
  Eigen::MatrixXd Dv;     // dim(k) x n: divergence coefficients
  Eigen::MatrixXd P;      // 2 dim(k) x n: projection coefficients
  Eigen::MatrixXd D;      // n x 2 dim(k): DOFs of vector monomials
  Eigen::MatrixXd Pi_dof; // n x n: D P

  Eigen::MatrixXd M_lam; // kappa^{-1}-weighted vector mass (local_matrices only)
  Eigen::MatrixXd Ac;    // consistency P^T M_lam P
  Eigen::MatrixXd S;     // stabilization
  Eigen::MatrixXd Ah;    // Ac + S
  double s_factor = 0.0;

  int size() const { return layout.size(); }
  double h() const { return basis_k.scale; }
  double area() const { return poly.area(); }

  Eigen::VectorXd pi0_of(const Eigen::VectorXd &dofs) const { return P * dofs; }
  Eigen::VectorXd div_coeffs_of(const Eigen::VectorXd &dofs) const { return Dv * dofs; }
};

/// DOF functionals of an analytic field, by module-default quadrature.
Eigen::VectorXd dofs_of_field(const Polygon &K, int k, const VectorField &tau);

/// Divergence coefficients (basis_k) determined by integration by parts from
/// the edge and gradient DOFs.
Eigen::VectorXd div_from_dofs(const Polygon &K, int k, const Eigen::VectorXd &dofs);

/// L2 projection onto [P_k]^2 (component-major coefficients) from DOFs alone.
Eigen::VectorXd pi0_from_dofs(const Polygon &K, int k, const Eigen::VectorXd &dofs);

/// Full operator set including the kappa^{-1}-weighted forms.
LocalOperators local_matrices(const Polygon &K, int k, const Diffusion &kappa);

/// H(div;K) projection of the pair (sigma_hat, div coefficients) onto
/// [P_{k+1}]^2: solves (p, t)_{div;K} = (sigma_hat, t)_K + (d, div t)_K.
Eigen::VectorXd postprocess_local(const Polygon &K, int k, const Eigen::VectorXd &sigma_hat,
                                  const Eigen::VectorXd &div_coeffs);

} // namespace mvem
