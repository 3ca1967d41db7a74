#include "mvem/vem_local.hpp"

#include <cmath>

namespace mvem {

Diffusion Diffusion::identity() {
  Diffusion d;
  d.tensor = [](const Vec2 &) -> Eigen::Matrix2d { return Eigen::Matrix2d::Identity(); };
  d.constant = true;
  return d;
}

Diffusion Diffusion::isotropic(const std::function<double(const Vec2 &)> &value) {
  Diffusion d;
  d.tensor = [value](const Vec2 &x) -> Eigen::Matrix2d {
    return value(x) * Eigen::Matrix2d::Identity();
  };
  return d;
}

namespace {

/// (1/h_e) int_e shat^i shat^j ds with shat in [-1/2, 1/2]; the same matrix
/// on every edge.
Eigen::MatrixXd edge_monomial_gram(int k) {
  Eigen::MatrixXd G(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      const int p = i + j;
      G(i, j) = (p % 2 == 0) ? std::pow(0.5, p) / (p + 1) : 0.0;
    }
  }
  return G;
}

} // namespace

LocalOperators::LocalOperators(const Polygon &K, int k_in)
    : k(k_in), poly(K), basis_k(element_basis(K, k_in)), basis_k1(element_basis(K, k_in + 1)),
      gperp(gperp_basis(K, k_in)) {
  const int nd = basis_k.size();
  const int nd1 = basis_k1.size();
  const int ne = poly.size();
  layout = DofLayout{k, ne};
  const int n = layout.size();
  const double hK = basis_k.scale;
  const double area = poly.area();

  edges.reserve(ne);
  for (int e = 0; e < ne; ++e)
    edges.push_back(EdgeBasis{poly.vertex(e), poly.vertex((e + 1) % ne), k});

  const Eigen::MatrixXd Ghat = edge_monomial_gram(k);
  edge_gram_inv = Ghat.ldlt().solve(Eigen::MatrixXd::Identity(k + 1, k + 1));

  const QuadratureRule vol = polygon_quadrature(poly, default_volume_degree(k));
  H_k1 = mass_matrix(basis_k1, vol);
  H_k1 = (0.5 * (H_k1 + H_k1.transpose())).eval();
  H_k = H_k1.topLeftCorner(nd, nd);
  M_vec = Eigen::MatrixXd::Zero(2 * nd, 2 * nd);
  M_vec.topLeftCorner(nd, nd) = H_k;
  M_vec.bottomRightCorner(nd, nd) = H_k;

  // Per-edge tables W[e](j, g) = int_e shat^j m_g ds over the degree-(k+1)
  // monomials, shared by B, the moment rows, and the D edge rows.
  std::vector<Eigen::MatrixXd> W(ne);
  D = Eigen::MatrixXd::Zero(n, 2 * nd);
  for (int e = 0; e < ne; ++e) {
    const QuadratureRule eq = edge_quadrature(edges[e].a, edges[e].b, default_edge_degree(k));
    const Eigen::MatrixXd E = edges[e].eval(eq.points);  // npts x (k+1)
    const Eigen::MatrixXd V1 = basis_k1.eval(eq.points); // npts x nd1
    const Eigen::MatrixXd Ew = E.transpose() * eq.weights.asDiagonal();
    W[e] = Ew * V1;
    const Vec2 nu = edges[e].normal();
    const double inv_len = 1.0 / edges[e].length();
    D.block(layout.edge_dof(e, 0), 0, k + 1, nd) = (nu.x() * inv_len) * (Ew * V1.leftCols(nd));
    D.block(layout.edge_dof(e, 0), nd, k + 1, nd) = (nu.y() * inv_len) * (Ew * V1.leftCols(nd));
  }

  // Divergence moments by integration by parts; coefficients via the mass solve.
  B = Eigen::MatrixXd::Zero(nd, n);
  for (int e = 0; e < ne; ++e)
    B.block(0, layout.edge_dof(e, 0), nd, k + 1) = W[e].leftCols(nd).transpose() * edge_gram_inv;
  for (int a = 0; a < layout.n_grad(); ++a) B(a + 1, layout.grad_dof(a)) -= area / hK;
  Dv = robust_spd_solve(H_k, B, "element mass matrix");

  // Moments of tau against the spanning set [grad m_g | eta_i] of [P_k]^2.
  const Eigen::MatrixXd Gcols = gradient_columns(k, hK);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * nd, n);
  for (int g = 1; g < nd1; ++g) {
    R.row(g - 1) = -H_k1.row(g).head(nd) * Dv;
    for (int e = 0; e < ne; ++e)
      R.block(g - 1, layout.edge_dof(e, 0), 1, k + 1) += W[e].col(g).transpose() * edge_gram_inv;
  }
  for (int i = 0; i < layout.n_perp(); ++i) R(nd1 - 1 + i, layout.perp_dof(i)) = area;

  Eigen::MatrixXd C(2 * nd, 2 * nd);
  C.leftCols(nd1 - 1) = Gcols;
  C.rightCols(layout.n_perp()) = gperp.members;
  const Eigen::MatrixXd CM = C.transpose() * M_vec;
  const Eigen::VectorXd rs =
      CM.cwiseAbs().rowwise().maxCoeff().cwiseMax(1e-300).cwiseInverse();
  const Eigen::MatrixXd CMr = rs.asDiagonal() * CM;
  const Eigen::VectorXd cs =
      CMr.cwiseAbs().colwise().maxCoeff().transpose().cwiseMax(1e-300).cwiseInverse();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(CMr * cs.asDiagonal());
  if (!lu.isInvertible()) throw IllConditioned("projector system singular");
  P = cs.asDiagonal() * lu.solve(rs.asDiagonal() * R);

  if (layout.n_grad() > 0)
    D.middleRows(layout.grad_dof(0), layout.n_grad()) =
        (hK / area) * Gcols.leftCols(layout.n_grad()).transpose() * M_vec;
  if (layout.n_perp() > 0)
    D.middleRows(layout.perp_dof(0), layout.n_perp()) =
        (1.0 / area) * gperp.members.transpose() * M_vec;

  Pi_dof = D * P;
}

Eigen::VectorXd dofs_of_field(const Polygon &K, int k, const VectorField &tau) {
  const ScaledMonomialBasis basis = element_basis(K, k);
  const GPerpBasis gp = gperp_basis(K, k);
  const int ne = K.size();
  const int nd = basis.size();
  const DofLayout layout{k, ne};
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(layout.size());

  for (int e = 0; e < ne; ++e) {
    const EdgeBasis eb{K.vertex(e), K.vertex((e + 1) % ne), k};
    const QuadratureRule eq = edge_quadrature(eb.a, eb.b, default_edge_degree(k));
    const Eigen::MatrixXd E = eb.eval(eq.points);
    const Vec2 nu = eb.normal();
    const double inv_len = 1.0 / eb.length();
    for (int q = 0; q < eq.size(); ++q) {
      const double tn = tau(eq.point(q)).dot(nu) * eq.weights(q) * inv_len;
      for (int j = 0; j <= k; ++j) dofs(layout.edge_dof(e, j)) += tn * E(q, j);
    }
  }

  if (layout.n_grad() + layout.n_perp() == 0) return dofs;
  const QuadratureRule vol = polygon_quadrature(K, default_volume_degree(k));
  Eigen::MatrixXd gx, gy;
  basis.eval_grad(vol.points, gx, gy);
  const Eigen::MatrixXd V = basis.eval(vol.points);
  const double inv_area = 1.0 / K.area();
  for (int q = 0; q < vol.size(); ++q) {
    const Vec2 t = tau(vol.point(q)) * vol.weights(q);
    for (int a = 0; a < layout.n_grad(); ++a)
      dofs(layout.grad_dof(a)) +=
          (t.x() * gx(q, a + 1) + t.y() * gy(q, a + 1)) * basis.scale * inv_area;
    for (int i = 0; i < layout.n_perp(); ++i) {
      double ex = 0.0, ey = 0.0;
      for (int m = 0; m < nd; ++m) {
        ex += gp.members(m, i) * V(q, m);
        ey += gp.members(nd + m, i) * V(q, m);
      }
      dofs(layout.perp_dof(i)) += (t.x() * ex + t.y() * ey) * inv_area;
    }
  }
  return dofs;
}

Eigen::VectorXd div_from_dofs(const Polygon &K, int k, const Eigen::VectorXd &dofs) {
  const LocalOperators ops(K, k);
  if (dofs.size() != ops.size()) throw Error("div_from_dofs: wrong DOF vector size");
  return ops.Dv * dofs;
}

Eigen::VectorXd pi0_from_dofs(const Polygon &K, int k, const Eigen::VectorXd &dofs) {
  const LocalOperators ops(K, k);
  if (dofs.size() != ops.size()) throw Error("pi0_from_dofs: wrong DOF vector size");
  return ops.P * dofs;
}

LocalOperators local_matrices(const Polygon &K, int k, const Diffusion &kappa) {
  LocalOperators ops(K, k);
  const int nd = ops.basis_k.size();
  const int n = ops.size();

  const QuadratureRule vol = polygon_quadrature(K, default_volume_degree(k));
  const Eigen::MatrixXd V = ops.basis_k.eval(vol.points);
  Eigen::MatrixXd M00 = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd M01 = Eigen::MatrixXd::Zero(nd, nd);
  Eigen::MatrixXd M11 = Eigen::MatrixXd::Zero(nd, nd);
  for (int q = 0; q < vol.size(); ++q) {
    Eigen::Matrix2d kq = kappa(vol.point(q));
    kq = 0.5 * (kq + kq.transpose());
    if (!(kq(0, 0) > 0.0) || !(kq.determinant() > 0.0))
      throw Error("diffusion tensor not SPD at a quadrature point");
    const Eigen::Matrix2d kinv = kq.inverse();
    const Eigen::VectorXd row = V.row(q).transpose();
    const Eigen::MatrixXd outer = vol.weights(q) * (row * row.transpose());
    M00 += kinv(0, 0) * outer;
    M01 += kinv(0, 1) * outer;
    M11 += kinv(1, 1) * outer;
  }
  ops.M_lam = Eigen::MatrixXd::Zero(2 * nd, 2 * nd);
  ops.M_lam.topLeftCorner(nd, nd) = M00;
  ops.M_lam.topRightCorner(nd, nd) = M01;
  ops.M_lam.bottomLeftCorner(nd, nd) = M01;
  ops.M_lam.bottomRightCorner(nd, nd) = M11;

  ops.Ac = ops.P.transpose() * ops.M_lam * ops.P;
  double sum = 0.0;
  int cnt = 0;
  for (int i = 0; i < n; ++i) {
    if (ops.Ac(i, i) > 0.0) {
      sum += ops.Ac(i, i);
      ++cnt;
    }
  }
  if (cnt == 0) throw IllConditioned("consistency matrix diagonal not positive");
  ops.s_factor = sum / cnt;

  const Eigen::MatrixXd Kr = Eigen::MatrixXd::Identity(n, n) - ops.Pi_dof;
  ops.S = ops.s_factor * (Kr.transpose() * Kr);
  ops.Ah = ops.Ac + ops.S;
  return ops;
}

Eigen::VectorXd postprocess_local(const Polygon &K, int k, const Eigen::VectorXd &sigma_hat,
                                  const Eigen::VectorXd &div_coeffs) {
  const ScaledMonomialBasis b1 = element_basis(K, k + 1);
  const int nd = ScaledMonomialBasis::dim(k);
  const int nd1 = b1.size();
  if (sigma_hat.size() != 2 * nd || div_coeffs.size() != nd)
    throw Error("postprocess_local: wrong coefficient sizes");

  const QuadratureRule vol = polygon_quadrature(K, default_volume_degree(k));
  Eigen::MatrixXd H1 = mass_matrix(b1, vol);
  H1 = (0.5 * (H1 + H1.transpose())).eval();
  const Eigen::MatrixXd Hk = H1.topLeftCorner(nd, nd);
  const Eigen::MatrixXd Dmap = divergence_map(k + 1, b1.scale);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2 * nd1, 2 * nd1);
  gram.topLeftCorner(nd1, nd1) = H1;
  gram.bottomRightCorner(nd1, nd1) = H1;
  gram += Dmap.transpose() * Hk * Dmap;

  Eigen::VectorXd rhs(2 * nd1);
  rhs.head(nd1) = H1.leftCols(nd) * sigma_hat.head(nd);
  rhs.tail(nd1) = H1.leftCols(nd) * sigma_hat.tail(nd);
  rhs += Dmap.transpose() * (Hk * div_coeffs);

  return robust_spd_solve(gram, rhs, "postprocessing Gram matrix");
}

} // namespace mvem
