#include "mvem/estimator.hpp"

#include "mvem/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <string>

namespace mvem {

namespace {

Eigen::Matrix2d inverse_of_symmetrized(const Eigen::Matrix2d &m) {
  const Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
  return sym.inverse();
}

// Five-point centered tangential derivative of g along the edge direction.
double fd_tangential(const std::function<double(const Vec2 &)> &g, const Vec2 &p,
                     const Vec2 &t, double step) {
  const double gm2 = g(p - 2.0 * step * t);
  const double gm1 = g(p - step * t);
  const double gp1 = g(p + step * t);
  const double gp2 = g(p + 2.0 * step * t);
  return (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * step);
}

} // namespace

Eigen::Matrix2d KappaH::value(int cell, const ScaledMonomialBasis &basis,
                              const Vec2 &p) const {
  if (constant) return constant_value;
  Eigen::Matrix2d m;
  m(0, 0) = basis.value(cells[cell][0], p);
  m(0, 1) = basis.value(cells[cell][1], p);
  m(1, 0) = basis.value(cells[cell][2], p);
  m(1, 1) = basis.value(cells[cell][3], p);
  return m;
}

KappaH build_kappa_h(const PolyMesh &mesh, int k, const Diffusion &kappa) {
  KappaH kh;
  kh.k = k;
  kh.constant = kappa.constant;
  const int nd = ScaledMonomialBasis::dim(k);
  kh.cells.resize(mesh.num_cells());
  if (kh.constant) {
    kh.constant_value = inverse_of_symmetrized(kappa(Vec2(0.0, 0.0)));
    for (auto &cell : kh.cells)
      for (int e = 0; e < 4; ++e) {
        cell[e] = Eigen::VectorXd::Zero(nd);
        cell[e](0) = kh.constant_value(e / 2, e % 2);
      }
    return kh;
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon K = mesh.polygon(c);
    for (int e = 0; e < 4; ++e) {
      const int row = e / 2, col = e % 2;
      kh.cells[c][e] = l2_project(
          [&kappa, row, col](const Vec2 &p) {
            return inverse_of_symmetrized(kappa(p))(row, col);
          },
          K, k);
    }
  }
  return kh;
}

TermAggregates aggregate_terms(const IndicatorReport &report) {
  TermAggregates agg;
  double phi2 = 0, eta2 = 0, theta2 = 0, psi2 = 0, lam2 = 0, ups2 = 0;
  for (const auto &c : report.cells) {
    phi2 += c.Phi * c.Phi;
    eta2 += c.eta1 * c.eta1 + c.eta2 * c.eta2;
    theta2 += c.theta1 * c.theta1 + c.theta2 * c.theta2 + c.theta3 * c.theta3;
    psi2 += c.Psi1 * c.Psi1 + c.Psi2 * c.Psi2;
    lam2 += c.Lambda1 * c.Lambda1 + c.Lambda2 * c.Lambda2;
    ups2 += c.Upsilon * c.Upsilon;
  }
  agg.Phi = std::sqrt(phi2);
  agg.eta = std::sqrt(eta2);
  agg.theta = std::sqrt(theta2);
  agg.Psi = std::sqrt(psi2);
  agg.Lambda = std::sqrt(lam2);
  agg.Upsilon = std::sqrt(ups2);
  return agg;
}

TangentialJump tangential_jump(const Vec2 &a, const Vec2 &b, int degree,
                               const std::function<Vec2(const Vec2 &)> &left,
                               const std::function<Vec2(const Vec2 &)> &right) {
  TangentialJump out{EdgeBasis{a, b, degree}, Eigen::VectorXd(), 0.0};
  const Vec2 t = out.basis.tangent();
  const QuadratureRule quad = edge_quadrature(a, b, 2 * degree + 2);
  const Eigen::MatrixXd E = out.basis.eval(quad.points);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(degree + 1, degree + 1);
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(degree + 1);
  double norm2 = 0.0;
  for (int q = 0; q < quad.size(); ++q) {
    const Vec2 p = quad.point(q);
    const double w = quad.weights(q);
    const double j = (left(p) - right(p)).dot(t);
    norm2 += w * j * j;
    gram += w * E.row(q).transpose() * E.row(q);
    moments += w * j * E.row(q).transpose();
  }
  out.coeffs = gram.ldlt().solve(moments);
  out.l2_norm = std::sqrt(norm2);
  return out;
}

IndicatorReport compute_indicators(const PolyMesh &mesh, int k, const MixedSolution &sol,
                                   const ProblemData &data,
                                   const AssembledSystem *system, bool allow_fd_dgds) {
  const int nc = mesh.num_cells();
  const int nd = ScaledMonomialBasis::dim(k);
  const int nd1 = ScaledMonomialBasis::dim(k + 1);
  const int dprod = 2 * k + 1; // degree of kappa_h sigma*
  const int vol_deg = std::max(default_volume_degree(k), 2 * dprod);
  const int edge_deg = std::max(default_edge_degree(k), 2 * dprod);

  bool have_dirichlet = false;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edge(e).label == BoundaryLabel::Dirichlet) have_dirichlet = true;

  bool use_fd = false;
  if (have_dirichlet && data.g && !data.dgds) {
    if (!allow_fd_dgds)
      throw MissingTangentialData(
          "Dirichlet edges present but no tangential derivative of g was "
          "provided and the finite-difference fallback is disabled");
    use_fd = true;
  }

  const KappaH kh = build_kappa_h(mesh, k, data.kappa);

  IndicatorReport report;
  report.cells.resize(nc);
  report.used_fd_dgds = use_fd;

  // Per-cell polynomial tables: bases and the product kappa_h sigma*.
  std::vector<ScaledMonomialBasis> bk, bk1, bp;
  std::vector<Eigen::VectorXd> ksx(nc), ksy(nc), div_star(nc);
  bk.reserve(nc);
  bk1.reserve(nc);
  bp.reserve(nc);
  for (int c = 0; c < nc; ++c) {
    const Polygon K = mesh.polygon(c);
    bk.push_back(element_basis(K, k));
    bk1.push_back(element_basis(K, k + 1));
    bp.push_back(element_basis(K, dprod));
    const Eigen::VectorXd sx = sol.sigma_star[c].head(nd1);
    const Eigen::VectorXd sy = sol.sigma_star[c].tail(nd1);
    ksx[c] = multiply_coeffs(k, kh.cells[c][0], k + 1, sx) +
             multiply_coeffs(k, kh.cells[c][1], k + 1, sy);
    ksy[c] = multiply_coeffs(k, kh.cells[c][2], k + 1, sx) +
             multiply_coeffs(k, kh.cells[c][3], k + 1, sy);
    div_star[c] = divergence_map(k + 1, bk1[c].scale) * sol.sigma_star[c];
  }

  // Volume terms.
  for (int c = 0; c < nc; ++c) {
    auto &cell = report.cells[c];
    const Polygon K = mesh.polygon(c);
    cell.barycenter = K.centroid();
    const double hK = bk[c].scale;

    const Eigen::VectorXd &u = sol.u[c];
    Eigen::VectorXd dux = Eigen::VectorXd::Zero(std::max(nd - 1, 1));
    Eigen::VectorXd duy = dux;
    if (k > 0) {
      dux = derivative_coeffs(k, bk[c].scale, u, 0);
      duy = derivative_coeffs(k, bk[c].scale, u, 1);
    }
    const ScaledMonomialBasis bgrad = element_basis(K, std::max(k - 1, 0));

    Eigen::VectorXd rot = Eigen::VectorXd::Zero(ScaledMonomialBasis::dim(dprod - 1));
    {
      Eigen::VectorXd stacked(2 * ScaledMonomialBasis::dim(dprod));
      stacked << ksx[c], ksy[c];
      rot = rot_coeffs(dprod, bp[c].scale, stacked);
    }
    const ScaledMonomialBasis brot = element_basis(K, dprod - 1);

    // Psi2 projection target (skipped entirely for constant kappa).
    Eigen::VectorXd psi2_proj;
    if (!kh.constant) {
      const Eigen::VectorXd shx = sol.sigma_hat[c].head(nd);
      const Eigen::VectorXd shy = sol.sigma_hat[c].tail(nd);
      psi2_proj = l2_project_vector(
          [&](const Vec2 &p) {
            const Vec2 sh(bk[c].value(shx, p), bk[c].value(shy, p));
            return Vec2(inverse_of_symmetrized(data.kappa(p)) * sh);
          },
          K, k);
    }

    const QuadratureRule quad = polygon_quadrature(K, vol_deg);
    double phi2 = 0, lam12 = 0, lam22 = 0, ups2 = 0, psi22 = 0, eta12 = 0, th12 = 0;
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 p = quad.point(q);
      const double w = quad.weights(q);

      const double dvh = bk[c].value(sol.div_sigma[c], p);
      if (data.f) phi2 += w * std::pow(data.f(p) + dvh, 2);
      else phi2 += w * dvh * dvh;

      const Vec2 sh(bk[c].value(sol.sigma_hat[c].head(nd), p),
                    bk[c].value(sol.sigma_hat[c].tail(nd), p));
      const Vec2 st(bk1[c].value(sol.sigma_star[c].head(nd1), p),
                    bk1[c].value(sol.sigma_star[c].tail(nd1), p));
      lam12 += w * (sh - st).squaredNorm();

      const double dst = bk[c].value(div_star[c], p);
      lam22 += w * std::pow(dvh - dst, 2);

      const Vec2 ks(bp[c].value(ksx[c], p), bp[c].value(ksy[c], p));
      if (!kh.constant) {
        const Eigen::Matrix2d diff =
            inverse_of_symmetrized(data.kappa(p)) - kh.value(c, bk[c], p);
        ups2 += w * (diff * st).squaredNorm();
        const Vec2 target(inverse_of_symmetrized(data.kappa(p)) * sh);
        const Vec2 proj(bk[c].value(psi2_proj.head(nd), p),
                        bk[c].value(psi2_proj.tail(nd), p));
        psi22 += w * (target - proj).squaredNorm();
      }

      const Vec2 gu(k > 0 ? bgrad.value(dux, p) : 0.0,
                    k > 0 ? bgrad.value(duy, p) : 0.0);
      eta12 += w * (ks - gu).squaredNorm();

      const double r = brot.value(rot, p);
      th12 += w * r * r;
    }

    cell.Phi = std::sqrt(phi2);
    cell.Lambda1 = std::sqrt(lam12);
    cell.Lambda2 = std::sqrt(lam22);
    cell.Upsilon = kh.constant ? 0.0 : std::sqrt(ups2);
    cell.Psi2 = kh.constant ? 0.0 : std::sqrt(psi22);
    cell.eta1 = hK * std::sqrt(eta12);
    cell.theta1 = hK * std::sqrt(th12);

    // Psi1: stabilization seminorm of the dof-space projector residual.
    const Eigen::VectorXd &dofs = sol.local_flux[c];
    if (system) {
      const LocalOperators &ops = system->ops[c];
      const Eigen::VectorXd s = dofs - ops.Pi_dof * dofs;
      cell.Psi1 = std::sqrt(std::max(0.0, s.dot(ops.S * s)));
    } else {
      const LocalOperators ops = local_matrices(K, k, data.kappa);
      const Eigen::VectorXd s = dofs - ops.Pi_dof * dofs;
      cell.Psi1 = std::sqrt(std::max(0.0, s.dot(ops.S * s)));
    }
  }

  // Interior tangential jumps, computed once per edge and charged to both
  // incident cells.
  std::vector<double> theta2_sq(nc, 0.0);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const PolyMesh::Edge &edge = mesh.edge(e);
    if (edge.boundary()) continue;
    const Vec2 a = mesh.vertex(edge.v0);
    const Vec2 b = mesh.vertex(edge.v1);
    const Vec2 t = (b - a).normalized();
    const double he = (b - a).norm();
    const int c0 = edge.cells[0], c1 = edge.cells[1];
    const QuadratureRule quad = edge_quadrature(a, b, edge_deg);
    double j2 = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 p = quad.point(q);
      const Vec2 f0(bp[c0].value(ksx[c0], p), bp[c0].value(ksy[c0], p));
      const Vec2 f1(bp[c1].value(ksx[c1], p), bp[c1].value(ksy[c1], p));
      j2 += quad.weights(q) * std::pow((f0 - f1).dot(t), 2);
    }
    theta2_sq[c0] += he * j2;
    theta2_sq[c1] += he * j2;
  }

  // Dirichlet boundary terms.
  for (int c = 0; c < nc; ++c) {
    auto &cell = report.cells[c];
    double eta2_sq = 0.0, theta3_sq = 0.0;
    for (const PolyMesh::CellEdge &ce : mesh.cell_edges(c)) {
      const PolyMesh::Edge &edge = mesh.edge(ce.edge);
      if (edge.label != BoundaryLabel::Dirichlet) continue;
      const Vec2 a = mesh.vertex(edge.v0);
      const Vec2 b = mesh.vertex(edge.v1);
      const Vec2 t = (b - a).normalized();
      const double he = (b - a).norm();
      const double fd_step = he * 1e-4;
      const QuadratureRule quad = edge_quadrature(a, b, edge_deg);
      double e2 = 0.0, t3 = 0.0;
      for (int q = 0; q < quad.size(); ++q) {
        const Vec2 p = quad.point(q);
        const double w = quad.weights(q);
        if (data.g) {
          const double uh = bk[c].value(sol.u[c], p);
          e2 += w * std::pow(uh - data.g(p), 2);
        }
        const Vec2 ks(bp[c].value(ksx[c], p), bp[c].value(ksy[c], p));
        double dg = 0.0;
        if (data.dgds) dg = data.dgds(p, t);
        else if (use_fd) dg = fd_tangential(data.g, p, t, fd_step);
        t3 += w * std::pow(ks.dot(t) - dg, 2);
      }
      eta2_sq += he * e2;
      theta3_sq += he * t3;
    }
    cell.eta2 = data.g ? std::sqrt(eta2_sq) : 0.0;
    cell.theta3 = std::sqrt(theta3_sq);
    cell.theta2 = std::sqrt(theta2_sq[c]);
  }

  double total = 0.0;
  for (auto &cell : report.cells) {
    const double t2 = cell.Phi * cell.Phi + cell.Lambda1 * cell.Lambda1 +
                      cell.Lambda2 * cell.Lambda2 + cell.Upsilon * cell.Upsilon +
                      cell.Psi1 * cell.Psi1 + cell.Psi2 * cell.Psi2 +
                      cell.eta1 * cell.eta1 + cell.eta2 * cell.eta2 +
                      cell.theta1 * cell.theta1 + cell.theta2 * cell.theta2 +
                      cell.theta3 * cell.theta3;
    cell.ThetaK = std::sqrt(t2);
    total += t2;
  }
  report.Theta = std::sqrt(total);
  return report;
}

std::string write_indicator_csv(const IndicatorReport &report) {
  std::string out = "cell,x,y,Phi,Lambda1,Lambda2,Upsilon,Psi1,Psi2,eta1,eta2,"
                    "theta1,theta2,theta3,ThetaK\n";
  char buf[512];
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const auto &r = report.cells[c];
    std::snprintf(buf, sizeof(buf),
                  "%zu,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e,"
                  "%.5e,%.5e,%.5e\n",
                  c, r.barycenter.x(), r.barycenter.y(), r.Phi, r.Lambda1, r.Lambda2,
                  r.Upsilon, r.Psi1, r.Psi2, r.eta1, r.eta2, r.theta1, r.theta2,
                  r.theta3, r.ThetaK);
    out += buf;
  }
  return out;
}

} // namespace mvem
