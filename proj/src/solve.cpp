#include "mvem/solve.hpp"

#include "mvem/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

namespace mvem {

namespace {

// Orientation factor for the j-th edge moment when the cell traverses the
// edge against the global direction: the normal flips and the centered
// arclength parameter reverses, giving (-1)^{j+1}.
double orientation_factor(int cell_sign, int j) {
  if (cell_sign > 0) return 1.0;
  return (j % 2 == 0) ? -1.0 : 1.0;
}

std::vector<std::vector<std::pair<int, double>>> build_scatter(const PolyMesh &mesh,
                                                               const GlobalDofMap &map) {
  const int k = map.k;
  std::vector<std::vector<std::pair<int, double>>> scatter(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto &cycle = mesh.cell_edges(c);
    std::vector<std::pair<int, double>> loc;
    loc.reserve(cycle.size() * (k + 1) + map.n_interior);
    for (const PolyMesh::CellEdge &ce : cycle)
      for (int j = 0; j <= k; ++j)
        loc.emplace_back(map.edge_offset(ce.edge) + j, orientation_factor(ce.sign, j));
    for (int i = 0; i < map.n_interior; ++i)
      loc.emplace_back(map.interior_offset(c) + i, 1.0);
    scatter[c] = std::move(loc);
  }
  return scatter;
}

} // namespace

GlobalDofMap build_dof_map(const PolyMesh &mesh, int k) {
  if (k < 0 || k > 2) throw Error("k must be 0, 1, or 2");
  GlobalDofMap map;
  map.k = k;
  map.n_edges = mesh.num_edges();
  map.n_cells = mesh.num_cells();
  const int nd = ScaledMonomialBasis::dim(k);
  map.n_interior = (nd - 1) + k * (k + 1) / 2;
  map.n_scalar = nd;

  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edge(e).label == BoundaryLabel::Neumann)
      for (int j = 0; j <= k; ++j) map.neumann_dofs.push_back(map.edge_offset(e) + j);

  map.full_to_reduced.assign(map.size(), -1);
  std::size_t cut = 0;
  for (int i = 0; i < map.size(); ++i) {
    if (cut < map.neumann_dofs.size() && map.neumann_dofs[cut] == i) {
      ++cut;
      continue;
    }
    map.full_to_reduced[i] = static_cast<int>(map.reduced_to_full.size());
    map.reduced_to_full.push_back(i);
  }
  return map;
}

int dof_count(const PolyMesh &mesh, int k) {
  if (k < 0 || k > 2) throw Error("k must be 0, 1, or 2");
  return (k + 1) * mesh.num_edges() + (k + 2) * (3 * k + 1) / 2 * mesh.num_cells();
}

AssembledSystem assemble(const PolyMesh &mesh, int k, const ProblemData &data) {
  AssembledSystem sys;
  sys.dofmap = build_dof_map(mesh, k);
  const GlobalDofMap &map = sys.dofmap;
  sys.scatter = build_scatter(mesh, map);

  sys.ops.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    try {
      sys.ops.push_back(local_matrices(mesh.polygon(c), k, data.kappa));
    } catch (const Error &e) {
      throw AssemblyError("cell " + std::to_string(c) + ": " + e.what());
    }
  }

  Eigen::VectorXd rhs_full = Eigen::VectorXd::Zero(map.size());
  std::vector<Eigen::Triplet<double>> trips;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalOperators &ops = sys.ops[c];
    const auto &sc = sys.scatter[c];
    const int n = ops.size();

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = sc[i].second * sc[j].second * ops.Ah(i, j);
        if (v != 0.0) trips.emplace_back(sc[i].first, sc[j].first, v);
      }

    for (int b = 0; b < map.n_scalar; ++b) {
      const int row = map.scalar_offset(c) + b;
      for (int i = 0; i < n; ++i) {
        const double v = sc[i].second * ops.B(b, i);
        if (v != 0.0) {
          trips.emplace_back(row, sc[i].first, v);
          trips.emplace_back(sc[i].first, row, v);
        }
      }
    }

    if (data.f) {
      const QuadratureRule quad =
          polygon_quadrature(ops.poly, default_volume_degree(k));
      const Eigen::MatrixXd V = ops.basis_k.eval(quad.points);
      for (int b = 0; b < map.n_scalar; ++b) {
        double acc = 0.0;
        for (int q = 0; q < quad.size(); ++q)
          acc += quad.weights(q) * data.f(quad.point(q)) * V(q, b);
        rhs_full(map.scalar_offset(c) + b) -= acc;
      }
    }
  }

  // Dirichlet datum enters through edge moments of g against the normal
  // trace of each edge basis function, in global orientation, signed by the
  // incident cell so the trace pairs with the domain outward normal.
  if (data.g) {
    const Eigen::MatrixXd gram_inv = [k] {
      LocalOperators probe(
          Polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}), k);
      return probe.edge_gram_inv;
    }();
    for (int c = 0; c < mesh.num_cells(); ++c)
      for (const PolyMesh::CellEdge &ce : mesh.cell_edges(c)) {
        const PolyMesh::Edge &edge = mesh.edge(ce.edge);
        if (edge.label != BoundaryLabel::Dirichlet) continue;
        const Vec2 a = mesh.vertex(edge.v0);
        const Vec2 b = mesh.vertex(edge.v1);
        const EdgeBasis eb(a, b, k);
        const QuadratureRule quad = edge_quadrature(a, b, default_edge_degree(k));
        const Eigen::MatrixXd E = eb.eval(quad.points);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k + 1);
        for (int q = 0; q < quad.size(); ++q)
          w += quad.weights(q) * data.g(quad.point(q)) * E.row(q).transpose();
        const Eigen::VectorXd contrib = static_cast<double>(ce.sign) * (gram_inv * w);
        for (int j = 0; j <= k; ++j)
          rhs_full(map.edge_offset(ce.edge) + j) += contrib(j);
      }
  }

  // Drop Neumann rows and columns (homogeneous essential condition).
  std::vector<Eigen::Triplet<double>> reduced;
  reduced.reserve(trips.size());
  for (const auto &t : trips) {
    const int r = map.full_to_reduced[t.row()];
    const int c = map.full_to_reduced[t.col()];
    if (r >= 0 && c >= 0) reduced.emplace_back(r, c, t.value());
  }
  sys.matrix.resize(map.reduced_size(), map.reduced_size());
  sys.matrix.setFromTriplets(reduced.begin(), reduced.end());
  sys.rhs.resize(map.reduced_size());
  for (int i = 0; i < map.reduced_size(); ++i)
    sys.rhs(i) = rhs_full(map.reduced_to_full[i]);
  return sys;
}

MixedSolution solve_system(const AssembledSystem &sys) {
  const GlobalDofMap &map = sys.dofmap;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sys.matrix);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("saddle-point factorization failed (missing Dirichlet "
                         "boundary or degenerate mesh)");
  const Eigen::VectorXd x = lu.solve(sys.rhs);
  const double scale = std::max(sys.rhs.norm(), 1e-300);
  const double rel = (sys.matrix * x - sys.rhs).norm() / scale;
  if (!(rel <= 1e-10))
    throw SingularSystem("solver residual " + std::to_string(rel) +
                         " exceeds 1e-10");

  Eigen::VectorXd full = Eigen::VectorXd::Zero(map.size());
  for (int i = 0; i < map.reduced_size(); ++i) full(map.reduced_to_full[i]) = x(i);

  MixedSolution sol;
  sol.k = map.k;
  sol.flux = full.head(map.flux_size());
  const int n_cells = map.n_cells;
  sol.local_flux.resize(n_cells);
  sol.u.resize(n_cells);
  sol.sigma_hat.resize(n_cells);
  sol.sigma_star.resize(n_cells);
  sol.div_sigma.resize(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    const LocalOperators &ops = sys.ops[c];
    const auto &sc = sys.scatter[c];
    Eigen::VectorXd dofs(ops.size());
    for (int i = 0; i < ops.size(); ++i) dofs(i) = sc[i].second * full(sc[i].first);
    sol.local_flux[c] = dofs;
    sol.sigma_hat[c] = ops.P * dofs;
    sol.div_sigma[c] = ops.Dv * dofs;
    try {
      sol.sigma_star[c] =
          postprocess_local(ops.poly, map.k, sol.sigma_hat[c], sol.div_sigma[c]);
    } catch (const Error &e) {
      throw AssemblyError("cell " + std::to_string(c) + ": " + e.what());
    }
    sol.u[c] = full.segment(map.scalar_offset(c), map.n_scalar);
  }
  return sol;
}

MixedSolution solve_problem(const PolyMesh &mesh, int k, const ProblemData &data,
                            AssembledSystem *keep_system) {
  AssembledSystem sys = assemble(mesh, k, data);
  MixedSolution sol = solve_system(sys);
  if (keep_system) *keep_system = std::move(sys);
  return sol;
}

ErrorNorms error_norms(const PolyMesh &mesh, const MixedSolution &sol,
                       const ProblemData &data) {
  if (!data.has_exact())
    throw Error("error norms require exact_u, exact_sigma, and exact_div_sigma");
  const int k = sol.k;
  const int nd1 = ScaledMonomialBasis::dim(k + 1);
  double sig2 = 0.0, u2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon K = mesh.polygon(c);
    const ScaledMonomialBasis basis_k = element_basis(K, k);
    const ScaledMonomialBasis basis_k1 = element_basis(K, k + 1);
    const Eigen::VectorXd &star = sol.sigma_star[c];
    Eigen::VectorXd div_star = Eigen::VectorXd::Zero(basis_k.size());
    div_star.head(ScaledMonomialBasis::dim(k)) =
        divergence_map(k + 1, basis_k1.scale) * star;
    const QuadratureRule quad = polygon_quadrature(K, 2 * k + 10);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 p = quad.point(q);
      const double w = quad.weights(q);
      const Vec2 sh(basis_k1.value(star.head(nd1), p),
                    basis_k1.value(star.tail(nd1), p));
      sig2 += w * (data.exact_sigma(p) - sh).squaredNorm();
      const double dv = basis_k.value(div_star, p);
      sig2 += w * std::pow(data.exact_div_sigma(p) - dv, 2);
      const double uh = basis_k.value(sol.u[c], p);
      u2 += w * std::pow(data.exact_u(p) - uh, 2);
    }
  }
  ErrorNorms out;
  out.e_sigma = std::sqrt(sig2);
  out.e_u = std::sqrt(u2);
  out.e_total = std::sqrt(sig2 + u2);
  return out;
}

} // namespace mvem
