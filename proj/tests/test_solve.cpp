#include "doctest.h"

#include "mvem/solve.hpp"

#include <cmath>
#include <random>

using namespace mvem;

namespace {

const double PI = std::acos(-1.0);

PolyMesh single_square(BoundaryLabel right = BoundaryLabel::Dirichlet) {
  return PolyMesh::build({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}},
                         {{0, 1, 2, 3}}, [right](const Vec2 &m) {
                           if (m.x() > 1.0 - 1e-9) return right;
                           return BoundaryLabel::Dirichlet;
                         });
}

PolyMesh unit_quads(int n) {
  PolyMesh mesh = generate_distorted_quad_mesh(n);
  return mesh;
}

PolyMesh::Labeler right_neumann() {
  return [](const Vec2 &m) {
    return m.x() > 1.0 - 1e-9 ? BoundaryLabel::Neumann : BoundaryLabel::Dirichlet;
  };
}

// Patch data: exact u in P_{k+1} with grad u . nu = 0 on {x = 1}, kappa = I.
ProblemData patch_data(int k) {
  ProblemData data;
  if (k == 0) {
    data.f = [](const Vec2 &) { return 0.0; };
    data.g = [](const Vec2 &p) { return p.y(); };
    data.exact_u = [](const Vec2 &p) { return p.y(); };
    data.exact_sigma = [](const Vec2 &) { return Vec2(0.0, 1.0); };
    data.exact_div_sigma = [](const Vec2 &) { return 0.0; };
  } else if (k == 1) {
    auto u = [](const Vec2 &p) { return p.x() * (2.0 - p.x()) + p.y(); };
    data.f = [](const Vec2 &) { return 2.0; };
    data.g = u;
    data.exact_u = u;
    data.exact_sigma = [](const Vec2 &p) { return Vec2(2.0 - 2.0 * p.x(), 1.0); };
    data.exact_div_sigma = [](const Vec2 &) { return -2.0; };
  } else {
    auto u = [](const Vec2 &p) {
      return p.x() * p.x() * (3.0 - 2.0 * p.x()) + std::pow(p.y(), 3) - p.y();
    };
    data.f = [](const Vec2 &p) { return -(6.0 - 12.0 * p.x() + 6.0 * p.y()); };
    data.g = u;
    data.exact_u = u;
    data.exact_sigma = [](const Vec2 &p) {
      return Vec2(6.0 * p.x() * (1.0 - p.x()), 3.0 * p.y() * p.y() - 1.0);
    };
    data.exact_div_sigma = [](const Vec2 &p) { return 6.0 - 12.0 * p.x() + 6.0 * p.y(); };
  }
  return data;
}

// Smooth benchmark: u = cos(pi x) cos(pi y) on the unit square, kappa = I.
// grad u . nu vanishes on {x = 1} and {y = 1}.
ProblemData trig_data() {
  ProblemData data;
  data.f = [](const Vec2 &p) {
    return 2.0 * PI * PI * std::cos(PI * p.x()) * std::cos(PI * p.y());
  };
  data.g = [](const Vec2 &p) { return std::cos(PI * p.x()) * std::cos(PI * p.y()); };
  data.exact_u = data.g;
  data.exact_sigma = [](const Vec2 &p) {
    return Vec2(-PI * std::sin(PI * p.x()) * std::cos(PI * p.y()),
                -PI * std::cos(PI * p.x()) * std::sin(PI * p.y()));
  };
  data.exact_div_sigma = [](const Vec2 &p) {
    return -2.0 * PI * PI * std::cos(PI * p.x()) * std::cos(PI * p.y());
  };
  return data;
}

} // namespace

TEST_SUITE("solve") {

TEST_CASE("dof count follows the closed formula") {
  const PolyMesh square = single_square();
  CHECK(dof_count(square, 0) == 5);   // 4 edge + 1 scalar
  CHECK(dof_count(square, 1) == 14);  // 8 edge + 2 grad + 1 perp + 3 scalar
  CHECK(dof_count(square, 2) == 26); // 12 edge + 5 grad + 3 perp + 6 scalar

  PolyMesh quads = PolyMesh::build(
      {{0, 0}, {0.5, 0}, {1, 0}, {0, 0.5}, {0.5, 0.5}, {1, 0.5}, {0, 1}, {0.5, 1}, {1, 1}},
      {{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}},
      [](const Vec2 &) { return BoundaryLabel::Dirichlet; });
  CHECK(quads.num_edges() == 12);
  CHECK(dof_count(quads, 0) == 16);

  // Formula agrees with the dof map layout for every k.
  for (int k = 0; k <= 2; ++k) {
    const GlobalDofMap map = build_dof_map(quads, k);
    CHECK(map.size() == dof_count(quads, k));
  }
}

TEST_CASE("neumann elimination shrinks the system by (k+1) per edge") {
  const PolyMesh mesh = single_square(BoundaryLabel::Neumann);
  for (int k = 0; k <= 2; ++k) {
    const GlobalDofMap map = build_dof_map(mesh, k);
    CHECK(static_cast<int>(map.neumann_dofs.size()) == k + 1);
    CHECK(map.reduced_size() == map.size() - (k + 1));
    CHECK(map.reduced_size() + static_cast<int>(map.neumann_dofs.size()) ==
          dof_count(mesh, k));
  }
  // k = 0 head count: 4 flux + 1 scalar - 1 eliminated = 4 unknowns.
  const AssembledSystem sys = assemble(mesh, 0, patch_data(0));
  CHECK(sys.matrix.rows() == 4);
}

TEST_CASE("right-hand side blocks") {
  ProblemData data;
  data.f = [](const Vec2 &) { return 1.0; };
  const PolyMesh mesh = single_square();
  const AssembledSystem sys = assemble(mesh, 0, data);
  REQUIRE(sys.rhs.size() == 5);
  // g handle empty: flux rows are zero; f = 1: scalar row is -|K| = -1.
  for (int i = 0; i < 4; ++i) CHECK(sys.rhs(i) == 0.0);
  CHECK(sys.rhs(4) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("assembled matrix is symmetric with a positive definite flux block") {
  const PolyMesh mesh = unit_quads(3).with_labels(right_neumann());
  for (int k = 0; k <= 2; ++k) {
    const AssembledSystem sys = assemble(mesh, k, trig_data());
    const Eigen::SparseMatrix<double> diff =
        Eigen::SparseMatrix<double>(sys.matrix.transpose()) - sys.matrix;
    double scale = 0.0, asym = 0.0;
    for (int col = 0; col < sys.matrix.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, col); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
      for (Eigen::SparseMatrix<double>::InnerIterator it(diff, col); it; ++it)
        asym = std::max(asym, std::abs(it.value()));
    }
    CHECK(asym <= 1e-12 * scale);

    std::mt19937 rng(17 + k);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int nfull_flux = sys.dofmap.flux_size();
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(sys.matrix.rows());
      for (int i = 0; i < sys.matrix.rows(); ++i)
        if (sys.dofmap.reduced_to_full[i] < nfull_flux) z(i) = unif(rng);
      CHECK(z.dot(sys.matrix * z) > 0.0);
    }
  }
}

TEST_CASE("lowest-order patch solution is exact") {
  for (const PolyMesh &mesh :
       {single_square(BoundaryLabel::Neumann), unit_quads(3).with_labels(right_neumann())}) {
    const MixedSolution sol = solve_problem(mesh, 0, patch_data(0));
    for (int c = 0; c < mesh.num_cells(); ++c) {
      // u_h is the cell mean of y; flux is (0, 1) everywhere.
      CHECK(sol.u[c](0) == doctest::Approx(mesh.polygon(c).centroid().y()).epsilon(1e-9));
      CHECK(sol.sigma_hat[c](0) == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(sol.sigma_hat[c](1) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(sol.sigma_star[c](0) == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(sol.sigma_star[c](3) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(sol.div_sigma[c](0)) < 1e-9);
    }
  }
}

TEST_CASE("patch problems are reproduced to solver precision for every k") {
  for (int k = 0; k <= 2; ++k) {
    const PolyMesh mesh = unit_quads(3).with_labels(right_neumann());
    const ProblemData data = patch_data(k);
    const MixedSolution sol = solve_problem(mesh, k, data);
    const ErrorNorms err = error_norms(mesh, sol, data);
    CHECK(err.e_sigma < 1e-8);
    // u_h equals the elementwise projection of u.
    double worst = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const Eigen::VectorXd pu = l2_project(data.exact_u, mesh.polygon(c), k);
      worst = std::max(worst, (pu - sol.u[c]).lpNorm<Eigen::Infinity>());
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("zero data produces the zero solution") {
  const PolyMesh mesh = unit_quads(2);
  ProblemData data; // f, g both empty
  const MixedSolution sol = solve_problem(mesh, 1, data);
  CHECK(sol.flux.lpNorm<Eigen::Infinity>() == 0.0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CHECK(sol.u[c].lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(sol.sigma_star[c].lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("neumann flux dofs stay exactly zero") {
  const PolyMesh mesh = unit_quads(3).with_labels(right_neumann());
  for (int k = 0; k <= 2; ++k) {
    AssembledSystem sys;
    const MixedSolution sol = solve_problem(mesh, k, trig_data(), &sys);
    REQUIRE(!sys.dofmap.neumann_dofs.empty());
    for (int dof : sys.dofmap.neumann_dofs) CHECK(sol.flux(dof) == 0.0);
  }
}

TEST_CASE("discrete mass balance holds cell by cell") {
  const PolyMesh mesh = generate_hex_mesh(3);
  for (int k = 0; k <= 2; ++k) {
    AssembledSystem sys;
    const MixedSolution sol = solve_problem(mesh, k, trig_data(), &sys);
    const ProblemData data = trig_data();
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const LocalOperators &ops = sys.ops[c];
      const QuadratureRule quad = polygon_quadrature(ops.poly, default_volume_degree(k));
      const Eigen::MatrixXd V = ops.basis_k.eval(quad.points);
      Eigen::VectorXd fm = Eigen::VectorXd::Zero(V.cols());
      for (int q = 0; q < quad.size(); ++q)
        fm += quad.weights(q) * data.f(quad.point(q)) * V.row(q).transpose();
      const Eigen::VectorXd residual = ops.B * sol.local_flux[c] + fm;
      CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-9 * (1.0 + fm.norm()));
    }
  }
}

TEST_CASE("missing dirichlet boundary is reported as singular") {
  const PolyMesh mesh =
      unit_quads(2).with_labels([](const Vec2 &) { return BoundaryLabel::Neumann; });
  ProblemData data = trig_data();
  CHECK_THROWS_AS(solve_problem(mesh, 0, data), const SingularSystem &);
}

TEST_CASE("error norms against known fields") {
  const PolyMesh mesh = unit_quads(4);
  // Zero solution scaffold.
  MixedSolution zero;
  zero.k = 0;
  const GlobalDofMap map = build_dof_map(mesh, 0);
  zero.flux = Eigen::VectorXd::Zero(map.flux_size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    zero.u.push_back(Eigen::VectorXd::Zero(1));
    zero.sigma_hat.push_back(Eigen::VectorXd::Zero(2));
    zero.sigma_star.push_back(Eigen::VectorXd::Zero(6));
    zero.div_sigma.push_back(Eigen::VectorXd::Zero(1));
    zero.local_flux.push_back(Eigen::VectorXd::Zero(map.n_interior + 0));
  }

  ProblemData cosines = trig_data();
  const ErrorNorms e1 = error_norms(mesh, zero, cosines);
  CHECK(e1.e_u == doctest::Approx(0.5).epsilon(1e-8)); // ||cos cos||_{L2} = 1/2

  ProblemData constant;
  constant.exact_u = [](const Vec2 &) { return 0.0; };
  constant.exact_sigma = [](const Vec2 &) { return Vec2(1.0, 0.0); };
  constant.exact_div_sigma = [](const Vec2 &) { return 0.0; };
  const ErrorNorms e2 = error_norms(mesh, zero, constant);
  CHECK(e2.e_sigma == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e2.e_u == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e2.e_total == doctest::Approx(1.0).epsilon(1e-10));

  ProblemData missing;
  CHECK_THROWS_AS(error_norms(mesh, zero, missing), const Error &);
}

TEST_CASE("solution fields are independent of cell ordering") {
  const std::vector<Vec2> verts = {{0, 0},   {0.5, 0}, {1, 0},   {0, 0.5}, {0.55, 0.45},
                                   {1, 0.5}, {0, 1},   {0.5, 1}, {1, 1}};
  const std::vector<std::vector<int>> cells = {
      {0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};
  std::vector<std::vector<int>> permuted = {cells[2], cells[0], cells[3], cells[1]};
  const auto all_dirichlet = [](const Vec2 &) { return BoundaryLabel::Dirichlet; };
  const PolyMesh m1 = PolyMesh::build(verts, cells, all_dirichlet);
  const PolyMesh m2 = PolyMesh::build(verts, permuted, all_dirichlet);
  const ProblemData data = trig_data();
  for (int k = 0; k <= 2; ++k) {
    const MixedSolution s1 = solve_problem(m1, k, data);
    const MixedSolution s2 = solve_problem(m2, k, data);
    const int perm[4] = {1, 3, 0, 2}; // cell c of m1 is perm[c] of m2
    for (int c = 0; c < 4; ++c) {
      CHECK((s1.u[c] - s2.u[perm[c]]).lpNorm<Eigen::Infinity>() < 1e-10);
      CHECK((s1.sigma_star[c] - s2.sigma_star[perm[c]]).lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }
}

TEST_CASE("errors shrink under uniform refinement") {
  const ProblemData data = trig_data();
  double prev = 1e300;
  for (int n : {3, 6, 12}) {
    const PolyMesh mesh = generate_hex_mesh(n);
    const MixedSolution sol = solve_problem(mesh, 0, data);
    const ErrorNorms err = error_norms(mesh, sol, data);
    CHECK(err.e_total < prev);
    prev = err.e_total;
  }
}

} // TEST_SUITE
