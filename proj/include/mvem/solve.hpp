#pragma once

#include "mvem/mesh.hpp"
#include "mvem/vem_local.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <utility>
#include <vector>

namespace mvem {

/// Problem description for -div(kappa grad u) = f with mixed boundary
/// conditions.  An empty g handle means homogeneous Dirichlet data; an empty
/// dgds handle is treated as zero when g is empty and is otherwise
/// reconstructed by finite differences in the estimator.  The exact_* handles
/// are optional and only consulted by error_norms.
struct ProblemData {
  Diffusion kappa = Diffusion::identity();
  std::function<double(const Vec2 &)> f;
  std::function<double(const Vec2 &)> g;
  std::function<double(const Vec2 &, const Vec2 &)> dgds; // (point, unit tangent)
  std::function<double(const Vec2 &)> exact_u;
  std::function<Vec2(const Vec2 &)> exact_sigma;
  std::function<double(const Vec2 &)> exact_div_sigma;

  bool has_exact() const {
    return static_cast<bool>(exact_u) && static_cast<bool>(exact_sigma) &&
           static_cast<bool>(exact_div_sigma);
  }
};

/// Global numbering: edge flux DOFs first (k+1 per unique edge, ordered by
/// edge id), then per-cell interior flux DOFs (gradient then perp), then
/// per-cell scalar coefficients.  Edge DOFs are stored in the global edge
/// orientation (lower vertex index to higher); a cell traversing an edge
/// against that orientation sees its local values flipped by (-1)^{j+1} for
/// the j-th moment.
struct GlobalDofMap {
  int k = 0;
  int n_edges = 0;
  int n_cells = 0;
  int n_interior = 0; // interior flux dofs per cell
  int n_scalar = 0;   // scalar dofs per cell
  std::vector<int> neumann_dofs;   // eliminated global flux dof ids, sorted
  std::vector<int> full_to_reduced; // -1 for eliminated
  std::vector<int> reduced_to_full;

  int edge_offset(int e) const { return e * (k + 1); }
  int interior_offset(int c) const { return (k + 1) * n_edges + c * n_interior; }
  int scalar_offset(int c) const { return flux_size() + c * n_scalar; }
  int flux_size() const { return (k + 1) * n_edges + n_cells * n_interior; }
  int scalar_size() const { return n_cells * n_scalar; }
  int size() const { return flux_size() + scalar_size(); }
  int reduced_size() const { return static_cast<int>(reduced_to_full.size()); }
};

GlobalDofMap build_dof_map(const PolyMesh &mesh, int k);

/// Total number of unknowns before Neumann elimination:
/// (k+1) #edges + (k+2)(3k+1)/2 #cells.
int dof_count(const PolyMesh &mesh, int k);

/// Assembled saddle-point system [A B^T; B 0] with Neumann flux DOFs removed.
struct AssembledSystem {
  GlobalDofMap dofmap;
  Eigen::SparseMatrix<double> matrix; // reduced indices
  Eigen::VectorXd rhs;                // reduced indices
  std::vector<LocalOperators> ops;    // per cell
  // Per cell: local flux dof -> (global flux dof, orientation sign).
  std::vector<std::vector<std::pair<int, double>>> scatter;
};

AssembledSystem assemble(const PolyMesh &mesh, int k, const ProblemData &data);

struct MixedSolution {
  int k = 0;
  Eigen::VectorXd flux;                      // full flux dofs, global orientation
  std::vector<Eigen::VectorXd> local_flux;   // per-cell local dof vectors
  std::vector<Eigen::VectorXd> u;            // per-cell P_k coefficients
  std::vector<Eigen::VectorXd> sigma_hat;    // per-cell [P_k]^2 coefficients
  std::vector<Eigen::VectorXd> sigma_star;   // per-cell [P_{k+1}]^2 coefficients
  std::vector<Eigen::VectorXd> div_sigma;    // per-cell P_k coefficients
};

/// Direct solve plus extraction of the computable fields.  Throws
/// SingularSystem when factorization fails or the relative residual exceeds
/// 1e-10 (typically a missing Dirichlet boundary).
MixedSolution solve_system(const AssembledSystem &system);

/// assemble + solve_system.
MixedSolution solve_problem(const PolyMesh &mesh, int k, const ProblemData &data,
                            AssembledSystem *keep_system = nullptr);

struct ErrorNorms {
  double e_sigma = 0.0; // broken H(div) distance to the postprocessed flux
  double e_u = 0.0;     // L2 distance to the scalar
  double e_total = 0.0; // sqrt(e_sigma^2 + e_u^2)
};

/// Requires data.has_exact().
ErrorNorms error_norms(const PolyMesh &mesh, const MixedSolution &sol,
                       const ProblemData &data);

} // namespace mvem
