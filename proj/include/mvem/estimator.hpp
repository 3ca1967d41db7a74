#pragma once

#include "mvem/solve.hpp"

#include <array>
#include <string>
#include <vector>

namespace mvem {

/// Piecewise-[P_k]^{2x2} approximation of kappa^{-1}.  When the diffusion
/// tensor is flagged constant the coefficients are the exact constant inverse
/// and `constant` is set, which downstream turns Upsilon and Psi2 into exact
/// zeros.
struct KappaH {
  int k = 0;
  bool constant = false;
  Eigen::Matrix2d constant_value = Eigen::Matrix2d::Identity();
  // Per cell, entries (0,0), (0,1), (1,0), (1,1), each dim(k) coefficients.
  std::vector<std::array<Eigen::VectorXd, 4>> cells;

  Eigen::Matrix2d value(int cell, const ScaledMonomialBasis &basis, const Vec2 &p) const;
};

KappaH build_kappa_h(const PolyMesh &mesh, int k, const Diffusion &kappa);

/// Per-cell indicator terms.  ThetaK is the root of the sum of the eleven
/// squares; Theta the root of the sum over cells.
struct IndicatorReport {
  struct Cell {
    double Phi = 0.0;
    double Lambda1 = 0.0, Lambda2 = 0.0;
    double Upsilon = 0.0;
    double Psi1 = 0.0, Psi2 = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
    double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
    double ThetaK = 0.0;
    Vec2 barycenter = Vec2::Zero();
  };
  std::vector<Cell> cells;
  double Theta = 0.0;
  bool used_fd_dgds = false; // tangential derivative reconstructed from g
};

/// Square-summed global aggregates of the term families.
struct TermAggregates {
  double Phi = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double Psi = 0.0;
  double Lambda = 0.0;
  double Upsilon = 0.0;
};

TermAggregates aggregate_terms(const IndicatorReport &report);

/// Compute all local indicators and the aggregate.  When `system` is given
/// its cached local operators are reused, otherwise they are rebuilt.  When
/// data.dgds is missing but g is present, a five-point finite-difference
/// tangential derivative (step h_e * 1e-4) is used if `allow_fd_dgds`,
/// otherwise MissingTangentialData is thrown; an empty g means homogeneous
/// Dirichlet data with dg/ds = 0 and eta2 = 0 exactly.
IndicatorReport compute_indicators(const PolyMesh &mesh, int k, const MixedSolution &sol,
                                   const ProblemData &data,
                                   const AssembledSystem *system = nullptr,
                                   bool allow_fd_dgds = true);

/// Jump of the tangential trace across an edge from a to b, as a polynomial
/// in arclength.  The sign follows the a -> b tangent; swapping the two
/// fields flips the sign and preserves the norm.
struct TangentialJump {
  EdgeBasis basis;
  Eigen::VectorXd coeffs;
  double l2_norm = 0.0;
};

TangentialJump tangential_jump(const Vec2 &a, const Vec2 &b, int degree,
                               const std::function<Vec2(const Vec2 &)> &left,
                               const std::function<Vec2(const Vec2 &)> &right);

/// One row per cell: index, barycenter, the eleven terms, ThetaK.
std::string write_indicator_csv(const IndicatorReport &report);

} // namespace mvem
