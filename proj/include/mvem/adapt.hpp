#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "mvem/estimator.hpp"

namespace mvem {

enum class RefineMode { Uniform, Adaptive };

struct AdaptConfig {
  RefineMode mode = RefineMode::Adaptive;
  double beta = 0.5; // marking threshold, fraction of max Theta_K
  int max_iterations = 1;
  long max_dofs = std::numeric_limits<long>::max();
};

/// One study iteration, table-ready. Rate cells are absent on the first row
/// and whenever either error in the ratio is at roundoff level.
struct StudyRow {
  int iteration = 0;
  long N = 0;
  double e_sigma = 0.0;
  double e_u = 0.0;
  double e_total = 0.0;
  std::optional<double> r_sigma;
  std::optional<double> r_u;
  std::optional<double> r_total;
  double Theta = 0.0;
  std::optional<double> r_Theta;
  double effectivity = 0.0;
};

/// Extras recorded per iteration alongside the row.
struct StudyIteration {
  TermAggregates terms;
  MarkSet marked;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<StudyIteration> iterations; // parallel to rows
};

/// Cells with Theta_K >= beta * max_K Theta_K. beta = 0 marks every cell,
/// beta = 1 exactly the argmax set (ties included); never empty for a
/// non-empty report. Throws Error for beta outside [0,1].
MarkSet mark(const IndicatorReport &report, double beta);

/// Experimental convergence rate -2 log(e/e_prev) / log(N/N_prev) on the
/// dof counts of two consecutive meshes. Throws DegenerateRate when either
/// error is below 1e-14 and Error when the dof counts coincide.
double rate(double e, double e_prev, long N, long N_prev);

/// Called once per iteration after the solve, before refinement.
using StudyObserver =
    std::function<void(int iteration, const PolyMesh &mesh,
                       const MixedSolution &solution,
                       const IndicatorReport &report, const MarkSet &marked)>;

/// Drives solve -> estimate -> mark -> refine from mesh0. Every run solves
/// the initial mesh once; refinement continues until max_iterations rows are
/// recorded or the next mesh would exceed max_dofs. Solver and assembly
/// failures are rethrown with the iteration number prepended.
StudyResult run_study(const PolyMesh &mesh0, int k, const ProblemData &data,
                      const AdaptConfig &config,
                      const StudyObserver &observer = {});

} // namespace mvem
