#include "mvem/adapt.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace mvem {

MarkSet mark(const IndicatorReport &report, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw Error("mark: beta must lie in [0, 1]");
  if (report.cells.empty()) throw Error("mark: empty indicator report");

  double max_theta = 0.0;
  for (const auto &cell : report.cells)
    max_theta = std::max(max_theta, cell.ThetaK);

  const double threshold = beta * max_theta;
  MarkSet marked;
  for (std::size_t c = 0; c < report.cells.size(); ++c)
    if (report.cells[c].ThetaK >= threshold) marked.push_back(static_cast<int>(c));
  return marked;
}

double rate(double e, double e_prev, long N, long N_prev) {
  if (e < 1e-14 || e_prev < 1e-14)
    throw DegenerateRate("rate: error at roundoff level, rate undefined");
  if (N <= 0 || N_prev <= 0 || N == N_prev)
    throw Error("rate: dof counts must be positive and distinct");
  return -2.0 * std::log(e / e_prev) /
         std::log(static_cast<double>(N) / static_cast<double>(N_prev));
}

namespace {

std::optional<double> try_rate(double e, double e_prev, long N, long N_prev) {
  if (e < 1e-14 || e_prev < 1e-14) return std::nullopt;
  return rate(e, e_prev, N, N_prev);
}

[[noreturn]] void rethrow_with_iteration(int iteration) {
  const std::string prefix = "iteration " + std::to_string(iteration) + ": ";
  try {
    throw;
  } catch (const SingularSystem &e) {
    throw SingularSystem(prefix + e.what());
  } catch (const AssemblyError &e) {
    throw AssemblyError(prefix + e.what());
  } catch (const MissingTangentialData &e) {
    throw MissingTangentialData(prefix + e.what());
  } catch (const RefinementGeometryError &e) {
    throw RefinementGeometryError(prefix + e.what());
  } catch (const Error &e) {
    throw Error(prefix + e.what());
  }
}

} // namespace

StudyResult run_study(const PolyMesh &mesh0, int k, const ProblemData &data,
                      const AdaptConfig &config, const StudyObserver &observer) {
  if (!(config.beta >= 0.0 && config.beta <= 1.0))
    throw Error("run_study: beta must lie in [0, 1]");
  if (config.max_iterations < 1)
    throw Error("run_study: max_iterations must be at least 1");

  StudyResult result;
  PolyMesh mesh = mesh0;

  for (int iteration = 0;; ++iteration) {
    StudyRow row;
    row.iteration = iteration;
    row.N = dof_count(mesh, k);

    MarkSet marked;
    try {
      AssembledSystem system;
      const MixedSolution solution = solve_problem(mesh, k, data, &system);
      const ErrorNorms err = error_norms(mesh, solution, data);
      const IndicatorReport report =
          compute_indicators(mesh, k, solution, data, &system);

      row.e_sigma = err.e_sigma;
      row.e_u = err.e_u;
      row.e_total = err.e_total;
      row.Theta = report.Theta;
      row.effectivity = err.e_total / report.Theta;
      if (!result.rows.empty()) {
        const StudyRow &prev = result.rows.back();
        row.r_sigma = try_rate(row.e_sigma, prev.e_sigma, row.N, prev.N);
        row.r_u = try_rate(row.e_u, prev.e_u, row.N, prev.N);
        row.r_total = try_rate(row.e_total, prev.e_total, row.N, prev.N);
        row.r_Theta = try_rate(row.Theta, prev.Theta, row.N, prev.N);
      }

      if (config.mode == RefineMode::Uniform) {
        marked.resize(mesh.num_cells());
        std::iota(marked.begin(), marked.end(), 0);
      } else {
        marked = mark(report, config.beta);
      }

      if (observer) observer(iteration, mesh, solution, report, marked);
      result.iterations.push_back({aggregate_terms(report), marked});
    } catch (const Error &) {
      rethrow_with_iteration(iteration);
    }
    result.rows.push_back(row);

    if (iteration + 1 >= config.max_iterations) break;
    PolyMesh next = [&] {
      try {
        return refine(mesh, marked);
      } catch (const Error &) {
        rethrow_with_iteration(iteration);
      }
    }();
    if (dof_count(next, k) > config.max_dofs) break;
    mesh = std::move(next);
  }
  return result;
}

} // namespace mvem
