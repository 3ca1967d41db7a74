// Python bindings for the main operations: mesh generation and IO, the mixed
// solver, the residual estimator, marking, and the study driver.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvem/adapt.hpp"
#include "mvem/problems.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace mvem;

namespace {

using Pair = std::pair<double, double>;

Pair to_pair(const Vec2 &v) { return {v.x(), v.y()}; }

/// Everything a caller needs after one solve: sizes, error norms when exact
/// data is available, the estimator report, and marking.
struct SolveResult {
  long N = 0;
  std::optional<ErrorNorms> errors;
  IndicatorReport report;

  double theta() const { return report.Theta; }
  std::optional<double> effectivity() const {
    if (!errors || report.Theta <= 0.0) return std::nullopt;
    return errors->e_total / report.Theta;
  }
  std::vector<double> cell_indicators() const {
    std::vector<double> out;
    out.reserve(report.cells.size());
    for (const auto &cell : report.cells) out.push_back(cell.ThetaK);
    return out;
  }
  std::vector<Pair> cell_barycenters() const {
    std::vector<Pair> out;
    out.reserve(report.cells.size());
    for (const auto &cell : report.cells) out.push_back(to_pair(cell.barycenter));
    return out;
  }
  MarkSet marked(double beta) const { return mark(report, beta); }
};

SolveResult solve_py(const PolyMesh &mesh, int k, const ProblemData &data) {
  AssembledSystem system;
  const MixedSolution sol = solve_problem(mesh, k, data, &system);
  SolveResult res;
  res.N = dof_count(mesh, k);
  if (data.has_exact()) res.errors = error_norms(mesh, sol, data);
  res.report = compute_indicators(mesh, k, sol, data, &system);
  return res;
}

ProblemData make_data(const py::object &f, const py::object &g, const py::object &dgds,
                      const py::object &exact_u, const py::object &exact_sigma,
                      const py::object &exact_div_sigma, const py::object &kappa) {
  ProblemData data;
  const auto scalar = [](const py::object &fn) {
    return [fn](const Vec2 &p) { return fn(p.x(), p.y()).cast<double>(); };
  };
  if (!f.is_none()) data.f = scalar(f);
  if (!g.is_none()) data.g = scalar(g);
  if (!dgds.is_none())
    data.dgds = [dgds](const Vec2 &p, const Vec2 &t) {
      return dgds(p.x(), p.y(), t.x(), t.y()).cast<double>();
    };
  if (!exact_u.is_none()) data.exact_u = scalar(exact_u);
  if (!exact_sigma.is_none())
    data.exact_sigma = [exact_sigma](const Vec2 &p) {
      const Pair s = exact_sigma(p.x(), p.y()).cast<Pair>();
      return Vec2(s.first, s.second);
    };
  if (!exact_div_sigma.is_none()) data.exact_div_sigma = scalar(exact_div_sigma);
  if (!kappa.is_none()) {
    if (py::isinstance<py::float_>(kappa) || py::isinstance<py::int_>(kappa)) {
      const double value = kappa.cast<double>();
      data.kappa = Diffusion::isotropic([value](const Vec2 &) { return value; });
      data.kappa.constant = true;
    } else {
      data.kappa.tensor = [kappa](const Vec2 &p) {
        const auto rows =
            kappa(p.x(), p.y()).cast<std::array<std::array<double, 2>, 2>>();
        Eigen::Matrix2d m;
        m << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
        return m;
      };
      data.kappa.constant = false;
    }
  }
  return data;
}

PolyMesh initial_mesh(const TestCase &tc, int n, const std::string &kind) {
  std::string k = kind;
  if (k.empty()) k = tc.domain == TestCase::Domain::LShape ? "lshape" : "hex";
  const bool lshape_case = tc.domain == TestCase::Domain::LShape;
  if (k == "lshape" && !lshape_case)
    throw std::invalid_argument("lshape mesh does not cover the domain of case " + tc.name);
  if (k != "lshape" && lshape_case)
    throw std::invalid_argument("mesh '" + k + "' does not cover the domain of case " +
                                tc.name);
  PolyMesh mesh = k == "lshape"            ? generate_lshape_mesh(n)
                  : k == "dquad"           ? generate_distorted_quad_mesh(n)
                  : k == "hex"             ? generate_hex_mesh(n)
                                           : throw std::invalid_argument(
                                                 "unknown mesh kind '" + k + "'");
  return mesh.with_labels(tc.labeler);
}

py::dict row_to_dict(const StudyRow &row) {
  py::dict d;
  d["iteration"] = row.iteration;
  d["N"] = row.N;
  d["e_sigma"] = row.e_sigma;
  d["e_u"] = row.e_u;
  d["e_total"] = row.e_total;
  d["r_sigma"] = row.r_sigma ? py::cast(*row.r_sigma) : py::none();
  d["r_u"] = row.r_u ? py::cast(*row.r_u) : py::none();
  d["r_total"] = row.r_total ? py::cast(*row.r_total) : py::none();
  d["Theta"] = row.Theta;
  d["r_Theta"] = row.r_Theta ? py::cast(*row.r_Theta) : py::none();
  d["effectivity"] = row.effectivity;
  return d;
}

std::vector<py::dict> run_study_py(const PolyMesh &mesh0, int k, const ProblemData &data,
                                   const std::string &mode, double beta, int iterations,
                                   long max_dofs) {
  AdaptConfig cfg;
  if (mode == "uniform")
    cfg.mode = RefineMode::Uniform;
  else if (mode == "adaptive")
    cfg.mode = RefineMode::Adaptive;
  else
    throw std::invalid_argument("mode must be 'uniform' or 'adaptive'");
  cfg.beta = beta;
  cfg.max_iterations = iterations;
  if (max_dofs > 0) cfg.max_dofs = max_dofs;
  const StudyResult res = run_study(mesh0, k, data, cfg);
  std::vector<py::dict> rows;
  rows.reserve(res.rows.size());
  for (const StudyRow &row : res.rows) rows.push_back(row_to_dict(row));
  return rows;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mixed virtual element solver on polygonal meshes";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<PolyMesh>(m, "Mesh")
      .def_property_readonly("num_vertices", &PolyMesh::num_vertices)
      .def_property_readonly("num_cells", &PolyMesh::num_cells)
      .def_property_readonly("num_edges", &PolyMesh::num_edges)
      .def_property_readonly("total_area", &PolyMesh::total_area)
      .def_property_readonly("max_diameter", &PolyMesh::max_diameter)
      .def("cell", &PolyMesh::cell, py::arg("c"),
           "Vertex index cycle of cell c (counterclockwise).")
      .def("cell_area", &PolyMesh::cell_area, py::arg("c"))
      .def(
          "vertices",
          [](const PolyMesh &mesh) {
            std::vector<Pair> out;
            out.reserve(mesh.num_vertices());
            for (const Vec2 &v : mesh.vertices()) out.push_back(to_pair(v));
            return out;
          },
          "Vertex coordinates as (x, y) tuples.")
      .def("__repr__", [](const PolyMesh &mesh) {
        return "<Mesh cells=" + std::to_string(mesh.num_cells()) +
               " vertices=" + std::to_string(mesh.num_vertices()) + ">";
      });

  py::class_<ProblemData>(m, "ProblemData")
      .def_property_readonly("has_exact", &ProblemData::has_exact);

  py::class_<TestCase>(m, "TestCase")
      .def_readonly("name", &TestCase::name)
      .def_readonly("data", &TestCase::data)
      .def_property_readonly("domain", [](const TestCase &tc) {
        return tc.domain == TestCase::Domain::LShape ? "lshape" : "unit_square";
      });

  py::class_<ErrorNorms>(m, "ErrorNorms")
      .def_readonly("e_sigma", &ErrorNorms::e_sigma)
      .def_readonly("e_u", &ErrorNorms::e_u)
      .def_readonly("e_total", &ErrorNorms::e_total);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("N", &SolveResult::N)
      .def_readonly("errors", &SolveResult::errors)
      .def_property_readonly("Theta", &SolveResult::theta)
      .def_property_readonly("effectivity", &SolveResult::effectivity)
      .def("cell_indicators", &SolveResult::cell_indicators,
           "Local indicator Theta_K per cell.")
      .def("cell_barycenters", &SolveResult::cell_barycenters)
      .def("marked", &SolveResult::marked, py::arg("beta"),
           "Cells with Theta_K >= beta * max Theta_K, sorted.");

  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("max_pde_residual", &VerifyReport::max_pde_residual)
      .def_readonly("max_gradient_mismatch", &VerifyReport::max_gradient_mismatch)
      .def_readonly("max_neumann_flux", &VerifyReport::max_neumann_flux)
      .def_readonly("interior_samples", &VerifyReport::interior_samples)
      .def_readonly("neumann_samples", &VerifyReport::neumann_samples);

  m.def("hex_mesh", &generate_hex_mesh, py::arg("n"),
        "Honeycomb cover of the unit square, all-Dirichlet boundary.");
  m.def("distorted_quad_mesh", &generate_distorted_quad_mesh, py::arg("n"),
        "Smoothly distorted n x n quad grid on the unit square.");
  m.def("lshape_mesh", &generate_lshape_mesh, py::arg("n"),
        "L-shaped domain (-1,1)^2 minus [0,1]^2; Neumann on x=-1 and y=-1.");
  m.def("refine", &refine, py::arg("mesh"), py::arg("marked"),
        "Midpoint plus barycenter refinement of the marked cells.");
  m.def("dof_count", &dof_count, py::arg("mesh"), py::arg("k"),
        "(k+1) #edges + (k+2)(3k+1)/2 #cells.");
  m.def("read_mesh", &read_mesh, py::arg("text"));
  m.def("read_mesh_file", &read_mesh_file, py::arg("path"));
  m.def("write_mesh", &write_mesh, py::arg("mesh"));
  m.def("write_mesh_file", &write_mesh_file, py::arg("mesh"), py::arg("path"));

  m.def("make_case", &make_case, py::arg("name"),
        "Named manufactured problem: test1, test2, test3, patch-0/1/2.");
  m.def("initial_mesh", &initial_mesh, py::arg("case"), py::arg("n"),
        py::arg("kind") = std::string(),
        "Generator matching the case domain, relabeled with its boundary map. "
        "kind: hex, dquad, or lshape (default chosen by the domain).");
  m.def("relabel", [](const PolyMesh &mesh, const TestCase &tc) {
    return mesh.with_labels(tc.labeler);
  });
  m.def("make_data", &make_data, py::arg("f") = py::none(), py::arg("g") = py::none(),
        py::arg("dgds") = py::none(), py::arg("exact_u") = py::none(),
        py::arg("exact_sigma") = py::none(), py::arg("exact_div_sigma") = py::none(),
        py::arg("kappa") = py::none(),
        "Problem description from plain callables of (x, y). kappa may be a "
        "positive number or a callable returning a 2x2 row-major matrix; "
        "omitted entries keep their defaults (identity kappa, zero data).");

  m.def("solve", &solve_py, py::arg("mesh"), py::arg("k"), py::arg("data"),
        "Assemble, solve, postprocess, and estimate. Error norms are filled "
        "only when the data carries an exact solution.");
  m.def("run_study", &run_study_py, py::arg("mesh"), py::arg("k"), py::arg("data"),
        py::arg("mode") = std::string("adaptive"), py::arg("beta") = 0.5,
        py::arg("iterations") = 1, py::arg("max_dofs") = long(-1),
        "Solve/estimate/mark/refine loop; returns one dict per iteration.");
  m.def("verify_manufactured", &verify_manufactured, py::arg("case"),
        "Finite-difference check of the manufactured identities.");
}
