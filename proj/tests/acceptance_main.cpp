// Acceptance gate: one numbered criterion per run (argv[1] = 1..10), or all
// when invoked bare. Each criterion prints one [PASS]/[FAIL] line with the
// measured margins; the exit code is nonzero when anything fails.

#include "mvem/adapt.hpp"
#include "mvem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace mvem;

namespace {

double pi0_distance(const PolyMesh &mesh, const MixedSolution &sol, const ProblemData &data) {
  double acc = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Polygon &K = mesh.polygon(c);
    const ScaledMonomialBasis basis = element_basis(K, sol.k);
    const Eigen::VectorXd diff = sol.u[c] - l2_project(data.exact_u, K, sol.k);
    const QuadratureRule quad = polygon_quadrature(K, 2 * sol.k + 2);
    for (int q = 0; q < quad.size(); ++q)
      acc += quad.weights(q) * std::pow(basis.value(diff, quad.point(q)), 2);
  }
  return std::sqrt(acc);
}

double coeff_l2_norm(const Polygon &K, int degree, const Eigen::VectorXd &coeffs) {
  const ScaledMonomialBasis basis = element_basis(K, degree);
  const QuadratureRule quad = polygon_quadrature(K, 2 * degree + 2);
  double acc = 0.0;
  for (int q = 0; q < quad.size(); ++q)
    acc += quad.weights(q) * std::pow(basis.value(coeffs, quad.point(q)), 2);
  return std::sqrt(acc);
}

double vec_coeff_l2_norm(const Polygon &K, int degree, const Eigen::VectorXd &coeffs2) {
  const int nd = ScaledMonomialBasis::dim(degree);
  return std::hypot(coeff_l2_norm(K, degree, coeffs2.head(nd)),
                    coeff_l2_norm(K, degree, coeffs2.tail(nd)));
}

// Ten squat elements mixing regular, skewed, and collinear-vertex shapes,
// uniformly scaled by s (diameters roughly 0.1..0.25 at s = 1).
std::vector<Polygon> element_zoo(double s = 1.0) {
  std::vector<Polygon> zoo;
  zoo.emplace_back(std::vector<Vec2>{{0.0, 0.0}, {0.15, 0.0}, {0.15, 0.15}, {0.0, 0.15}});
  zoo.emplace_back(std::vector<Vec2>{{0.3, 0.1}, {0.47, 0.08}, {0.52, 0.2}, {0.38, 0.28},
                                     {0.27, 0.21}});
  zoo.emplace_back(std::vector<Vec2>{{0.6, 0.0}, {0.68, 0.0}, {0.76, 0.0}, {0.76, 0.14},
                                     {0.6, 0.14}}); // collinear bottom
  zoo.emplace_back(std::vector<Vec2>{{0.1, 0.5}, {0.25, 0.52}, {0.24, 0.66}, {0.09, 0.63}});
  zoo.emplace_back(std::vector<Vec2>{{0.5, 0.5}, {0.62, 0.47}, {0.7, 0.55}, {0.66, 0.67},
                                     {0.54, 0.68}, {0.47, 0.6}});
  zoo.emplace_back(std::vector<Vec2>{{0.0, 0.8}, {0.18, 0.8}, {0.18, 0.84}, {0.0, 0.84}});
  zoo.emplace_back(std::vector<Vec2>{{0.4, 0.8}, {0.55, 0.82}, {0.5, 0.95}});
  zoo.emplace_back(std::vector<Vec2>{{0.7, 0.75}, {0.85, 0.75}, {0.85, 0.9}, {0.78, 0.95},
                                     {0.7, 0.9}});
  zoo.emplace_back(std::vector<Vec2>{{0.85, 0.3}, {0.99, 0.33}, {0.97, 0.47}, {0.86, 0.44}});
  zoo.emplace_back(std::vector<Vec2>{{0.05, 0.3}, {0.2, 0.3}, {0.2, 0.38}, {0.125, 0.42},
                                     {0.05, 0.38}});
  if (s != 1.0)
    for (Polygon &K : zoo) {
      std::vector<Vec2> scaled;
      for (int v = 0; v < K.size(); ++v) scaled.push_back(s * K.vertex(v));
      K = Polygon(scaled);
    }
  return zoo;
}

struct Level {
  long N = 0;
  ErrorNorms err;
  double Theta = 0.0;
  TermAggregates terms;
};

// Solve + estimate on a regenerated hexagonal mesh sequence.
std::vector<Level> hex_sequence(const TestCase &tc, int k, const std::vector<int> &ns) {
  std::vector<Level> levels;
  for (int n : ns) {
    const PolyMesh mesh = generate_hex_mesh(n).with_labels(tc.labeler);
    AssembledSystem system;
    const MixedSolution sol = solve_problem(mesh, k, tc.data, &system);
    const IndicatorReport rep = compute_indicators(mesh, k, sol, tc.data, &system);
    Level lv;
    lv.N = dof_count(mesh, k);
    lv.err = error_norms(mesh, sol, tc.data);
    lv.Theta = rep.Theta;
    lv.terms = aggregate_terms(rep);
    levels.push_back(lv);
  }
  return levels;
}

// Log-log interpolation of a (N, e) curve at query N; the N range must cover.
double interp_loglog(const std::vector<std::pair<long, double>> &curve, long N) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (N <= curve[i].first) {
      const double t = (std::log(double(N)) - std::log(double(curve[i - 1].first))) /
                       (std::log(double(curve[i].first)) - std::log(double(curve[i - 1].first)));
      return std::exp((1.0 - t) * std::log(curve[i - 1].second) +
                      t * std::log(curve[i].second));
    }
  }
  return curve.back().second;
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

// ---------------------------------------------------------------------------

bool criterion1(std::string &msg) {
  double worst_sigma = 0.0, worst_pi0 = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const TestCase tc = make_case("patch-" + std::to_string(k));
    const PolyMesh hex = generate_hex_mesh(4).with_labels(tc.labeler);
    const PolyMesh dq = generate_distorted_quad_mesh(4).with_labels(tc.labeler);
    MarkSet half;
    for (int c = 0; c < hex.num_cells(); c += 2) half.push_back(c);
    const PolyMesh hang = refine(hex, half).with_labels(tc.labeler);
    for (const PolyMesh &mesh : {hex, dq, hang}) {
      const MixedSolution sol = solve_problem(mesh, k, tc.data);
      worst_sigma = std::max(worst_sigma, error_norms(mesh, sol, tc.data).e_sigma);
      worst_pi0 = std::max(worst_pi0, pi0_distance(mesh, sol, tc.data));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "degree-(k+1) patch solutions on hex/distorted/hanging meshes: worst e(sigma) "
                "%.2e, worst |u_h - pi0 u| %.2e (gate 1e-8)",
                worst_sigma, worst_pi0);
  msg = buf;
  return worst_sigma <= 1e-8 && worst_pi0 <= 1e-8;
}

bool criterion2(std::string &msg) {
  std::mt19937 rng(440817u);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  // Low frequencies on small elements keep the quadrature truncation of the
  // dof integrals under the gate; the identity itself is exact.
  std::uniform_real_distribution<double> freq(-0.25, 0.25);
  const std::vector<Polygon> zoo = element_zoo(0.8);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double A = amp(rng), B = amp(rng);
    const double a1 = freq(rng), a2 = freq(rng), a3 = amp(rng);
    const double b1 = freq(rng), b2 = freq(rng), b3 = amp(rng);
    const VectorField tau = [=](const Vec2 &p) {
      return Vec2(A * std::sin(a1 * p.x() + a2 * p.y() + a3),
                  B * std::cos(b1 * p.x() + b2 * p.y() + b3));
    };
    const auto div_tau = [=](const Vec2 &p) {
      return A * a1 * std::cos(a1 * p.x() + a2 * p.y() + a3) -
             B * b2 * std::sin(b1 * p.x() + b2 * p.y() + b3);
    };
    const Polygon &K = zoo[trial % zoo.size()];
    for (int k = 0; k <= 2; ++k) {
      const Eigen::VectorXd from_dofs = div_from_dofs(K, k, dofs_of_field(K, k, tau));
      const Eigen::VectorXd direct = l2_project(div_tau, K, k);
      worst = std::max(worst, coeff_l2_norm(K, k, from_dofs - direct));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "divergence-from-dofs vs projected divergence, 200 fields x 3 degrees x 10 "
                "elements: worst %.2e (gate 1e-9)",
                worst);
  msg = buf;
  return worst <= 1e-9;
}

bool criterion3(std::string &msg) {
  std::mt19937 rng(550817u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::vector<Polygon> zoo = element_zoo();

  // Polynomial fields: the dof route must match the direct projection at any
  // element scale.
  double worst_poly = 0.0;
  for (int k = 0; k <= 2; ++k) {
    const int nd = ScaledMonomialBasis::dim(k);
    for (const Polygon &K : {Polygon({{0.0, 0.0}, {1.1, -0.1}, {1.4, 0.8}, {0.6, 1.3},
                                      {-0.2, 0.7}}),
                             zoo[1]}) {
      const ScaledMonomialBasis basis = element_basis(K, k);
      for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXd coeffs(2 * nd);
        for (int i = 0; i < 2 * nd; ++i) coeffs(i) = unif(rng);
        const VectorField tau = [&](const Vec2 &p) {
          return Vec2(basis.value(coeffs.head(nd), p), basis.value(coeffs.tail(nd), p));
        };
        const Eigen::VectorXd from_dofs = pi0_from_dofs(K, k, dofs_of_field(K, k, tau));
        const Eigen::VectorXd direct = l2_project_vector(tau, K, k);
        worst_poly = std::max(worst_poly, vec_coeff_l2_norm(K, k, from_dofs - direct));
      }
    }
  }

  // Smooth non-polynomial fields for which the dof route is exact up to
  // quadrature: uniaxial trigonometric fields (f(y), g(x)) on axis-aligned
  // rectangles. For a general smooth field the two routes differ by a genuine
  // O(h^{k+1}) interpolation consistency term; in this class the per-edge
  // trace truncation cancels between opposite edges, leaving roundoff.
  double worst_smooth = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double A = unif(rng), B = unif(rng), C = unif(rng), D = unif(rng);
    const double a = unif(rng), b = unif(rng), e = unif(rng), f = unif(rng);
    const double p1 = 2.0 * unif(rng), p2 = 2.0 * unif(rng);
    const VectorField tau = [=](const Vec2 &p) {
      return Vec2(A * std::sin(a * p.y() + p1) + B * std::cos(b * p.y() - p2),
                  C * std::sin(e * p.x() - p1) + D * std::cos(f * p.x() + p2));
    };
    const double sx = 0.02 + 0.03 * (trial / 49.0);
    const double sy = 0.05 - 0.02 * (trial / 49.0);
    const double cx0 = 0.02 * trial, cy0 = 0.3 + 0.01 * trial;
    const Polygon K({{cx0, cy0}, {cx0 + sx, cy0}, {cx0 + sx, cy0 + sy}, {cx0, cy0 + sy}});
    for (int k = 0; k <= 2; ++k) {
      const Eigen::VectorXd from_dofs = pi0_from_dofs(K, k, dofs_of_field(K, k, tau));
      const Eigen::VectorXd direct = l2_project_vector(tau, K, k);
      worst_smooth = std::max(worst_smooth, vec_coeff_l2_norm(K, k, from_dofs - direct));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "dof-route projection vs direct: polynomials %.2e (gate 1e-10), 50 smooth "
                "fields %.2e (gate 1e-9)",
                worst_poly, worst_smooth);
  msg = buf;
  return worst_poly <= 1e-10 && worst_smooth <= 1e-9;
}

bool criterion4(std::string &msg) {
  const TestCase tc = make_case("test1");
  bool ok = true;
  std::string detail;
  for (int k = 0; k <= 2; ++k) {
    const std::vector<Level> lv = hex_sequence(tc, k, {8, 16, 32, 64});
    const std::size_t n = lv.size();
    const double r_e = rate(lv[n - 1].err.e_total, lv[n - 2].err.e_total, lv[n - 1].N,
                            lv[n - 2].N);
    const double r_t = rate(lv[n - 1].Theta, lv[n - 2].Theta, lv[n - 1].N, lv[n - 2].N);
    double eff_last = lv[n - 1].err.e_total / lv[n - 1].Theta;
    double eff_prev = lv[n - 2].err.e_total / lv[n - 2].Theta;
    bool eff_band = true;
    for (const Level &l : lv) eff_band = eff_band && in_band(l.err.e_total / l.Theta, 0.45, 1.05);
    const double eff_var = std::abs(eff_last / eff_prev - 1.0);
    const bool pass = in_band(r_e, k + 1 - 0.15, k + 1 + 0.15) &&
                      in_band(r_t, k + 1 - 0.15, k + 1 + 0.15) && eff_band && eff_var < 0.15;
    ok = ok && pass;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " k=%d r=%.2f rT=%.2f eff=%.3f var=%.1f%%", k, r_e, r_t,
                  eff_last, 100.0 * eff_var);
    detail += buf;
  }
  msg = "uniform hexagonal sequence, last-step rates within (k+1)+-0.15, effectivity in "
        "[0.45,1.05] varying <15%:" + detail;
  return ok;
}

bool criterion5(std::string &msg) {
  const TestCase tc = make_case("test1");
  bool ok = true;
  std::string detail;
  for (int k = 0; k <= 2; ++k) {
    const std::vector<Level> lv = hex_sequence(tc, k, {32, 64});
    const auto fam_rate = [&](double last, double prev) {
      return rate(last, prev, lv[1].N, lv[0].N);
    };
    const double rates[5] = {
        fam_rate(lv[1].terms.Phi, lv[0].terms.Phi),
        fam_rate(lv[1].terms.eta, lv[0].terms.eta),
        fam_rate(lv[1].terms.theta, lv[0].terms.theta),
        fam_rate(lv[1].terms.Psi, lv[0].terms.Psi),
        fam_rate(lv[1].terms.Lambda, lv[0].terms.Lambda),
    };
    char buf[96];
    std::snprintf(buf, sizeof(buf), " k=%d %.2f/%.2f/%.2f/%.2f/%.2f", k, rates[0], rates[1],
                  rates[2], rates[3], rates[4]);
    detail += buf;
    for (double r : rates) ok = ok && in_band(r, k + 1 - 0.25, k + 1 + 0.25);
  }
  msg = "indicator families Phi/eta/theta/Psi/Lambda at (k+1)+-0.25 on the last uniform "
        "step:" + detail;
  return ok;
}

bool criterion6(std::string &msg) {
  const TestCase tc = make_case("test2");
  const PolyMesh mesh0 = generate_hex_mesh(4).with_labels(tc.labeler);
  bool ok = true;
  std::string detail;
  for (int k = 0; k <= 2; ++k) {
    AdaptConfig ucfg;
    ucfg.mode = RefineMode::Uniform;
    ucfg.max_iterations = 5;
    ucfg.max_dofs = 200000;
    AdaptConfig acfg;
    acfg.mode = RefineMode::Adaptive;
    acfg.beta = 0.5;
    acfg.max_iterations = 12;
    const StudyResult uni = run_study(mesh0, k, tc.data, ucfg);
    const StudyResult ada = run_study(mesh0, k, tc.data, acfg);

    std::vector<std::pair<long, double>> curve;
    for (const StudyRow &r : uni.rows) curve.emplace_back(r.N, r.e_total);

    int compared = 0;
    double worst_ratio = 0.0; // adaptive error / uniform error at matched N
    double eff_lo = 10.0, eff_hi = 0.0;
    for (const StudyRow &r : ada.rows) {
      const double eff = r.effectivity;
      eff_lo = std::min(eff_lo, eff);
      eff_hi = std::max(eff_hi, eff);
      if (r.iteration <= 3) continue;
      if (r.N < curve.front().first || r.N > curve.back().first) continue;
      const double eu = interp_loglog(curve, r.N);
      worst_ratio = std::max(worst_ratio, r.e_total / eu);
      ++compared;
    }
    const bool pass = compared >= 3 && worst_ratio < 1.0 && eff_lo >= 0.7 && eff_hi <= 1.1;
    ok = ok && pass;
    char buf[96];
    std::snprintf(buf, sizeof(buf), " k=%d ratio<=%.2f (%d pts) eff=[%.2f,%.2f]", k,
                  worst_ratio, compared, eff_lo, eff_hi);
    detail += buf;
  }
  msg = "adaptive error below the uniform curve at matched N past iteration 3, adaptive "
        "effectivity in [0.7,1.1]:" + detail;
  return ok;
}

bool criterion7(std::string &msg) {
  const TestCase tc = make_case("test3");
  const PolyMesh mesh0 = generate_lshape_mesh(6).with_labels(tc.labeler);
  AdaptConfig cfg;
  cfg.mode = RefineMode::Adaptive;
  cfg.beta = 0.5;
  cfg.max_iterations = 6;
  double frac_at_5 = 0.0;
  const StudyObserver obs = [&](int iteration, const PolyMesh &, const MixedSolution &,
                                const IndicatorReport &rep, const MarkSet &marked) {
    if (iteration != 5 || marked.empty()) return;
    int near = 0;
    for (int c : marked)
      if (rep.cells[c].barycenter.norm() <= 0.25) ++near;
    frac_at_5 = double(near) / double(marked.size());
  };
  const StudyResult res = run_study(mesh0, 1, tc.data, cfg, obs);
  double eff_lo = 10.0, eff_hi = 0.0;
  for (const StudyRow &r : res.rows) {
    eff_lo = std::min(eff_lo, r.effectivity);
    eff_hi = std::max(eff_hi, r.effectivity);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "marking concentrates at the reentrant corner: %.0f%% of marked barycenters "
                "within 0.25 at iteration 5 (gate 50%%), eff=[%.2f,%.2f] (band [0.6,1.1])",
                100.0 * frac_at_5, eff_lo, eff_hi);
  msg = buf;
  return frac_at_5 >= 0.5 && eff_lo >= 0.6 && eff_hi <= 1.1;
}

bool criterion8(std::string &msg) {
  // Constant kappa turns the two kappa-variation terms into exact zeros.
  const TestCase tc = make_case("test1");
  const PolyMesh mesh = generate_hex_mesh(4).with_labels(tc.labeler);
  AssembledSystem system;
  const MixedSolution sol = solve_problem(mesh, 1, tc.data, &system);
  const IndicatorReport rep = compute_indicators(mesh, 1, sol, tc.data, &system);
  bool zeros = true;
  for (const auto &cell : rep.cells)
    zeros = zeros && cell.Upsilon == 0.0 && cell.Psi2 == 0.0;

  // Empty Dirichlet datum turns the trace term into an exact zero.
  ProblemData hom;
  hom.kappa = Diffusion::identity();
  hom.f = [](const Vec2 &) { return 1.0; };
  AssembledSystem system2;
  const MixedSolution sol2 = solve_problem(mesh, 1, hom, &system2);
  const IndicatorReport rep2 = compute_indicators(mesh, 1, sol2, hom, &system2);
  bool eta2_zero = true;
  for (const auto &cell : rep2.cells) eta2_zero = eta2_zero && cell.eta2 == 0.0;

  msg = std::string("constant kappa: Upsilon and Psi2 identically zero -> ") +
        (zeros ? "yes" : "NO") + "; empty g: eta2 identically zero -> " +
        (eta2_zero ? "yes" : "NO");
  return zeros && eta2_zero;
}

bool criterion9(std::string &msg) {
  bool ok = true;
  long checked = 0;
  const std::vector<std::string> names = {"test1", "test2", "test3",
                                          "patch-0", "patch-1", "patch-2"};
  for (const std::string &name : names) {
    const TestCase tc = make_case(name);
    std::vector<PolyMesh> meshes;
    if (tc.domain == TestCase::Domain::LShape) {
      meshes.push_back(generate_lshape_mesh(4).with_labels(tc.labeler));
      meshes.push_back(generate_lshape_mesh(6).with_labels(tc.labeler));
    } else {
      meshes.push_back(generate_hex_mesh(4).with_labels(tc.labeler));
      meshes.push_back(generate_distorted_quad_mesh(5).with_labels(tc.labeler));
      MarkSet some = {0, 1, 2};
      meshes.push_back(refine(meshes.front(), some).with_labels(tc.labeler));
    }
    for (const PolyMesh &mesh : meshes) {
      for (int k = 0; k <= 2; ++k) {
        const AssembledSystem system = assemble(mesh, k, tc.data);
        const long lhs = dof_count(mesh, k);
        const long rhs = long(system.dofmap.reduced_size()) +
                         long(system.dofmap.neumann_dofs.size());
        ok = ok && lhs == rhs;
        ++checked;
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "dof_count equals assembled size plus eliminated Neumann dofs on %ld "
                "mesh/degree combinations, exactly",
                checked);
  msg = buf;
  return ok;
}

bool criterion10(std::string &msg) {
  const TestCase tc = make_case("test2");
  const PolyMesh mesh = generate_hex_mesh(4).with_labels(tc.labeler);

  ProblemData scaled = tc.data;
  const ProblemData &base = tc.data;
  scaled.f = [&base](const Vec2 &p) { return 10.0 * base.f(p); };
  scaled.g = [&base](const Vec2 &p) { return 10.0 * base.g(p); };
  scaled.dgds = [&base](const Vec2 &p, const Vec2 &t) { return 10.0 * base.dgds(p, t); };
  scaled.exact_u = [&base](const Vec2 &p) { return 10.0 * base.exact_u(p); };
  scaled.exact_sigma = [&base](const Vec2 &p) { return Vec2(10.0 * base.exact_sigma(p)); };
  scaled.exact_div_sigma = [&base](const Vec2 &p) { return 10.0 * base.exact_div_sigma(p); };

  bool ok = true;
  double worst = 0.0;
  for (int k = 0; k <= 2; ++k) {
    AssembledSystem s1, s2;
    const MixedSolution sol1 = solve_problem(mesh, k, base, &s1);
    const MixedSolution sol2 = solve_problem(mesh, k, scaled, &s2);
    const ErrorNorms e1 = error_norms(mesh, sol1, base);
    const ErrorNorms e2 = error_norms(mesh, sol2, scaled);
    const IndicatorReport r1 = compute_indicators(mesh, k, sol1, base, &s1);
    const IndicatorReport r2 = compute_indicators(mesh, k, sol2, scaled, &s2);
    const double checks[4] = {std::abs(e2.e_sigma / e1.e_sigma - 10.0) / 10.0,
                              std::abs(e2.e_u / e1.e_u - 10.0) / 10.0,
                              std::abs(e2.e_total / e1.e_total - 10.0) / 10.0,
                              std::abs(r2.Theta / r1.Theta - 10.0) / 10.0};
    for (double c : checks) worst = std::max(worst, c);
    ok = ok && mark(r1, 0.5) == mark(r2, 0.5);
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "data x10 scales errors and Theta by 10 (worst relative drift %.2e, gate "
                "1e-9) with unchanged mark sets",
                worst);
  msg = buf;
  return ok && worst <= 1e-9;
}

} // namespace

int main(int argc, char **argv) {
  using Criterion = bool (*)(std::string &);
  const Criterion criteria[10] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                  criterion6, criterion7, criterion8, criterion9, criterion10};
  int lo = 1, hi = 10;
  if (argc > 1) {
    const int which = std::atoi(argv[1]);
    if (which < 1 || which > 10) {
      std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
      return 2;
    }
    lo = hi = which;
  }
  bool all_ok = true;
  for (int i = lo; i <= hi; ++i) {
    std::string msg;
    bool ok = false;
    try {
      ok = criteria[i - 1](msg);
    } catch (const std::exception &e) {
      msg = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d: %s\n", ok ? "PASS" : "FAIL", i, msg.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
