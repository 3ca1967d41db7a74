#include "mvem/problems.hpp"

#include <random>
#include <vector>

namespace mvem {

namespace {

Dual2 jet_at(const JetFn &u, const Vec2 &p) {
  return u(Dual2::var_x(p.x()), Dual2::var_y(p.y()));
}

} // namespace

ProblemData data_from_jet(const JetFn &u) {
  ProblemData d;
  d.f = [u](const Vec2 &p) {
    const Dual2 j = jet_at(u, p);
    return -(j.dxx + j.dyy);
  };
  d.g = [u](const Vec2 &p) { return jet_at(u, p).v; };
  d.dgds = [u](const Vec2 &p, const Vec2 &t) {
    const Dual2 j = jet_at(u, p);
    return j.dx * t.x() + j.dy * t.y();
  };
  d.exact_u = d.g;
  d.exact_sigma = [u](const Vec2 &p) {
    const Dual2 j = jet_at(u, p);
    return Vec2(j.dx, j.dy);
  };
  d.exact_div_sigma = [u](const Vec2 &p) {
    const Dual2 j = jet_at(u, p);
    return j.dxx + j.dyy;
  };
  return d;
}

TestCase make_case(const std::string &name) {
  const double PI = std::acos(-1.0);
  TestCase c;
  c.name = name;

  const auto lower_left_dirichlet = [](const Vec2 &m) {
    return (m.y() < 1e-9 || m.x() < 1e-9) ? BoundaryLabel::Dirichlet
                                          : BoundaryLabel::Neumann;
  };

  if (name == "test1") {
    c.jet = [PI](const Dual2 &x, const Dual2 &y) {
      return cos(PI * x) * cos(PI * y);
    };
    c.labeler = lower_left_dirichlet;
  } else if (name == "test2") {
    c.jet = [](const Dual2 &x, const Dual2 &y) {
      const Dual2 wx = (x - 1.0) * (x - 1.0);
      const Dual2 wy = (y - 1.0) * (y - 1.0);
      return wx * wy * (inverse(x + 0.1) + inverse(1.0 + y));
    };
    c.labeler = lower_left_dirichlet;
  } else if (name == "test3") {
    c.domain = TestCase::Domain::LShape;
    c.jet = [](const Dual2 &x, const Dual2 &y) {
      const Dual2 wx = (x + 1.0) * (x + 1.0);
      const Dual2 wy = (y + 1.0) * (y + 1.0);
      const Dual2 r2 = (x - 0.1) * (x - 0.1) + (y - 0.1) * (y - 0.1);
      return wx * wy / sqrt(r2);
    };
    c.labeler = [](const Vec2 &m) {
      return (m.x() < -1.0 + 1e-9 || m.y() < -1.0 + 1e-9)
                 ? BoundaryLabel::Neumann
                 : BoundaryLabel::Dirichlet;
    };
  } else if (name == "patch-0" || name == "patch-1" || name == "patch-2") {
    const int k = name.back() - '0';
    if (k == 0) {
      c.jet = [](const Dual2 &, const Dual2 &y) { return y; };
    } else if (k == 1) {
      c.jet = [](const Dual2 &x, const Dual2 &y) { return x * (2.0 - x) + y; };
    } else {
      c.jet = [](const Dual2 &x, const Dual2 &y) {
        return x * x * (3.0 - 2.0 * x) + y * y * y - y;
      };
    }
    c.labeler = [](const Vec2 &m) {
      return m.x() > 1.0 - 1e-9 ? BoundaryLabel::Neumann
                                : BoundaryLabel::Dirichlet;
    };
  } else {
    throw Error("unknown case '" + name +
                "'; expected test1, test2, test3, or patch-0/1/2");
  }

  c.data = data_from_jet(c.jet);
  return c;
}

namespace {

struct Segment {
  Vec2 a, b;
  Vec2 outward_normal() const {
    const Vec2 t = (b - a).normalized();
    return Vec2(t.y(), -t.x()); // boundary traversed counterclockwise
  }
};

std::vector<Segment> boundary_segments(TestCase::Domain domain) {
  if (domain == TestCase::Domain::UnitSquare)
    return {{{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}, {{1, 1}, {0, 1}},
            {{0, 1}, {0, 0}}};
  return {{{-1, -1}, {1, -1}}, {{1, -1}, {1, 0}},  {{1, 0}, {0, 0}},
          {{0, 0}, {0, 1}},    {{0, 1}, {-1, 1}},  {{-1, 1}, {-1, -1}}};
}

bool inside_domain(TestCase::Domain domain, const Vec2 &p) {
  if (domain == TestCase::Domain::UnitSquare)
    return p.x() > 0 && p.x() < 1 && p.y() > 0 && p.y() < 1;
  const bool in_box = p.x() > -1 && p.x() < 1 && p.y() > -1 && p.y() < 1;
  return in_box && !(p.x() >= 0 && p.y() >= 0);
}

} // namespace

VerifyReport verify_manufactured(const TestCase &c) {
  if (!c.data.has_exact() || !c.data.f)
    throw ManufacturedMismatch(c.name + ": case carries no exact fields");

  VerifyReport report;
  std::mt19937 rng(240817u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool lshape = c.domain == TestCase::Domain::LShape;
  const double lo = lshape ? -1.0 : 0.0;
  const double span = lshape ? 2.0 : 1.0;
  const double h = 1e-4;

  const auto value = [&](double x, double y) {
    return c.data.exact_u(Vec2(x, y));
  };

  while (report.interior_samples < 1000) {
    const Vec2 p(lo + span * unit(rng), lo + span * unit(rng));
    if (!inside_domain(c.domain, p)) continue;
    ++report.interior_samples;

    const double uc = value(p.x(), p.y());
    const double ue = value(p.x() + h, p.y());
    const double uw = value(p.x() - h, p.y());
    const double un = value(p.x(), p.y() + h);
    const double us = value(p.x(), p.y() - h);

    const Vec2 fd_grad((ue - uw) / (2.0 * h), (un - us) / (2.0 * h));
    const Vec2 sigma = c.data.exact_sigma(p);
    const double grad_rel = (fd_grad - sigma).norm() /
                            std::max(1.0, sigma.norm());
    report.max_gradient_mismatch =
        std::max(report.max_gradient_mismatch, grad_rel);
    if (grad_rel > 1e-5)
      throw ManufacturedMismatch(
          c.name + ": gradient identity kappa grad u = sigma fails at (" +
          std::to_string(p.x()) + ", " + std::to_string(p.y()) +
          "), relative mismatch " + std::to_string(grad_rel));

    const double fd_lap = (ue + uw + un + us - 4.0 * uc) / (h * h);
    const double f = c.data.f(p);
    const double pde_rel = std::abs(fd_lap + f) / std::max(1.0, std::abs(f));
    report.max_pde_residual = std::max(report.max_pde_residual, pde_rel);
    if (pde_rel > 1e-5)
      throw ManufacturedMismatch(
          c.name + ": PDE identity -div(kappa grad u) = f fails at (" +
          std::to_string(p.x()) + ", " + std::to_string(p.y()) +
          "), relative residual " + std::to_string(pde_rel));
  }

  // Collect Neumann boundary samples; cases without a Neumann part pass
  // trivially with zero samples.
  std::vector<Segment> neumann;
  for (const Segment &s : boundary_segments(c.domain))
    if (c.labeler(0.5 * (s.a + s.b)) == BoundaryLabel::Neumann)
      neumann.push_back(s);

  if (!neumann.empty()) {
    while (report.neumann_samples < 100) {
      const Segment &s = neumann[report.neumann_samples % neumann.size()];
      const double t = unit(rng);
      const Vec2 p = s.a + t * (s.b - s.a);
      ++report.neumann_samples;
      const double flux = c.data.exact_sigma(p).dot(s.outward_normal());
      report.max_neumann_flux =
          std::max(report.max_neumann_flux, std::abs(flux));
      if (std::abs(flux) > 1e-10)
        throw ManufacturedMismatch(
            c.name + ": Neumann flux sigma . nu = 0 fails at (" +
            std::to_string(p.x()) + ", " + std::to_string(p.y()) +
            "), flux " + std::to_string(flux));
    }
  }
  return report;
}

} // namespace mvem
