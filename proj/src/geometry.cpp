#include "mvem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mvem {

namespace {

double cross2(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2> &v) {
  double s = 0.0;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) s += cross2(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

// Proper or improper intersection of open segments, with a scale-relative slack.
bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2, double tol) {
  const Vec2 r = p2 - p1, s = q2 - q1;
  const double rxs = cross2(r, s);
  const Vec2 qp = q1 - p1;
  if (std::abs(rxs) > tol * tol) {
    const double t = cross2(qp, s) / rxs;
    const double u = cross2(qp, r) / rxs;
    const double eps = 1e-12;
    return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
  }
  // Parallel. Overlapping collinear segments are non-simple.
  if (std::abs(cross2(qp, r)) > tol * std::max(1.0, r.norm())) return false;
  const double rr = r.squaredNorm();
  if (rr == 0.0) return false;
  double t0 = qp.dot(r) / rr;
  double t1 = (q2 - p1).dot(r) / rr;
  if (t0 > t1) std::swap(t0, t1);
  const double eps = 1e-10;
  return t0 < 1.0 - eps && t1 > eps;
}

} // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
  const int n = static_cast<int>(verts_.size());
  if (n < 3) throw Error("polygon needs at least 3 vertices");

  double diam = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) diam = std::max(diam, (verts_[i] - verts_[j]).norm());
  diameter_ = diam;
  if (!(diam > 0.0)) throw Error("polygon has zero diameter");

  for (int i = 0; i < n; ++i) {
    const double len = (verts_[(i + 1) % n] - verts_[i]).norm();
    if (len <= 1e-14 * diam) {
      std::ostringstream os;
      os << "polygon has degenerate edge at vertex " << i << " (length " << len << ")";
      throw Error(os.str());
    }
  }

  area_ = signed_area(verts_);
  if (!(area_ > 0.0)) throw Error("polygon is not CCW with positive area");

  // Simplicity: no two non-adjacent edges intersect.
  const double tol = 1e-14 * diam;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(verts_[i], verts_[(i + 1) % n], verts_[j], verts_[(j + 1) % n], tol))
        throw Error("polygon is not simple");
    }
  }

  // Area centroid.
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2 &a = verts_[i], &b = verts_[(i + 1) % n];
    c += (a + b) * cross2(a, b);
  }
  centroid_ = c / (6.0 * area_);
}

Vec2 Polygon::vertex_centroid() const {
  Vec2 c = Vec2::Zero();
  for (const auto &v : verts_) c += v;
  return c / static_cast<double>(verts_.size());
}

namespace {

// Triangle (a, v[i], b) CCW orientation sign for ear test.
double tri_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) { return 0.5 * cross2(b - a, c - a); }

bool point_in_triangle(const Vec2 &p, const Vec2 &a, const Vec2 &b, const Vec2 &c, double tol) {
  const double d1 = tri_area(p, a, b), d2 = tri_area(p, b, c), d3 = tri_area(p, c, a);
  return d1 > tol && d2 > tol && d3 > tol;
}

// Ear decomposition of a simple CCW polygon. Used only for fallback star
// point candidates, so a failed clip just stops the search.
std::vector<std::array<Vec2, 3>> ear_decomposition(std::vector<Vec2> v) {
  std::vector<std::array<Vec2, 3>> ears;
  double scale = 0.0;
  for (size_t i = 0; i < v.size(); ++i) scale = std::max(scale, v[i].norm());
  const double tol = 1e-14 * std::max(1.0, scale);
  int guard = static_cast<int>(v.size()) * static_cast<int>(v.size()) + 16;
  while (v.size() > 3 && guard-- > 0) {
    const int n = static_cast<int>(v.size());
    bool clipped = false;
    for (int i = 0; i < n; ++i) {
      const Vec2 &a = v[(i + n - 1) % n], &b = v[i], &c = v[(i + 1) % n];
      if (tri_area(a, b, c) <= tol) continue;
      bool contains = false;
      for (int j = 0; j < n && !contains; ++j) {
        if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
        contains = point_in_triangle(v[j], a, b, c, -tol);
      }
      if (contains) continue;
      ears.push_back({a, b, c});
      v.erase(v.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) break;
  }
  if (v.size() == 3 && tri_area(v[0], v[1], v[2]) > tol) ears.push_back({v[0], v[1], v[2]});
  return ears;
}

Vec2 incenter(const std::array<Vec2, 3> &t) {
  const double a = (t[1] - t[2]).norm();
  const double b = (t[0] - t[2]).norm();
  const double c = (t[0] - t[1]).norm();
  return (a * t[0] + b * t[1] + c * t[2]) / (a + b + c);
}

} // namespace

SubTriangulation sub_triangulate(const Polygon &poly) {
  const auto &v = poly.vertices();
  const int n = poly.size();
  const double min_area = 1e-14 * poly.diameter() * poly.diameter();

  std::vector<Vec2> candidates = {poly.vertex_centroid(), poly.centroid()};
  for (const auto &ear : ear_decomposition(v)) candidates.push_back(incenter(ear));

  for (const Vec2 &p : candidates) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const Vec2 &a = v[i], &b = v[(i + 1) % n];
      ok = tri_area(a, b, p) > min_area;
    }
    if (!ok) continue;
    SubTriangulation st;
    st.star_point = p;
    st.triangles.reserve(n);
    for (int i = 0; i < n; ++i) st.triangles.push_back({v[i], v[(i + 1) % n], p});
    return st;
  }
  throw StarPointNotInterior("no interior star point found for polygon");
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  // Ascending order, symmetric weights.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
  std::vector<double> xn(n), wn(n);
  for (int i = 0; i < n; ++i) {
    xn[i] = nodes[idx[i]];
    wn[i] = weights[idx[i]];
  }
  nodes = xn;
  weights = wn;
}

QuadratureRule reference_triangle_rule(int degree) {
  // Collapsed tensor rule: x = u, y = v (1 - u), jacobian (1 - u).
  // A monomial x^a y^b pulls back to u-degree a + b + 1 and v-degree b.
  const int d = std::max(degree, 0);
  const int nu = (d + 2) / 2 + 1; // exact to u-degree 2*nu - 1 >= d + 1
  const int nv = (d + 1) / 2 + 1;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);

  QuadratureRule rule;
  rule.exactness = d;
  rule.points.resize(nu * nv, 2);
  rule.weights.resize(nu * nv);
  int m = 0;
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (xu[i] + 1.0);
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (xv[j] + 1.0);
      rule.points(m, 0) = u;
      rule.points(m, 1) = v * (1.0 - u);
      rule.weights(m) = 0.25 * wu[i] * wv[j] * (1.0 - u);
      ++m;
    }
  }
  return rule;
}

QuadratureRule polygon_quadrature(const Polygon &poly, int degree) {
  const SubTriangulation st = sub_triangulate(poly);
  const QuadratureRule ref = reference_triangle_rule(degree);
  const int per = ref.size();
  QuadratureRule rule;
  rule.exactness = std::max(degree, 0);
  rule.points.resize(per * static_cast<int>(st.triangles.size()), 2);
  rule.weights.resize(per * static_cast<int>(st.triangles.size()));
  int m = 0;
  for (const auto &t : st.triangles) {
    const Vec2 &a = t[0];
    const Vec2 e1 = t[1] - t[0], e2 = t[2] - t[0];
    const double jac = e1.x() * e2.y() - e1.y() * e2.x(); // 2 * area, positive
    for (int q = 0; q < per; ++q) {
      const double u = ref.points(q, 0), v = ref.points(q, 1);
      const Vec2 p = a + u * e1 + v * e2;
      rule.points(m, 0) = p.x();
      rule.points(m, 1) = p.y();
      rule.weights(m) = ref.weights(q) * jac;
      ++m;
    }
  }
  return rule;
}

QuadratureRule edge_quadrature(const Vec2 &a, const Vec2 &b, int degree) {
  const int d = std::max(degree, 0);
  const int n = d / 2 + 1; // exact to degree 2n - 1 >= d
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double len = (b - a).norm();
  QuadratureRule rule;
  rule.exactness = d;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (x[i] + 1.0);
    const Vec2 p = a + t * (b - a);
    rule.points(i, 0) = p.x();
    rule.points(i, 1) = p.y();
    rule.weights(i) = 0.5 * w[i] * len;
  }
  return rule;
}

} // namespace mvem
