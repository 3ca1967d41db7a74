#include "mvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace mvem {

namespace {

double cross2(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

struct PairHash {
  size_t operator()(const std::pair<int, int> &p) const {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^ p.second);
  }
};

} // namespace

void PolyMesh::finalize() {
  const int nc = num_cells();
  if (nc == 0) throw Error("mesh has no cells");

  polygons_.clear();
  polygons_.reserve(nc);
  for (int c = 0; c < nc; ++c) {
    std::vector<Vec2> pts;
    pts.reserve(cells_[c].size());
    for (int idx : cells_[c]) {
      if (idx < 0 || idx >= num_vertices()) throw Error("cell references missing vertex");
      pts.push_back(vertices_[idx]);
    }
    try {
      polygons_.emplace_back(std::move(pts));
    } catch (const Error &e) {
      throw Error("cell " + std::to_string(c) + ": " + e.what());
    }
  }

  edges_.clear();
  cell_edges_.assign(nc, {});
  std::unordered_map<std::pair<int, int>, int, PairHash> edge_of;
  for (int c = 0; c < nc; ++c) {
    const auto &cyc = cells_[c];
    const int m = static_cast<int>(cyc.size());
    cell_edges_[c].resize(m);
    for (int i = 0; i < m; ++i) {
      const int a = cyc[i], b = cyc[(i + 1) % m];
      if (a == b) throw Error("cell repeats a vertex consecutively");
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto it = edge_of.find(key);
      int e;
      if (it == edge_of.end()) {
        e = static_cast<int>(edges_.size());
        edge_of.emplace(key, e);
        Edge rec;
        rec.v0 = key.first;
        rec.v1 = key.second;
        rec.cells = {c, -1};
        edges_.push_back(rec);
      } else {
        e = it->second;
        Edge &rec = edges_[e];
        if (rec.cells[1] >= 0)
          throw Error("edge " + std::to_string(rec.v0) + "-" + std::to_string(rec.v1) +
                      " referenced by more than two cells");
        rec.cells[1] = c;
      }
      cell_edges_[c][i] = CellEdge{e, a == key.first ? +1 : -1};
    }
  }

  // Interior edges must be traversed once in each direction.
  for (int eid = 0; eid < num_edges(); ++eid) {
    const Edge &e = edges_[eid];
    if (e.boundary()) continue;
    int dir_sum = 0;
    for (int side = 0; side < 2; ++side) {
      for (const CellEdge &ce : cell_edges_[e.cells[side]])
        if (ce.edge == eid) dir_sum += ce.sign;
    }
    if (dir_sum != 0) throw Error("interior edge traversed twice in the same direction");
  }

  // Cell areas must add up to the area enclosed by the boundary cycle; this
  // catches overlaps and gaps without knowing the domain.
  total_area_ = 0.0;
  for (const Polygon &p : polygons_) total_area_ += p.area();
  double boundary_area = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto &cyc = cells_[c];
    const int m = static_cast<int>(cyc.size());
    for (int i = 0; i < m; ++i) {
      const int e = cell_edges_[c][i].edge;
      if (!edges_[e].boundary()) continue;
      boundary_area += 0.5 * cross2(vertices_[cyc[i]], vertices_[cyc[(i + 1) % m]]);
    }
  }
  if (std::abs(total_area_ - boundary_area) > 1e-10 * total_area_)
    throw Error("cell areas do not tile the region bounded by the boundary edges");
}

void PolyMesh::validate_labels() const {
  for (const Edge &e : edges_) {
    if (e.boundary() && e.label == BoundaryLabel::Interior)
      throw Error("boundary edge " + std::to_string(e.v0) + "-" + std::to_string(e.v1) +
                  " has no boundary label");
    if (!e.boundary() && e.label != BoundaryLabel::Interior)
      throw Error("interior edge carries a boundary label");
  }
}

PolyMesh PolyMesh::build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                         const Labeler &labeler) {
  PolyMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.cells_ = std::move(cells);
  mesh.finalize();
  for (Edge &e : mesh.edges_) {
    if (!e.boundary()) continue;
    e.label = labeler(0.5 * (mesh.vertices_[e.v0] + mesh.vertices_[e.v1]));
  }
  mesh.validate_labels();
  return mesh;
}

PolyMesh PolyMesh::build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                         const EdgeLabelMap &labels) {
  PolyMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.cells_ = std::move(cells);
  mesh.finalize();
  for (Edge &e : mesh.edges_) {
    if (!e.boundary()) continue;
    auto it = labels.find({e.v0, e.v1});
    if (it == labels.end())
      throw Error("no label for boundary edge " + std::to_string(e.v0) + "-" +
                  std::to_string(e.v1));
    e.label = it->second;
  }
  mesh.validate_labels();
  return mesh;
}

PolyMesh PolyMesh::with_labels(const Labeler &labeler) const {
  PolyMesh copy = *this;
  for (Edge &e : copy.edges_) {
    if (!e.boundary()) continue;
    e.label = labeler(0.5 * (copy.vertices_[e.v0] + copy.vertices_[e.v1]));
  }
  copy.validate_labels();
  return copy;
}

double PolyMesh::max_diameter() const {
  double h = 0.0;
  for (const Polygon &p : polygons_) h = std::max(h, p.diameter());
  return h;
}

namespace {

/// Tolerance-based interning of vertex coordinates for generator output.
class VertexUnifier {
public:
  explicit VertexUnifier(double tol) : tol_(tol) {}

  int intern(const Vec2 &p) {
    const long long qx = llround(p.x() / tol_), qy = llround(p.y() / tol_);
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find(key(qx + dx, qy + dy));
        if (it == buckets_.end()) continue;
        for (int idx : it->second)
          if ((verts_[idx] - p).norm() <= tol_) return idx;
      }
    }
    const int idx = static_cast<int>(verts_.size());
    verts_.push_back(p);
    buckets_[key(qx, qy)].push_back(idx);
    return idx;
  }

  std::vector<Vec2> take() { return std::move(verts_); }

private:
  static long long key(long long qx, long long qy) { return (qx << 21) ^ qy; }
  double tol_;
  std::vector<Vec2> verts_;
  std::unordered_map<long long, std::vector<int>> buckets_;
};

/// Clip a convex polygon against an axis-aligned half plane, writing the
/// clipped coordinate exactly onto the line.
std::vector<Vec2> clip_axis(const std::vector<Vec2> &poly, int axis, double bound, int keep_sign) {
  std::vector<Vec2> out;
  const int n = static_cast<int>(poly.size());
  auto inside = [&](const Vec2 &p) { return keep_sign * (p[axis] - bound) >= 0.0; };
  for (int i = 0; i < n; ++i) {
    const Vec2 &a = poly[i], &b = poly[(i + 1) % n];
    const bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (bound - a[axis]) / (b[axis] - a[axis]);
      Vec2 p = a + t * (b - a);
      p[axis] = bound;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Vec2> clip_to_box(std::vector<Vec2> poly, double x0, double x1, double y0, double y1) {
  poly = clip_axis(poly, 0, x0, +1);
  if (poly.size() >= 3) poly = clip_axis(poly, 0, x1, -1);
  if (poly.size() >= 3) poly = clip_axis(poly, 1, y0, +1);
  if (poly.size() >= 3) poly = clip_axis(poly, 1, y1, -1);
  return poly;
}

std::vector<Vec2> drop_consecutive_duplicates(const std::vector<Vec2> &poly, double tol) {
  std::vector<Vec2> out;
  for (const Vec2 &p : poly) {
    if (!out.empty() && (out.back() - p).norm() <= tol) continue;
    out.push_back(p);
  }
  while (out.size() >= 2 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  return out;
}

double poly_area(const std::vector<Vec2> &v) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += cross2(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

PolyMesh mesh_from_coordinate_cells(const std::vector<std::vector<Vec2>> &cells, double unify_tol,
                                    const PolyMesh::Labeler &labeler) {
  VertexUnifier unifier(unify_tol);
  std::vector<std::vector<int>> index_cells;
  index_cells.reserve(cells.size());
  for (const auto &poly : cells) {
    std::vector<int> cyc;
    cyc.reserve(poly.size());
    for (const Vec2 &p : poly) cyc.push_back(unifier.intern(p));
    index_cells.push_back(std::move(cyc));
  }
  return PolyMesh::build(unifier.take(), std::move(index_cells), labeler);
}

const PolyMesh::Labeler all_dirichlet = [](const Vec2 &) { return BoundaryLabel::Dirichlet; };

} // namespace

PolyMesh generate_hex_mesh(int n) {
  if (n < 2) throw Error("generate_hex_mesh needs n >= 2");
  const double w = 1.0 / n;
  const int m = std::max(2, static_cast<int>(std::lround(n / 0.8660254037844386)));
  const double period = 1.0 / m; // vertical center spacing = 1.5 R
  const double R = period * (2.0 / 3.0);

  std::vector<std::vector<Vec2>> cells;
  for (int j = 0; j <= m; ++j) {
    const double cy = j * period;
    const double offset = (j % 2 == 1) ? 0.5 * w : 0.0;
    for (int i = -1; i <= n; ++i) {
      const double cx = i * w + offset;
      std::vector<Vec2> hex = {
          {cx, cy - R},           {cx + 0.5 * w, cy - 0.5 * R}, {cx + 0.5 * w, cy + 0.5 * R},
          {cx, cy + R},           {cx - 0.5 * w, cy + 0.5 * R}, {cx - 0.5 * w, cy - 0.5 * R},
      };
      auto piece = clip_to_box(std::move(hex), 0.0, 1.0, 0.0, 1.0);
      piece = drop_consecutive_duplicates(piece, 1e-12 * w);
      if (piece.size() < 3) continue;
      if (poly_area(piece) < 0.01 * w * R) continue;
      cells.push_back(std::move(piece));
    }
  }
  return mesh_from_coordinate_cells(cells, 1e-9 * w, all_dirichlet);
}

PolyMesh generate_distorted_quad_mesh(int n) {
  if (n < 2) throw Error("generate_distorted_quad_mesh needs n >= 2");
  const double s = 1.0 / n;
  std::vector<Vec2> verts((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const double x = i * s, y = j * s;
      double d = 0.0;
      if (i > 0 && i < n && j > 0 && j < n)
        d = 0.08 * s * std::sin(2.0 * M_PI * x) * std::sin(2.0 * M_PI * y);
      verts[j * (n + 1) + i] = Vec2(x + d, y + d);
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({j * (n + 1) + i, j * (n + 1) + i + 1, (j + 1) * (n + 1) + i + 1,
                       (j + 1) * (n + 1) + i});
  return PolyMesh::build(std::move(verts), std::move(cells), all_dirichlet);
}

PolyMesh generate_lshape_mesh(int n) {
  if (n < 2 || n % 2 != 0) throw Error("generate_lshape_mesh needs even n >= 2");
  const double s = 2.0 / n;
  std::vector<Vec2> verts((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts[j * (n + 1) + i] = Vec2(-1.0 + i * s, -1.0 + j * s);
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double cx = -1.0 + (i + 0.5) * s, cy = -1.0 + (j + 0.5) * s;
      if (cx > 0.0 && cy > 0.0) continue; // removed quadrant
      cells.push_back({j * (n + 1) + i, j * (n + 1) + i + 1, (j + 1) * (n + 1) + i + 1,
                       (j + 1) * (n + 1) + i});
    }
  }
  const PolyMesh::Labeler labeler = [](const Vec2 &mid) {
    if (std::abs(mid.x() + 1.0) < 1e-12 || std::abs(mid.y() + 1.0) < 1e-12)
      return BoundaryLabel::Neumann;
    return BoundaryLabel::Dirichlet;
  };
  return PolyMesh::build(std::move(verts), std::move(cells), labeler);
}

PolyMesh refine(const PolyMesh &mesh, const MarkSet &marked) {
  MarkSet mk = marked;
  std::sort(mk.begin(), mk.end());
  mk.erase(std::unique(mk.begin(), mk.end()), mk.end());
  if (!mk.empty() && (mk.front() < 0 || mk.back() >= mesh.num_cells()))
    throw Error("mark set references a missing cell");

  std::vector<bool> is_marked(mesh.num_cells(), false);
  for (int c : mk) is_marked[c] = true;

  std::vector<Vec2> verts = mesh.vertices();
  std::vector<int> edge_mid(mesh.num_edges(), -1);
  for (int c : mk) {
    for (const auto &ce : mesh.cell_edges(c)) {
      if (edge_mid[ce.edge] >= 0) continue;
      const auto &e = mesh.edge(ce.edge);
      edge_mid[ce.edge] = static_cast<int>(verts.size());
      verts.push_back(0.5 * (mesh.vertex(e.v0) + mesh.vertex(e.v1)));
    }
  }

  std::vector<std::vector<int>> new_cells;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto &cyc = mesh.cell(c);
    const auto &ces = mesh.cell_edges(c);
    const int m = static_cast<int>(cyc.size());
    if (!is_marked[c]) {
      std::vector<int> grown;
      for (int i = 0; i < m; ++i) {
        grown.push_back(cyc[i]);
        if (edge_mid[ces[i].edge] >= 0) grown.push_back(edge_mid[ces[i].edge]);
      }
      new_cells.push_back(std::move(grown));
      continue;
    }
    const int bary = static_cast<int>(verts.size());
    verts.push_back(mesh.polygon(c).centroid());
    for (int i = 0; i < m; ++i) {
      const int prev = (i + m - 1) % m;
      const std::vector<int> child = {cyc[i], edge_mid[ces[i].edge], bary,
                                      edge_mid[ces[prev].edge]};
      std::vector<Vec2> pts = {verts[child[0]], verts[child[1]], verts[child[2]],
                               verts[child[3]]};
      try {
        Polygon probe(pts);
      } catch (const Error &e) {
        throw RefinementGeometryError("cell " + std::to_string(c) + " child " +
                                      std::to_string(i) + ": " + e.what());
      }
      new_cells.push_back(child);
    }
  }

  PolyMesh::EdgeLabelMap labels;
  for (int eid = 0; eid < mesh.num_edges(); ++eid) {
    const auto &e = mesh.edge(eid);
    if (!e.boundary()) continue;
    const int mid = edge_mid[eid];
    if (mid < 0) {
      labels[{e.v0, e.v1}] = e.label;
    } else {
      labels[{std::min(e.v0, mid), std::max(e.v0, mid)}] = e.label;
      labels[{std::min(e.v1, mid), std::max(e.v1, mid)}] = e.label;
    }
  }
  try {
    return PolyMesh::build(std::move(verts), std::move(new_cells), labels);
  } catch (const Error &e) {
    throw RefinementGeometryError(std::string("refined mesh invalid: ") + e.what());
  }
}

std::string write_mesh(const PolyMesh &mesh) {
  std::ostringstream os;
  os << "polymesh 1\n";
  char buf[80];
  for (const Vec2 &v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x(), v.y());
    os << buf;
  }
  for (const auto &cyc : mesh.cells()) {
    os << 'c';
    for (int idx : cyc) os << ' ' << idx;
    os << '\n';
  }
  for (const auto &e : mesh.edges()) {
    if (!e.boundary()) continue;
    os << "b " << e.v0 << ' ' << e.v1 << ' '
       << (e.label == BoundaryLabel::Dirichlet ? 'D' : 'N') << '\n';
  }
  return os.str();
}

void write_mesh_file(const PolyMesh &mesh, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << write_mesh(mesh);
}

PolyMesh read_mesh(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;

  auto fail = [&](const std::string &msg) -> ParseError {
    return ParseError("line " + std::to_string(lineno) + ": " + msg);
  };

  if (!std::getline(is, line)) throw ParseError("empty mesh file");
  lineno = 1;
  {
    std::istringstream ls(line);
    std::string word;
    int version = 0;
    if (!(ls >> word >> version) || word != "polymesh" || version != 1)
      throw fail("expected header 'polymesh 1'");
  }

  std::vector<Vec2> verts;
  std::vector<std::vector<int>> cells;
  PolyMesh::EdgeLabelMap labels;

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue; // blank line
    if (tag == "v") {
      double x, y;
      if (!(ls >> x >> y)) throw fail("vertex line needs two coordinates");
      verts.emplace_back(x, y);
    } else if (tag == "c") {
      std::vector<int> cyc;
      int idx;
      while (ls >> idx) {
        if (idx < 0 || idx >= static_cast<int>(verts.size()))
          throw fail("cell references vertex " + std::to_string(idx) + " of " +
                     std::to_string(verts.size()));
        cyc.push_back(idx);
      }
      if (!ls.eof()) throw fail("malformed cell index");
      if (cyc.size() < 3) throw fail("cell needs at least 3 vertices");
      cells.push_back(std::move(cyc));
    } else if (tag == "b") {
      int i, j;
      std::string lab;
      if (!(ls >> i >> j >> lab)) throw fail("boundary line needs 'b i j D|N'");
      if (i < 0 || j < 0 || i >= static_cast<int>(verts.size()) ||
          j >= static_cast<int>(verts.size()))
        throw fail("boundary line references a missing vertex");
      if (lab != "D" && lab != "N") throw fail("boundary label must be D or N");
      const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
      if (labels.count(key)) throw fail("duplicate boundary record");
      labels[key] = lab == "D" ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
    } else {
      throw fail("unknown directive '" + tag + "'");
    }
  }

  // Boundary records must reference actual boundary edges.
  try {
    PolyMesh mesh = PolyMesh::build(std::move(verts), std::move(cells), labels);
    int boundary_count = 0;
    for (const auto &e : mesh.edges())
      if (e.boundary()) ++boundary_count;
    if (boundary_count != static_cast<int>(labels.size()))
      throw ParseError("boundary records do not match the mesh boundary");
    return mesh;
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(std::string("invalid mesh: ") + e.what());
  }
}

PolyMesh read_mesh_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return read_mesh(os.str());
}

} // namespace mvem
