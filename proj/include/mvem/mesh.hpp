#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mvem/geometry.hpp"

namespace mvem {

enum class BoundaryLabel { Interior, Dirichlet, Neumann };

/// Conforming polygonal mesh. Cells are CCW vertex cycles; hanging nodes are
/// represented as collinear vertices in the cycles of both incident cells, so
/// every interior edge has exactly two incident cells.
class PolyMesh {
public:
  struct Edge {
    int v0 = -1, v1 = -1; // v0 < v1; global direction is v0 -> v1
    std::array<int, 2> cells = {-1, -1};
    BoundaryLabel label = BoundaryLabel::Interior;
    bool boundary() const { return cells[1] < 0; }
  };

  /// Edge as seen from a cell cycle: sign +1 when the cycle traverses the
  /// edge in the global direction v0 -> v1.
  struct CellEdge {
    int edge = -1;
    int sign = +1;
  };

  using Labeler = std::function<BoundaryLabel(const Vec2 &midpoint)>;
  using EdgeLabelMap = std::map<std::pair<int, int>, BoundaryLabel>;

  /// Build and validate. The labeler is evaluated at boundary edge midpoints
  /// and must return Dirichlet or Neumann for every boundary edge.
  static PolyMesh build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                        const Labeler &labeler);

  /// Build with labels keyed by unordered vertex index pairs.
  static PolyMesh build(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                        const EdgeLabelMap &labels);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2 &vertex(int i) const { return vertices_[i]; }
  const std::vector<Vec2> &vertices() const { return vertices_; }
  const std::vector<int> &cell(int c) const { return cells_[c]; }
  const std::vector<std::vector<int>> &cells() const { return cells_; }
  const Edge &edge(int e) const { return edges_[e]; }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<CellEdge> &cell_edges(int c) const { return cell_edges_[c]; }

  const Polygon &polygon(int c) const { return polygons_[c]; }
  double cell_area(int c) const { return polygons_[c].area(); }
  double total_area() const { return total_area_; }
  double max_diameter() const;

  /// Same mesh with boundary labels reassigned.
  PolyMesh with_labels(const Labeler &labeler) const;

private:
  PolyMesh() = default;
  void finalize(); // derive edges, validate everything except labels
  void validate_labels() const;

  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<CellEdge>> cell_edges_;
  std::vector<Polygon> polygons_;
  double total_area_ = 0.0;
};

/// Sorted unique cell indices selected for refinement.
using MarkSet = std::vector<int>;

/// Honeycomb cover of the unit square with n columns, clipped at the
/// boundary. Interior cells are hexagons, boundary cells quads or pentagons.
/// All boundary edges are labeled Dirichlet.
PolyMesh generate_hex_mesh(int n);

/// n x n tensor grid on the unit square with the smooth map
/// (x, y) -> (x, y) + 0.08 (1/n) sin(2 pi x) sin(2 pi y) (1, 1)
/// applied to interior vertices. All boundary edges Dirichlet.
PolyMesh generate_distorted_quad_mesh(int n);

/// Uniform quad mesh of (-1,1)^2 minus the closed quadrant [0,1]^2, n even
/// cells across the full width. Boundary edges on {x = -1} and {y = -1} are
/// Neumann, all others Dirichlet.
PolyMesh generate_lshape_mesh(int n);

/// Midpoint plus barycenter refinement of marked cells. A marked cell with v
/// vertices becomes v quads around its centroid; unmarked neighbors absorb
/// split-edge midpoints as collinear vertices. Boundary labels are inherited.
PolyMesh refine(const PolyMesh &mesh, const MarkSet &marked);

/// Plain-text serialization:
///   polymesh 1
///   v x y
///   c i0 i1 ... ik
///   b i j D|N
std::string write_mesh(const PolyMesh &mesh);
void write_mesh_file(const PolyMesh &mesh, const std::string &path);

/// Parse and validate; throws ParseError with line diagnostics.
PolyMesh read_mesh(const std::string &text);
PolyMesh read_mesh_file(const std::string &path);

} // namespace mvem
