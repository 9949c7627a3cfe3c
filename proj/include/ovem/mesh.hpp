#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ovem/geometry.hpp"

namespace ovem {

enum class BoundaryKind { dirichlet, neumann };

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mesh edge. Vertices are stored in the counter-clockwise order of the
/// `left` cell, so `normal` is the outward normal of `left` and, for interior
/// edges, points from `left` (K+) into `right` (K-). On the boundary it points
/// out of the domain. normal = (t_y, -t_x).
struct Edge {
  std::array<int, 2> vertices{};
  int left = -1;
  int right = -1;  // -1 on the boundary
  Point tangent = Point::Zero();
  Point normal = Point::Zero();
  Point midpoint = Point::Zero();
  double length = 0.0;
  BoundaryKind boundary = BoundaryKind::dirichlet;  // meaningful only when right < 0

  [[nodiscard]] bool on_boundary() const { return right < 0; }
};

struct CellGeometry {
  double area = 0.0;
  Point centroid = Point::Zero();
  double diameter = 0.0;
};

/// Local view of one cell edge: the global edge id and +1 when the cell is the
/// edge's left cell (stored normal is outward), -1 otherwise.
struct CellEdge {
  int edge = -1;
  int sign = 1;
};

/// Immutable polygonal mesh with full edge topology.
class PolygonalMesh {
 public:
  using EdgeKey = std::pair<int, int>;

  PolygonalMesh() = default;

  /// Builds the edge topology and validates the cells. Clockwise loops are
  /// reversed. Boundary edges listed in `neumann_edges` (unordered vertex
  /// pairs) are tagged Neumann; all others Dirichlet.
  PolygonalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                const std::vector<EdgeKey>& neumann_edges = {}, int refinement = 0);

  [[nodiscard]] std::span<const Point> vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<std::vector<int>>& cells() const { return cells_; }
  [[nodiscard]] std::span<const int> cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  [[nodiscard]] std::span<const CellEdge> cell_edges(int c) const { return cell_edges_[static_cast<std::size_t>(c)]; }
  [[nodiscard]] const CellGeometry& geometry(int c) const { return geometry_[static_cast<std::size_t>(c)]; }
  [[nodiscard]] Polygon cell_polygon(int c) const;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int num_boundary_edges() const;
  [[nodiscard]] int refinement() const { return refinement_; }

  /// max_K h_K
  [[nodiscard]] double mesh_size() const;
  [[nodiscard]] double total_area() const;

  [[nodiscard]] std::vector<EdgeKey> neumann_edges() const;

  /// Copy of this mesh whose boundary edges satisfying `is_neumann(edge)` are
  /// tagged Neumann (all other boundary edges become Dirichlet).
  [[nodiscard]] PolygonalMesh with_neumann(const std::function<bool(const Edge&)>& is_neumann) const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<CellEdge>> cell_edges_;
  std::vector<CellGeometry> geometry_;
  int refinement_ = 0;
};

}  // namespace ovem
