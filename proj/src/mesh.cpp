#include "ovem/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ovem {

namespace {

PolygonalMesh::EdgeKey make_key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

}  // namespace

PolygonalMesh::PolygonalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                             const std::vector<EdgeKey>& neumann_edges, int refinement)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), refinement_(refinement) {
  const int nv = num_vertices();
  geometry_.reserve(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& loop = cells_[c];
    if (loop.size() < 3) {
      throw TopologyError("cell " + std::to_string(c) + " has fewer than 3 vertices");
    }
    for (int v : loop) {
      if (v < 0 || v >= nv) {
        throw TopologyError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) + " of " +
                            std::to_string(nv));
      }
    }
    Polygon poly;
    poly.reserve(loop.size());
    for (int v : loop) poly.push_back(vertices_[static_cast<std::size_t>(v)]);
    if (!is_simple(poly)) {
      throw TopologyError("cell " + std::to_string(c) + " is not a simple polygon");
    }
    double area = signed_area(poly);
    if (area < 0.0) {
      std::reverse(loop.begin(), loop.end());
      std::reverse(poly.begin(), poly.end());
      area = -area;
    }
    if (!(area > 0.0)) {
      throw TopologyError("cell " + std::to_string(c) + " has zero area");
    }
    geometry_.push_back(CellGeometry{area, ovem::centroid(poly), ovem::diameter(poly)});
  }

  std::map<EdgeKey, int> edge_of;
  cell_edges_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& loop = cells_[c];
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const EdgeKey key = make_key(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.vertices = {a, b};
        e.left = static_cast<int>(c);
        const Point d = vertices_[static_cast<std::size_t>(b)] - vertices_[static_cast<std::size_t>(a)];
        e.length = d.norm();
        e.tangent = d / e.length;
        e.normal = Point(e.tangent.y(), -e.tangent.x());
        e.midpoint = 0.5 * (vertices_[static_cast<std::size_t>(a)] + vertices_[static_cast<std::size_t>(b)]);
        edge_of.emplace(key, static_cast<int>(edges_.size()));
        cell_edges_[c].push_back({static_cast<int>(edges_.size()), 1});
        edges_.push_back(e);
      } else {
        Edge& e = edges_[static_cast<std::size_t>(it->second)];
        if (e.right >= 0) {
          throw TopologyError("non-manifold edge (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") shared by three or more cells");
        }
        if (e.vertices[0] != b || e.vertices[1] != a) {
          throw TopologyError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                              ") traversed in the same direction by two cells");
        }
        e.right = static_cast<int>(c);
        cell_edges_[c].push_back({it->second, -1});
      }
    }
  }

  std::set<EdgeKey> neumann;
  for (const auto& [a, b] : neumann_edges) neumann.insert(make_key(a, b));
  for (const auto& key : neumann) {
    auto it = edge_of.find(key);
    if (it == edge_of.end() || !edges_[static_cast<std::size_t>(it->second)].on_boundary()) {
      throw TopologyError("Neumann tag on (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                          ") which is not a boundary edge");
    }
    edges_[static_cast<std::size_t>(it->second)].boundary = BoundaryKind::neumann;
  }
}

Polygon PolygonalMesh::cell_polygon(int c) const {
  Polygon poly;
  for (int v : cell(c)) poly.push_back(vertices_[static_cast<std::size_t>(v)]);
  return poly;
}

int PolygonalMesh::num_boundary_edges() const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.on_boundary(); }));
}

double PolygonalMesh::mesh_size() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

double PolygonalMesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

std::vector<PolygonalMesh::EdgeKey> PolygonalMesh::neumann_edges() const {
  std::vector<EdgeKey> out;
  for (const auto& e : edges_) {
    if (e.on_boundary() && e.boundary == BoundaryKind::neumann) out.emplace_back(e.vertices[0], e.vertices[1]);
  }
  return out;
}

PolygonalMesh PolygonalMesh::with_neumann(const std::function<bool(const Edge&)>& is_neumann) const {
  std::vector<EdgeKey> tags;
  for (const auto& e : edges_) {
    if (e.on_boundary() && is_neumann(e)) tags.emplace_back(e.vertices[0], e.vertices[1]);
  }
  return PolygonalMesh(vertices_, cells_, tags, refinement_);
}

}  // namespace ovem
