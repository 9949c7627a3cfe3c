#include "ovem/regularity.hpp"

#include <algorithm>
#include <limits>

namespace ovem {

double RegularityReport::min_edge_ratio() const {
  return edge_ratio.empty() ? 0.0 : *std::min_element(edge_ratio.begin(), edge_ratio.end());
}

double RegularityReport::min_star_ratio() const {
  return star_ratio.empty() ? 0.0 : *std::min_element(star_ratio.begin(), star_ratio.end());
}

double kernel_inradius(const Polygon& loop) {
  // The kernel is the intersection of the inner half-planes of all edges:
  //   n_i . x <= c_i. The largest inscribed disc (Chebyshev centre) is an
  // LP optimum, attained where three constraints are active; enumerate them.
  const std::size_t n = loop.size();
  std::vector<Point> normals(n);
  std::vector<double> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point t = loop[(i + 1) % n] - loop[i];
    normals[i] = Point(t.y(), -t.x()).normalized();
    offsets[i] = normals[i].dot(loop[i]);
  }
  const double scale = diameter(loop);
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        Eigen::Matrix3d m;
        Eigen::Vector3d rhs;
        const std::size_t idx[3] = {a, b, c};
        for (int r = 0; r < 3; ++r) {
          m.row(r) << normals[idx[r]].x(), normals[idx[r]].y(), 1.0;
          rhs(r) = offsets[idx[r]];
        }
        const auto lu = m.fullPivLu();
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d sol = lu.solve(rhs);
        const double r = sol(2);
        if (r <= best) continue;
        const Point centre(sol(0), sol(1));
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
          feasible = normals[i].dot(centre) + r <= offsets[i] + 1e-12 * scale;
        }
        if (feasible) best = r;
      }
    }
  }
  return best;
}

RegularityReport check_regularity(const PolygonalMesh& mesh, double sigma_threshold) {
  RegularityReport report;
  report.threshold = sigma_threshold;
  report.sigma = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double h = mesh.geometry(c).diameter;
    double shortest = std::numeric_limits<double>::infinity();
    for (const CellEdge& ce : mesh.cell_edges(c)) shortest = std::min(shortest, mesh.edge(ce.edge).length);
    const double m1 = shortest / h;
    const double m2 = kernel_inradius(mesh.cell_polygon(c)) / h;
    report.edge_ratio.push_back(m1);
    report.star_ratio.push_back(m2);
    report.sigma = std::min({report.sigma, m1, m2});
    if (m1 < sigma_threshold || m2 < sigma_threshold) report.flagged.push_back(c);
  }
  if (mesh.num_cells() == 0) report.sigma = 0.0;
  return report;
}

}  // namespace ovem
