#pragma once

#include <vector>

#include "ovem/mesh.hpp"

namespace ovem {

/// Shape-regularity measures, computed per cell.
struct RegularityReport {
  std::vector<double> edge_ratio;    ///< min_e |e| / h_K
  std::vector<double> star_ratio;    ///< rho_K / h_K, rho_K = largest ball inside the kernel
  std::vector<int> flagged;          ///< cells with either ratio below the threshold
  double sigma = 0.0;                ///< min over cells of both ratios
  double threshold = 0.0;

  [[nodiscard]] double min_edge_ratio() const;
  [[nodiscard]] double min_star_ratio() const;
};

/// Radius of the largest disc contained in the kernel of a counter-clockwise
/// simple polygon (0 if the kernel is empty or degenerate).
[[nodiscard]] double kernel_inradius(const Polygon& loop);

[[nodiscard]] RegularityReport check_regularity(const PolygonalMesh& mesh, double sigma_threshold = 0.0);

}  // namespace ovem
