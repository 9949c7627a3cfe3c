#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "ovem/mesh.hpp"

namespace ovem {

/// Horizontal shift of interior grid vertices in the trapezoidal family, as a
/// fraction of the cell pitch. The sign alternates in a checkerboard pattern,
/// so every cell is a trapezoid with parallel top and bottom sides of lengths
/// (1 -/+ 2 * shear) * pitch in the interior.
inline constexpr double trapezoid_shear = 0.3;

/// Default number of Lloyd sweeps for the Voronoi families.
inline constexpr int default_lloyd_iterations = 3;

enum class MeshFamily {
  quad,         ///< uniform squares
  trapezoidal,  ///< sheared squares
  hexagonal,    ///< clipped Voronoi of a staggered lattice
  voronoi,      ///< clipped centroidal-relaxed random Voronoi
  lshape_structured,
  lshape_voronoi,
};

[[nodiscard]] std::string to_string(MeshFamily family);
/// Accepts quad, trap, hex, voronoi, lshape (= lshape5), lshape5, lshape6.
[[nodiscard]] MeshFamily parse_mesh_family(const std::string& name);
[[nodiscard]] bool is_lshape(MeshFamily family);

[[nodiscard]] PolygonalMesh generate_square_grid(int n, const Rectangle& domain);
[[nodiscard]] PolygonalMesh generate_trapezoidal(int n, const Rectangle& domain);
[[nodiscard]] PolygonalMesh generate_hexagonal(int n, const Rectangle& domain);
[[nodiscard]] PolygonalMesh generate_voronoi(int n, const Rectangle& domain, std::uint64_t seed,
                                             int lloyd_iters = default_lloyd_iterations);

enum class LShapeFamily { structured, voronoi };

/// (-1,1)^2 minus [-1,0]^2, counter-clockwise.
[[nodiscard]] Polygon lshape_domain();
/// Structured meshes need an even `n` so the re-entrant corner is a grid vertex.
[[nodiscard]] PolygonalMesh generate_lshape(int n, LShapeFamily family, std::uint64_t seed = 1,
                                            int lloyd_iters = default_lloyd_iterations);

/// Voronoi diagram of `generators` clipped to the simple polygon `domain`,
/// after `lloyd_iters` centroidal relaxation sweeps. Shared vertices are
/// merged so the result is conforming.
[[nodiscard]] PolygonalMesh clipped_voronoi(std::span<const Point> generators, const Polygon& domain,
                                            int lloyd_iters, int refinement);

/// Dispatch used by the harness and the CLI. `domain` is ignored for the
/// L-shaped families.
[[nodiscard]] PolygonalMesh generate_mesh(MeshFamily family, int n, const Rectangle& domain, std::uint64_t seed = 1,
                                          int lloyd_iters = default_lloyd_iterations);

}  // namespace ovem
