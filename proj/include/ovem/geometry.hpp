#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ovem {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rectangle {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  [[nodiscard]] double width() const { return x_max - x_min; }
  [[nodiscard]] double height() const { return y_max - y_min; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] Polygon corners() const;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Signed area (positive for counter-clockwise loops).
[[nodiscard]] double signed_area(std::span<const Point> loop);
[[nodiscard]] Point centroid(std::span<const Point> loop);
/// Largest vertex-to-vertex distance.
[[nodiscard]] double diameter(std::span<const Point> loop);
[[nodiscard]] bool is_simple(std::span<const Point> loop);
[[nodiscard]] bool is_convex(std::span<const Point> loop, double tol = 1e-12);

/// 2D cross product a x b.
[[nodiscard]] inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Keeps the part of `poly` where (x - origin) . normal <= 0. `poly` may be
/// non-convex; the half-plane is convex so the result is a single loop.
[[nodiscard]] Polygon clip_half_plane(const Polygon& poly, const Point& origin, const Point& normal);

/// Sutherland-Hodgman clip of an arbitrary simple `subject` against a convex
/// counter-clockwise `clipper`.
[[nodiscard]] Polygon clip_convex(const Polygon& subject, const Polygon& clipper);

/// Drops consecutive vertices closer than `tol` (cyclically).
[[nodiscard]] Polygon remove_duplicate_vertices(const Polygon& poly, double tol);

/// Distance from `p` to the segment [a, b].
[[nodiscard]] double segment_distance(const Point& p, const Point& a, const Point& b);

}  // namespace ovem
