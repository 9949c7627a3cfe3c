#include "ovem/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ovem {

Polygon Rectangle::corners() const {
  return {Point(x_min, y_min), Point(x_max, y_min), Point(x_max, y_max), Point(x_min, y_max)};
}

double signed_area(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(loop[i], loop[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Point centroid(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  // Shift to the first vertex to limit cancellation on small cells far from the origin.
  const Point o = loop[0];
  double a2 = 0.0;
  Point c = Point::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = loop[i] - o;
    const Point q = loop[(i + 1) % n] - o;
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  if (a2 == 0.0) {
    throw GeometryError("centroid of a zero-area polygon");
  }
  return o + c / (3.0 * a2);
}

double diameter(std::span<const Point> loop) {
  double d = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    for (std::size_t j = i + 1; j < loop.size(); ++j) {
      d = std::max(d, (loop[i] - loop[j]).norm());
    }
  }
  return d;
}

namespace {

int orientation(const Point& a, const Point& b, const Point& c) {
  const double v = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool is_simple(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((loop[i] - loop[j]).norm() == 0.0) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, loop[j], loop[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool is_convex(std::span<const Point> loop, double tol) {
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = loop[(i + 1) % n] - loop[i];
    const Point e2 = loop[(i + 2) % n] - loop[(i + 1) % n];
    if (cross(e1, e2) < -tol * e1.norm() * e2.norm()) return false;
  }
  return true;
}

Polygon clip_half_plane(const Polygon& poly, const Point& origin, const Point& normal) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const double dp = (p - origin).dot(normal);
    const double dq = (q - origin).dot(normal);
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clipper) {
  Polygon out = subject;
  const std::size_t n = clipper.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    const Point& a = clipper[i];
    const Point& b = clipper[(i + 1) % n];
    const Point t = b - a;
    // outward normal of a counter-clockwise edge
    const Point normal(t.y(), -t.x());
    out = clip_half_plane(out, a, normal);
  }
  return out;
}

Polygon remove_duplicate_vertices(const Polygon& poly, double tol) {
  Polygon out;
  out.reserve(poly.size());
  for (const Point& p : poly) {
    if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  return out;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace ovem
