#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ovem/geometry.hpp"

namespace ovem {

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;  ///< polynomials up to this total degree are integrated exactly

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] double integrate(const std::function<double(const Point&)>& f) const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
[[nodiscard]] const GaussLegendre& gauss_legendre(int n);

[[nodiscard]] QuadratureRule edge_rule(const Point& a, const Point& b, int degree);

/// Collapsed-square (Duffy) Gauss rule on a triangle.
[[nodiscard]] QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree);

/// Fan sub-triangulation from the centroid; falls back to ear clipping when
/// the polygon is not star-shaped with respect to its centroid.
[[nodiscard]] QuadratureRule polygon_rule(const Polygon& loop, int degree);

/// Triangulates a counter-clockwise simple polygon by ear clipping.
[[nodiscard]] std::vector<std::array<int, 3>> ear_clip(const Polygon& loop);

/// Scaled monomials m_a(x) = ((x - x_K) / h_K)^a, |a| <= degree, ordered
/// 1, X, Y, X^2, XY, Y^2, ... with X = (x - x_K)/h_K.
class ScaledMonomialBasis {
 public:
  ScaledMonomialBasis(Point centre, double scale, int degree);

  [[nodiscard]] int size() const { return static_cast<int>(exponents_.size()); }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const Point& centre() const { return centre_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] const std::array<int, 2>& exponent(int i) const { return exponents_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] Eigen::VectorXd values(const Point& x) const;
  /// size() x 2 gradient matrix
  [[nodiscard]] Eigen::MatrixX2d gradients(const Point& x) const;

 private:
  Point centre_;
  double scale_;
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
};

/// Gram matrix of the scaled monomials over the polygon.
[[nodiscard]] Eigen::MatrixXd monomial_moments(const Polygon& loop, const ScaledMonomialBasis& basis);

}  // namespace ovem
