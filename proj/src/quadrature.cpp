#include "ovem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ovem {

double QuadratureRule::integrate(const std::function<double(const Point&)>& f) const {
  double sum = 0.0;
  for (std::size_t q = 0; q < points.size(); ++q) sum += weights[q] * f(points[q]);
  return sum;
}

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one point");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

QuadratureRule edge_rule(const Point& a, const Point& b, int degree) {
  const int n = std::max(1, degree / 2 + 1);
  const auto& gl = gauss_legendre(n);
  const double half = 0.5 * (b - a).norm();
  QuadratureRule rule;
  rule.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (1.0 + gl.nodes[static_cast<std::size_t>(i)]);
    rule.points.push_back(a + t * (b - a));
    rule.weights.push_back(half * gl.weights[static_cast<std::size_t>(i)]);
  }
  return rule;
}

namespace {

void append_triangle(QuadratureRule& rule, const Point& a, const Point& b, const Point& c, int degree) {
  // (u, v) in [0,1]^2 -> a + u (b - a) + u v (c - b); Jacobian 2|T| u, so the
  // u-integrand has one degree more than the v-integrand.
  const int nu = std::max(1, (degree + 1) / 2 + 1);
  const int nv = std::max(1, degree / 2 + 1);
  const auto& glu = gauss_legendre(nu);
  const auto& glv = gauss_legendre(nv);
  const double twice_area = cross(b - a, c - a);
  for (int i = 0; i < nu; ++i) {
    const double u = 0.5 * (1.0 + glu.nodes[static_cast<std::size_t>(i)]);
    const double wu = 0.5 * glu.weights[static_cast<std::size_t>(i)];
    for (int j = 0; j < nv; ++j) {
      const double v = 0.5 * (1.0 + glv.nodes[static_cast<std::size_t>(j)]);
      const double wv = 0.5 * glv.weights[static_cast<std::size_t>(j)];
      rule.points.push_back(a + u * (b - a) + u * v * (c - b));
      rule.weights.push_back(twice_area * u * wu * wv);
    }
  }
}

}  // namespace

QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  append_triangle(rule, a, b, c, degree);
  return rule;
}

std::vector<std::array<int, 3>> ear_clip(const Polygon& loop) {
  std::vector<int> idx(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  const double scale = diameter(loop);
  auto inside = [&](const Point& p, const Point& a, const Point& b, const Point& c) {
    return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
  };
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    const std::size_t m = idx.size();
    for (std::size_t i = 0; i < m; ++i) {
      const int ia = idx[(i + m - 1) % m];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % m];
      const Point& a = loop[static_cast<std::size_t>(ia)];
      const Point& b = loop[static_cast<std::size_t>(ib)];
      const Point& c = loop[static_cast<std::size_t>(ic)];
      if (cross(b - a, c - b) <= 1e-14 * scale * scale) continue;
      bool ear = true;
      for (int k : idx) {
        if (k == ia || k == ib || k == ic) continue;
        if (inside(loop[static_cast<std::size_t>(k)], a, b, c)) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > loop.size() * loop.size()) {
      throw GeometryError("ear clipping failed: polygon is not simple or not counter-clockwise");
    }
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

QuadratureRule polygon_rule(const Polygon& loop, int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  const Point c = centroid(loop);
  const std::size_t n = loop.size();
  const double area = signed_area(loop);
  bool star = true;
  for (std::size_t i = 0; i < n && star; ++i) {
    star = cross(loop[i] - c, loop[(i + 1) % n] - c) > 1e-14 * area;
  }
  if (star) {
    for (std::size_t i = 0; i < n; ++i) append_triangle(rule, c, loop[i], loop[(i + 1) % n], degree);
  } else {
    for (const auto& t : ear_clip(loop)) {
      append_triangle(rule, loop[static_cast<std::size_t>(t[0])], loop[static_cast<std::size_t>(t[1])],
                      loop[static_cast<std::size_t>(t[2])], degree);
    }
  }
  return rule;
}

ScaledMonomialBasis::ScaledMonomialBasis(Point centre, double scale, int degree)
    : centre_(std::move(centre)), scale_(scale), degree_(degree) {
  for (int d = 0; d <= degree; ++d) {
    for (int j = 0; j <= d; ++j) exponents_.push_back({d - j, j});
  }
}

Eigen::VectorXd ScaledMonomialBasis::values(const Point& x) const {
  const Point s = (x - centre_) / scale_;
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) {
    const auto& e = exponents_[static_cast<std::size_t>(i)];
    v(i) = std::pow(s.x(), e[0]) * std::pow(s.y(), e[1]);
  }
  return v;
}

Eigen::MatrixX2d ScaledMonomialBasis::gradients(const Point& x) const {
  const Point s = (x - centre_) / scale_;
  Eigen::MatrixX2d g(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto& e = exponents_[static_cast<std::size_t>(i)];
    g(i, 0) = e[0] == 0 ? 0.0 : e[0] * std::pow(s.x(), e[0] - 1) * std::pow(s.y(), e[1]) / scale_;
    g(i, 1) = e[1] == 0 ? 0.0 : e[1] * std::pow(s.x(), e[0]) * std::pow(s.y(), e[1] - 1) / scale_;
  }
  return g;
}

Eigen::MatrixXd monomial_moments(const Polygon& loop, const ScaledMonomialBasis& basis) {
  const QuadratureRule rule = polygon_rule(loop, 2 * basis.degree());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd m = basis.values(rule.points[q]);
    gram.noalias() += rule.weights[q] * m * m.transpose();
  }
  // exact symmetry
  return 0.5 * (gram + gram.transpose());
}

}  // namespace ovem
