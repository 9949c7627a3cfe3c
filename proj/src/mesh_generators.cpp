#include "ovem/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace ovem {

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::quad: return "quad";
    case MeshFamily::trapezoidal: return "trap";
    case MeshFamily::hexagonal: return "hex";
    case MeshFamily::voronoi: return "voronoi";
    case MeshFamily::lshape_structured: return "lshape5";
    case MeshFamily::lshape_voronoi: return "lshape6";
  }
  return "unknown";
}

MeshFamily parse_mesh_family(const std::string& name) {
  if (name == "quad") return MeshFamily::quad;
  if (name == "trap") return MeshFamily::trapezoidal;
  if (name == "hex") return MeshFamily::hexagonal;
  if (name == "voronoi") return MeshFamily::voronoi;
  if (name == "lshape" || name == "lshape5") return MeshFamily::lshape_structured;
  if (name == "lshape6") return MeshFamily::lshape_voronoi;
  throw std::invalid_argument("unknown mesh family '" + name + "'");
}

bool is_lshape(MeshFamily family) {
  return family == MeshFamily::lshape_structured || family == MeshFamily::lshape_voronoi;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

/// Drops unused vertices and renumbers the cell loops.
PolygonalMesh compact(std::vector<Point> vertices, std::vector<std::vector<int>> cells, int refinement) {
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Point> kept;
  for (auto& loop : cells) {
    for (int& v : loop) {
      auto& r = remap[static_cast<std::size_t>(v)];
      if (r < 0) {
        r = static_cast<int>(kept.size());
        kept.push_back(vertices[static_cast<std::size_t>(v)]);
      }
      v = r;
    }
  }
  return PolygonalMesh(std::move(kept), std::move(cells), {}, refinement);
}

PolygonalMesh grid_mesh(int n, const Rectangle& domain, double shear) {
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      double x = domain.x_min + i * dx;
      if (i > 0 && i < n) x += ((i + j) % 2 == 0 ? 1.0 : -1.0) * shear * dx;
      vertices.emplace_back(i == n ? domain.x_max : x, j == n ? domain.y_max : domain.y_min + j * dy);
    }
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n * n));
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return PolygonalMesh(std::move(vertices), std::move(cells), {}, n);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform bucket grid over a bounding box for nearest-neighbour rings.
class BucketGrid {
 public:
  BucketGrid(std::span<const Point> points, const Rectangle& box) : points_(points), box_(box) {
    const double target = std::sqrt(box.area() / std::max<std::size_t>(points.size(), 1));
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / target)));
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / target)));
    bw_ = box.width() / nx_;
    bh_ = box.height() / ny_;
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [bx, by] = locate(points[i]);
      buckets_[static_cast<std::size_t>(by * nx_ + bx)].push_back(static_cast<int>(i));
    }
  }

  [[nodiscard]] std::pair<int, int> locate(const Point& p) const {
    const int bx = std::clamp(static_cast<int>((p.x() - box_.x_min) / bw_), 0, nx_ - 1);
    const int by = std::clamp(static_cast<int>((p.y() - box_.y_min) / bh_), 0, ny_ - 1);
    return {bx, by};
  }

  /// Calls `visit(index)` for each point in the square ring at Chebyshev
  /// bucket distance `r` around (bx, by). Returns false once the ring lies
  /// entirely outside the grid.
  template <class Visit>
  bool ring(int bx, int by, int r, Visit&& visit) const {
    bool any = false;
    for (int j = by - r; j <= by + r; ++j) {
      if (j < 0 || j >= ny_) continue;
      for (int i = bx - r; i <= bx + r; ++i) {
        if (i < 0 || i >= nx_) continue;
        if (std::max(std::abs(i - bx), std::abs(j - by)) != r) continue;
        any = true;
        for (int k : buckets_[static_cast<std::size_t>(j * nx_ + i)]) visit(k);
      }
    }
    return any || r == 0;
  }

  [[nodiscard]] double min_bucket_size() const { return std::min(bw_, bh_); }

 private:
  std::span<const Point> points_;
  Rectangle box_;
  int nx_ = 1;
  int ny_ = 1;
  double bw_ = 1.0;
  double bh_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

Rectangle bounding_box(const Polygon& poly) {
  Rectangle box{poly[0].x(), poly[0].y(), poly[0].x(), poly[0].y()};
  for (const Point& p : poly) {
    box.x_min = std::min(box.x_min, p.x());
    box.y_min = std::min(box.y_min, p.y());
    box.x_max = std::max(box.x_max, p.x());
    box.y_max = std::max(box.y_max, p.y());
  }
  return box;
}

std::vector<Polygon> voronoi_cells(std::span<const Point> generators, const Polygon& domain, const Rectangle& box,
                                   double tol) {
  BucketGrid grid(generators, box);
  const bool domain_is_box = domain.size() == 4 && is_convex(domain) &&
                             std::abs(signed_area(domain) - box.area()) <= 1e-14 * box.area();
  std::vector<Polygon> cells(generators.size());
  for (std::size_t g = 0; g < generators.size(); ++g) {
    const Point& p = generators[g];
    Polygon cell = box.corners();
    const auto [bx, by] = grid.locate(p);
    for (int r = 0;; ++r) {
      bool inside = grid.ring(bx, by, r, [&](int k) {
        if (static_cast<std::size_t>(k) == g) return;
        const Point& q = generators[static_cast<std::size_t>(k)];
        const Point d = q - p;
        if (d.norm() <= tol) {
          throw GeometryError("coincident Voronoi generators " + std::to_string(g) + " and " + std::to_string(k));
        }
        cell = clip_half_plane(cell, 0.5 * (p + q), d);
      });
      double reach = 0.0;
      for (const Point& v : cell) reach = std::max(reach, (v - p).norm());
      if (!inside || r * grid.min_bucket_size() > 2.0 * reach) break;
    }
    cell = remove_duplicate_vertices(cell, tol);
    if (!domain_is_box && cell.size() >= 3) {
      cell = remove_duplicate_vertices(clip_convex(domain, cell), tol);
    }
    if (cell.size() < 3 || signed_area(cell) <= tol * tol) {
      throw GeometryError("Voronoi cell of generator " + std::to_string(g) + " at (" + std::to_string(p.x()) + ", " +
                          std::to_string(p.y()) + ") is empty after clipping");
    }
    cells[g] = std::move(cell);
  }
  return cells;
}

/// Merges coincident points within `tol` into shared vertex ids.
class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol), cell_(4.0 * tol) {}

  int add(const Point& p) {
    const long long ix = static_cast<long long>(std::floor(p.x() / cell_));
    const long long iy = static_cast<long long>(std::floor(p.y() / cell_));
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = map_.find(key(ix + dx, iy + dy));
        if (it == map_.end()) continue;
        for (int id : it->second) {
          if ((points_[static_cast<std::size_t>(id)] - p).norm() <= tol_) return id;
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    map_[key(ix, iy)].push_back(id);
    return id;
  }

  [[nodiscard]] std::vector<Point> take() { return std::move(points_); }

 private:
  static std::uint64_t key(long long ix, long long iy) {
    return (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(iy);
  }

  double tol_;
  double cell_;
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> map_;
};

double distance_to_boundary(const Point& p, const Polygon& domain) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    d = std::min(d, segment_distance(p, domain[i], domain[(i + 1) % domain.size()]));
  }
  return d;
}

}  // namespace

PolygonalMesh generate_square_grid(int n, const Rectangle& domain) {
  require(n >= 1, "square grid needs N >= 1");
  return grid_mesh(n, domain, 0.0);
}

PolygonalMesh generate_trapezoidal(int n, const Rectangle& domain) {
  require(n >= 2, "trapezoidal mesh needs N >= 2");
  return grid_mesh(n, domain, trapezoid_shear);
}

PolygonalMesh generate_hexagonal(int n, const Rectangle& domain) {
  require(n >= 2, "hexagonal mesh needs N >= 2");
  const double dx = domain.width() / n;
  // Row spacing close to the regular-hexagon value, adjusted to fit the height.
  const int rows = std::max(1, static_cast<int>(std::lround(domain.height() / (dx * std::sqrt(3.0) / 2.0))));
  const double dy = domain.height() / rows;
  std::vector<Point> lattice;
  for (int j = 0; j <= rows; ++j) {
    const double y = j == rows ? domain.y_max : domain.y_min + j * dy;
    if (j % 2 == 0) {
      for (int i = 0; i <= n; ++i) lattice.emplace_back(i == n ? domain.x_max : domain.x_min + i * dx, y);
    } else {
      for (int i = 0; i < n; ++i) lattice.emplace_back(domain.x_min + (i + 0.5) * dx, y);
    }
  }
  return clipped_voronoi(lattice, domain.corners(), 0, n);
}

PolygonalMesh generate_voronoi(int n, const Rectangle& domain, std::uint64_t seed, int lloyd_iters) {
  require(n >= 2, "Voronoi mesh needs N >= 2");
  require(lloyd_iters >= 0, "lloyd_iters must be non-negative");
  // One jittered generator per stratum of an n x n grid.
  std::mt19937_64 rng(seed);
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;
  std::vector<Point> generators;
  generators.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double u = uniform01(rng);
      const double v = uniform01(rng);
      generators.emplace_back(domain.x_min + (i + u) * dx, domain.y_min + (j + v) * dy);
    }
  }
  return clipped_voronoi(generators, domain.corners(), lloyd_iters, n);
}

Polygon lshape_domain() {
  return {Point(-1, 0), Point(0, 0), Point(0, -1), Point(1, -1), Point(1, 1), Point(-1, 1)};
}

PolygonalMesh generate_lshape(int n, LShapeFamily family, std::uint64_t seed, int lloyd_iters) {
  require(n >= 2, "L-shaped mesh needs N >= 2");
  const Rectangle box{-1.0, -1.0, 1.0, 1.0};
  if (family == LShapeFamily::structured) {
    require(n % 2 == 0, "structured L-shaped mesh needs an even N");
    PolygonalMesh square = generate_square_grid(n, box);
    std::vector<std::vector<int>> cells;
    for (int c = 0; c < square.num_cells(); ++c) {
      const Point& x = square.geometry(c).centroid;
      if (x.x() < 0.0 && x.y() < 0.0) continue;
      const auto loop = square.cell(c);
      cells.emplace_back(loop.begin(), loop.end());
    }
    std::vector<Point> vertices(square.vertices().begin(), square.vertices().end());
    return compact(std::move(vertices), std::move(cells), n);
  }
  require(lloyd_iters >= 0, "lloyd_iters must be non-negative");
  std::mt19937_64 rng(seed);
  const double d = 2.0 / n;
  std::vector<Point> generators;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double u = uniform01(rng);
      const double v = uniform01(rng);
      const Point p(-1.0 + (i + u) * d, -1.0 + (j + v) * d);
      if (-1.0 + (i + 0.5) * d < 0.0 && -1.0 + (j + 0.5) * d < 0.0) continue;
      generators.push_back(p);
    }
  }
  return clipped_voronoi(generators, lshape_domain(), lloyd_iters, n);
}

PolygonalMesh clipped_voronoi(std::span<const Point> generators, const Polygon& domain, int lloyd_iters,
                              int refinement) {
  if (generators.size() < 2) throw GeometryError("Voronoi mesh needs at least two generators");
  const Rectangle box = bounding_box(domain);
  const double scale = std::max(box.width(), box.height());
  const double tol = 1e-10 * scale;

  std::vector<Point> sites(generators.begin(), generators.end());
  std::vector<Polygon> cells = voronoi_cells(sites, domain, box, tol);
  for (int it = 0; it < lloyd_iters; ++it) {
    for (std::size_t g = 0; g < sites.size(); ++g) sites[g] = centroid(cells[g]);
    cells = voronoi_cells(sites, domain, box, tol);
  }

  VertexPool pool(1e-9 * scale);
  std::vector<std::vector<int>> loops;
  loops.reserve(cells.size());
  for (std::size_t g = 0; g < cells.size(); ++g) {
    std::vector<int> loop;
    for (const Point& p : cells[g]) {
      const int id = pool.add(p);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    std::vector<int> sorted = loop;
    std::sort(sorted.begin(), sorted.end());
    if (loop.size() < 3 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw GeometryError("degenerate Voronoi cell for generator " + std::to_string(g) +
                          " (collapsed or self-touching after vertex merge); try another seed");
    }
    loops.push_back(std::move(loop));
  }

  PolygonalMesh mesh(pool.take(), std::move(loops), {}, refinement);
  for (const Edge& e : mesh.edges()) {
    if (e.on_boundary() && distance_to_boundary(e.midpoint, domain) > 1e-8 * scale) {
      throw GeometryError("Voronoi mesh is not conforming: boundary edge inside the domain near (" +
                          std::to_string(e.midpoint.x()) + ", " + std::to_string(e.midpoint.y()) + ")");
    }
  }
  return mesh;
}

PolygonalMesh generate_mesh(MeshFamily family, int n, const Rectangle& domain, std::uint64_t seed, int lloyd_iters) {
  switch (family) {
    case MeshFamily::quad: return generate_square_grid(n, domain);
    case MeshFamily::trapezoidal: return generate_trapezoidal(n, domain);
    case MeshFamily::hexagonal: return generate_hexagonal(n, domain);
    case MeshFamily::voronoi: return generate_voronoi(n, domain, seed, lloyd_iters);
    case MeshFamily::lshape_structured: return generate_lshape(n, LShapeFamily::structured, seed, lloyd_iters);
    case MeshFamily::lshape_voronoi: return generate_lshape(n, LShapeFamily::voronoi, seed, lloyd_iters);
  }
  throw std::invalid_argument("unknown mesh family");
}

}  // namespace ovem
