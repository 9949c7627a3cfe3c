#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>

#include "ovem/mesh_generators.hpp"
#include "ovem/mesh_io.hpp"
#include "ovem/regularity.hpp"
#include "test_support.hpp"

using namespace ovem;

namespace {

const Rectangle minus_one_one{-1.0, -1.0, 1.0, 1.0};
const Rectangle unit{0.0, 0.0, 1.0, 1.0};

void expect_topology(const PolygonalMesh& m) {
  std::vector<int> uses(static_cast<std::size_t>(m.num_edges()), 0);
  for (int c = 0; c < m.num_cells(); ++c) {
    for (const CellEdge& ce : m.cell_edges(c)) ++uses[static_cast<std::size_t>(ce.edge)];
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    EXPECT_EQ(uses[static_cast<std::size_t>(e)], m.edge(e).on_boundary() ? 1 : 2);
  }
}

// Crossing-number point-in-polygon test.
bool contains(const Polygon& p, const Point& x) {
  bool in = false;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    if ((p[i].y() > x.y()) != (p[j].y() > x.y()) &&
        x.x() < (p[j].x() - p[i].x()) * (x.y() - p[i].y()) / (p[j].y() - p[i].y()) + p[i].x()) {
      in = !in;
    }
  }
  return in;
}

void expect_orientation(const PolygonalMesh& m) {
  const auto verts = m.vertices();
  for (const Edge& e : m.edges()) {
    EXPECT_NEAR(e.normal.dot(e.tangent), 0.0, 1e-14);
    EXPECT_NEAR(e.normal.norm(), 1.0, 1e-14);
    EXPECT_NEAR(e.tangent.norm(), 1.0, 1e-14);
    EXPECT_NEAR(e.normal.x(), e.tangent.y(), 1e-15);
    EXPECT_NEAR(e.normal.y(), -e.tangent.x(), 1e-15);
    // outward for the left cell: a point just behind the midpoint lies inside it
    const Point inner = e.midpoint - 1e-6 * e.length * e.normal;
    EXPECT_TRUE(contains(m.cell_polygon(e.left), inner));
    if (!e.on_boundary()) EXPECT_TRUE(contains(m.cell_polygon(e.right), e.midpoint + 1e-6 * e.length * e.normal));
    const Point t = verts[static_cast<std::size_t>(e.vertices[1])] - verts[static_cast<std::size_t>(e.vertices[0])];
    EXPECT_NEAR((t / t.norm() - e.tangent).norm(), 0.0, 1e-14);
  }
  for (int c = 0; c < m.num_cells(); ++c) {
    const Polygon p = m.cell_polygon(c);
    EXPECT_GT(signed_area(p), 0.0);
    EXPECT_TRUE(is_simple(p));
  }
}

double area_sum(const PolygonalMesh& m) {
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) s += m.geometry(c).area;
  return s;
}

}  // namespace

TEST(SquareGrid, CountsOnTwoByTwo) {
  const PolygonalMesh m = generate_square_grid(2, minus_one_one);
  EXPECT_EQ(m.num_cells(), 4);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_EQ(m.num_edges(), 12);
  EXPECT_EQ(m.num_boundary_edges(), 8);
}

TEST(SquareGrid, SingleUnitCell) {
  const PolygonalMesh m = generate_square_grid(1, unit);
  ASSERT_EQ(m.num_cells(), 1);
  EXPECT_NEAR(m.geometry(0).area, 1.0, 1e-15);
  EXPECT_NEAR(m.geometry(0).diameter, std::numbers::sqrt2, 1e-15);
}

TEST(SquareGrid, EdgeRatioIsInverseSqrtTwo) {
  const RegularityReport r = check_regularity(generate_square_grid(16, minus_one_one));
  for (double v : r.edge_ratio) EXPECT_NEAR(v, 1.0 / std::numbers::sqrt2, 1e-13);
}

TEST(SquareGrid, RejectsZero) { EXPECT_THROW((void)generate_square_grid(0, unit), std::invalid_argument); }

TEST(Trapezoidal, TwoByTwoConvexPartition) {
  const PolygonalMesh m = generate_trapezoidal(2, unit);
  EXPECT_EQ(m.num_cells(), 4);
  for (int c = 0; c < 4; ++c) EXPECT_TRUE(is_convex(m.cell_polygon(c)));
  EXPECT_NEAR(area_sum(m), 1.0, 1e-14);
}

TEST(Trapezoidal, EdgeRatioIsScaleInvariant) {
  const double r8 = check_regularity(generate_trapezoidal(8, unit)).min_edge_ratio();
  const double r16 = check_regularity(generate_trapezoidal(16, unit)).min_edge_ratio();
  EXPECT_NEAR(r8, r16, 1e-12);
  EXPECT_GT(r8, 0.1);
}

TEST(Trapezoidal, InteriorEdgesSharedTwice) {
  for (int n : {2, 5, 8}) expect_topology(generate_trapezoidal(n, unit));
}

TEST(Trapezoidal, RejectsOne) { EXPECT_THROW((void)generate_trapezoidal(1, unit), std::invalid_argument); }

TEST(Hexagonal, InteriorCellsAreConvexHexagons) {
  const PolygonalMesh m = generate_hexagonal(4, minus_one_one);
  int interior = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    bool touches = false;
    for (const CellEdge& ce : m.cell_edges(c)) touches = touches || m.edge(ce.edge).on_boundary();
    if (touches) continue;
    ++interior;
    EXPECT_EQ(m.cell(c).size(), 6u);
    EXPECT_TRUE(is_convex(m.cell_polygon(c)));
  }
  EXPECT_GT(interior, 0);
  EXPECT_NEAR(area_sum(m), 4.0, 1e-12);
}

TEST(Hexagonal, StarRatioAboveFifth) {
  const RegularityReport r = check_regularity(generate_hexagonal(4, minus_one_one));
  for (double v : r.star_ratio) EXPECT_GT(v, 0.2);
}

TEST(Hexagonal, CellCountGrowsQuadratically) {
  const double c8 = generate_hexagonal(8, unit).num_cells();
  const double c16 = generate_hexagonal(16, unit).num_cells();
  EXPECT_NEAR(c16 / c8, 4.0, 0.6);
}

TEST(Voronoi, DeterministicForFixedSeed) {
  const PolygonalMesh a = generate_voronoi(6, unit, 11);
  const PolygonalMesh b = generate_voronoi(6, unit, 11);
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  ASSERT_EQ(a.cells(), b.cells());
  for (int v = 0; v < a.num_vertices(); ++v) {
    EXPECT_EQ(a.vertices()[static_cast<std::size_t>(v)], b.vertices()[static_cast<std::size_t>(v)]);
  }
}

TEST(Voronoi, LloydDoesNotWorsenStarRatio) {
  const double r0 = check_regularity(generate_voronoi(8, unit, 5, 0)).min_star_ratio();
  const double r5 = check_regularity(generate_voronoi(8, unit, 5, 5)).min_star_ratio();
  EXPECT_GE(r5, r0);
}

TEST(Voronoi, PartitionsTheDomain) {
  const PolygonalMesh m = generate_voronoi(10, minus_one_one, 3);
  EXPECT_NEAR(area_sum(m), 4.0, 4e-12);
  expect_topology(m);
}

TEST(LShape, StructuredTwoHasThreeCells) {
  const PolygonalMesh m = generate_lshape(2, LShapeFamily::structured);
  EXPECT_EQ(m.num_cells(), 3);
}

TEST(LShape, AreaAndDomain) {
  for (LShapeFamily f : {LShapeFamily::structured, LShapeFamily::voronoi}) {
    const PolygonalMesh m = generate_lshape(8, f, 2);
    EXPECT_NEAR(area_sum(m), 3.0, 3e-12);
    for (const Point& p : m.vertices()) EXPECT_FALSE(p.x() < -1e-12 && p.y() < -1e-12);
    expect_topology(m);
  }
}

TEST(LShape, RejectsOne) { EXPECT_THROW((void)generate_lshape(1, LShapeFamily::structured), std::invalid_argument); }

TEST(Mesh, OrientationAndPartitionForEveryFamily) {
  for (const PolygonalMesh& m : fixtures::all_family_meshes()) {
    expect_orientation(m);
    expect_topology(m);
  }
  for (int n : {3, 7}) {
    EXPECT_NEAR(area_sum(generate_square_grid(n, minus_one_one)), 4.0, 4e-12);
    EXPECT_NEAR(area_sum(generate_trapezoidal(n, minus_one_one)), 4.0, 4e-12);
    EXPECT_NEAR(area_sum(generate_hexagonal(n, minus_one_one)), 4.0, 4e-12);
  }
}

TEST(Mesh, InteriorNormalPointsIntoRightCell) {
  const PolygonalMesh m = generate_voronoi(5, unit, 9);
  for (const Edge& e : m.edges()) {
    if (e.on_boundary()) continue;
    EXPECT_LT((e.midpoint - m.geometry(e.right).centroid).dot(e.normal), 0.0);
  }
}

TEST(Mesh, CellGeometryInvariants) {
  for (const PolygonalMesh& m : fixtures::all_family_meshes()) {
    for (int c = 0; c < m.num_cells(); ++c) {
      const CellGeometry& g = m.geometry(c);
      EXPECT_GT(g.area, 0.0);
      for (const CellEdge& ce : m.cell_edges(c)) EXPECT_LE(m.edge(ce.edge).length, g.diameter + 1e-15);
    }
  }
}

TEST(Mesh, NeumannTagging) {
  const PolygonalMesh m =
      generate_square_grid(4, unit).with_neumann([](const Edge& e) { return e.midpoint.x() > 1.0 - 1e-12; });
  int neumann = 0;
  for (const Edge& e : m.edges()) {
    if (e.on_boundary() && e.boundary == BoundaryKind::neumann) ++neumann;
  }
  EXPECT_EQ(neumann, 4);
  EXPECT_EQ(m.neumann_edges().size(), 4u);
}

TEST(MeshIo, JsonRoundTrip) {
  const PolygonalMesh m =
      generate_square_grid(2, minus_one_one).with_neumann([](const Edge& e) { return e.midpoint.y() > 0.99; });
  const PolygonalMesh r = parse_mesh_json(mesh_to_json(m));
  EXPECT_EQ(r.num_vertices(), m.num_vertices());
  EXPECT_EQ(r.num_cells(), m.num_cells());
  EXPECT_EQ(r.num_edges(), m.num_edges());
  EXPECT_EQ(r.cells(), m.cells());
  EXPECT_EQ(r.neumann_edges().size(), 2u);
}

TEST(MeshIo, OffRoundTripThroughFile) {
  const PolygonalMesh m = generate_voronoi(4, unit, 1);
  const auto path = std::filesystem::temp_directory_path() / "ovem_roundtrip.off";
  export_mesh(m, path, MeshFormat::off);
  const PolygonalMesh r = import_mesh(path, format_from_extension(path));
  EXPECT_EQ(r.num_vertices(), m.num_vertices());
  EXPECT_EQ(r.num_cells(), m.num_cells());
  EXPECT_EQ(r.num_edges(), m.num_edges());
  std::filesystem::remove(path);
}

TEST(MeshIo, VertexOutOfRange) {
  const std::string text = R"({"vertices": [[0,0],[1,0],[2,0],[0,1],[1,1],[2,1],[0,2],[1,2],[2,2]],
  "cells": [[0,1,999]]})";
  EXPECT_THROW((void)parse_mesh_json(text), MeshParseError);
}

TEST(MeshIo, MalformedReportsLine) {
  const std::string text = "OFF\n3 1 0\n0 0\n1 0\n0 oops\n3 0 1 2\n";
  try {
    (void)parse_mesh_off(text);
    FAIL() << "expected a parse error";
  } catch (const MeshParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(MeshIo, NonManifoldEdge) {
  const std::string text = R"({"vertices": [[0,0],[1,0],[0.5,1],[0.5,-1],[0.5,2]],
  "cells": [[0,1,2],[1,0,3],[0,1,4]]})";
  EXPECT_THROW((void)parse_mesh_json(text), TopologyError);
}

TEST(Regularity, UnitSquare) {
  const RegularityReport r = check_regularity(generate_square_grid(1, unit));
  EXPECT_NEAR(r.edge_ratio[0], 1.0 / std::numbers::sqrt2, 1e-14);
}

TEST(Regularity, RegularHexagonEdgeRatioHalf) {
  std::vector<Point> v;
  for (int k = 0; k < 6; ++k) v.emplace_back(std::cos(k * std::numbers::pi / 3), std::sin(k * std::numbers::pi / 3));
  const PolygonalMesh m(v, {{0, 1, 2, 3, 4, 5}});
  const RegularityReport r = check_regularity(m);
  EXPECT_NEAR(r.edge_ratio[0], 0.5, 1e-14);
  // inscribed circle radius sqrt(3)/2 over diameter 2
  EXPECT_NEAR(r.star_ratio[0], std::sqrt(3.0) / 4.0, 1e-6);
}

TEST(Regularity, SliverFlagged) {
  const PolygonalMesh m({Point(0, 0), Point(1, 0), Point(1, 0.01), Point(0, 0.01)}, {{0, 1, 2, 3}});
  const RegularityReport r = check_regularity(m, 0.1);
  EXPECT_LT(r.sigma, 0.1);
  ASSERT_EQ(r.flagged.size(), 1u);
  EXPECT_EQ(r.flagged[0], 0);
}
