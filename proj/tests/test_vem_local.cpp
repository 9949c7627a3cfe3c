#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "ovem/vem_local.hpp"
#include "test_support.hpp"

using namespace ovem;
using ovem::fixtures::edge_means;
using ovem::fixtures::Linear;
using ovem::fixtures::random_cells;
using ovem::fixtures::random_linear;

namespace {

int rank_of(const Eigen::MatrixXd& m, double rel = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > rel * s(0) ? 1 : 0;
  return r;
}

// Quadratic test field with its analytic gradient.
struct Quadratic {
  Eigen::Matrix<double, 2, 6> c;
  Point operator()(const Point& x) const {
    Eigen::Matrix<double, 6, 1> m;
    m << 1, x.x(), x.y(), x.x() * x.x(), x.x() * x.y(), x.y() * x.y();
    return c * m;
  }
  Eigen::Matrix2d gradient(const Point& x) const {
    Eigen::Matrix<double, 6, 2> dm;
    dm << 0, 0, 1, 0, 0, 1, 2 * x.x(), 0, x.y(), x.x(), 0, 2 * x.y();
    return c * dm;
  }
};

Quadratic random_quadratic(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Quadratic q;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 6; ++j) q.c(i, j) = u(rng);
  return q;
}

const VectorField unit_x = [](const Point&) { return Point(1.0, 0.0); };
const VectorField swirl = [](const Point& x) { return Point(-x.y() + 0.3, x.x() * x.x()); };

}  // namespace

TEST(Projectors, ExactOnLinearFieldsOver200Cells) {
  std::mt19937 rng(11);
  for (const LocalElement& el : random_cells(200)) {
    const LocalProjectors proj = build_projectors(el);
    const Linear p = random_linear(rng);
    const Eigen::VectorXd dofs = edge_means(el, p);
    const Eigen::VectorXd coeffs = p.coefficients(el);
    EXPECT_LT((proj.pi_nabla * dofs - coeffs).norm(), 1e-11 * coeffs.norm());
    EXPECT_LT((proj.pi_zero * dofs - coeffs).norm(), 1e-11 * coeffs.norm());
    const Eigen::VectorXd g = proj.grad_zero * dofs;
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(g(2 * c + j), p.grad(c, j), 1e-11);
  }
}

TEST(Projectors, DofMatrixMatchesEdgeMeans) {
  std::mt19937 rng(5);
  for (const LocalElement& el : random_cells(60)) {
    const Linear p = random_linear(rng);
    EXPECT_LT((el.dofs_of(p.coefficients(el)) - edge_means(el, p)).norm(), 1e-12);
  }
}

TEST(Projectors, EllipticProjectionMatchesQuadratureOracle) {
  // Pi_nabla v has gradient (1/|K|) int_K grad v and boundary mean equal to
  // that of v; both computed here from the analytic field.
  std::mt19937 rng(21);
  for (const LocalElement& el : random_cells(60)) {
    const Quadratic v = random_quadratic(rng);
    const LocalProjectors proj = build_projectors(el);
    const Eigen::VectorXd coeffs = proj.pi_nabla * edge_means(el, v);

    const QuadratureRule cell = polygon_rule(el.polygon, 2);
    Eigen::Matrix2d mean_grad = Eigen::Matrix2d::Zero();
    for (std::size_t q = 0; q < cell.size(); ++q) mean_grad += cell.weights[q] * v.gradient(cell.points[q]);
    mean_grad /= el.area;

    Point boundary_v = Point::Zero(), boundary_pi = Point::Zero();
    double perimeter = 0.0;
    const int n = static_cast<int>(el.polygon.size());
    for (int i = 0; i < n; ++i) {
      const Point& a = el.polygon[static_cast<std::size_t>(i)];
      const Point& b = el.polygon[static_cast<std::size_t>((i + 1) % n)];
      const QuadratureRule e = edge_rule(a, b, 3);
      for (std::size_t q = 0; q < e.size(); ++q) {
        boundary_v += e.weights[q] * v(e.points[q]);
        boundary_pi += e.weights[q] * el.evaluate(coeffs, e.points[q]);
      }
      perimeter += (b - a).norm();
    }
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(coeffs(3 * c + 1) / el.diameter, mean_grad(c, 0), 1e-11);
      EXPECT_NEAR(coeffs(3 * c + 2) / el.diameter, mean_grad(c, 1), 1e-11);
    }
    EXPECT_LT((boundary_v - boundary_pi).norm() / perimeter, 1e-12);
  }
}

TEST(Projectors, MeanGradientMatchesAnalyticGradient) {
  std::mt19937 rng(8);
  for (const LocalElement& el : random_cells(40)) {
    const Quadratic v = random_quadratic(rng);
    const Eigen::VectorXd g = build_grad_zero(el) * edge_means(el, v);
    const QuadratureRule cell = polygon_rule(el.polygon, 2);
    Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
    for (std::size_t q = 0; q < cell.size(); ++q) mean += cell.weights[q] * v.gradient(cell.points[q]);
    mean /= el.area;
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(g(2 * c + j), mean(c, j), 1e-11);
  }
}

TEST(Projectors, L2ProjectionMomentIdentity) {
  for (const LocalElement& el : random_cells(40)) {
    const LocalProjectors proj = build_projectors(el);
    const Eigen::MatrixXd g = el.vector_gram();
    EXPECT_LT((g * proj.pi_zero - g * proj.pi_nabla).norm(), 1e-12 * (g * proj.pi_nabla).norm());
  }
}

TEST(LocalSym, ConsistentOnLinearFields) {
  std::mt19937 rng(13);
  for (const LocalElement& el : random_cells(60)) {
    const LocalProjectors proj = build_projectors(el);
    const Linear p = random_linear(rng), q = random_linear(rng);
    const double exact = 2.5 * el.area * (p.grad.array() * q.grad.array()).sum();
    for (double alpha : {0.0, 1.0, 17.0}) {
      const Eigen::MatrixXd a = local_sym(el, proj, 2.5, alpha);
      const double value = edge_means(el, q).dot(a * edge_means(el, p));
      EXPECT_NEAR(value, exact, 1e-11 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(LocalSym, RankWithoutStabilizationAtMostFour) {
  for (const LocalElement& el : random_cells(30)) {
    const Eigen::MatrixXd a = local_sym(el, build_projectors(el), 1.0, 0.0);
    EXPECT_LE(rank_of(a), 4);
  }
}

TEST(LocalSym, StabilizedKernelIsConstants) {
  for (const LocalElement& el : random_cells(30)) {
    const Eigen::MatrixXd a = local_sym(el, build_projectors(el), 1.0, 1.0);
    EXPECT_LT((a - a.transpose()).norm(), 1e-14 * a.norm());
    EXPECT_EQ(rank_of(a), el.num_dofs() - 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_GT(es.eigenvalues()(0), -1e-12 * es.eigenvalues().maxCoeff());
  }
}

TEST(LocalSym, RejectsBadParameters) {
  const LocalElement el = random_cells(1).front();
  const LocalProjectors proj = build_projectors(el);
  EXPECT_THROW((void)local_sym(el, proj, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)local_sym(el, proj, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW((void)local_mass(el, proj, -1.0), std::invalid_argument);
}

TEST(LocalMass, ConsistentOnLinearFields) {
  std::mt19937 rng(17);
  for (const LocalElement& el : random_cells(60)) {
    const LocalProjectors proj = build_projectors(el);
    const Linear p = random_linear(rng), q = random_linear(rng);
    const QuadratureRule cell = polygon_rule(el.polygon, 2);
    double exact = 0.0;
    for (std::size_t k = 0; k < cell.size(); ++k) exact += cell.weights[k] * p(cell.points[k]).dot(q(cell.points[k]));
    for (double beta : {0.0, 1.0, 1000.0}) {
      const double value = edge_means(el, q).dot(local_mass(el, proj, beta) * edge_means(el, p));
      EXPECT_NEAR(value, exact, 1e-11 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(LocalMass, RankWithoutStabilizationAtMostSix) {
  for (const LocalElement& el : random_cells(30)) {
    const LocalProjectors proj = build_projectors(el);
    EXPECT_LE(rank_of(local_mass(el, proj, 0.0)), 6);
    EXPECT_EQ(rank_of(local_mass(el, proj, 1.0)), el.num_dofs());
  }
}

TEST(LocalSkew, ExactlyAntisymmetric) {
  for (const LocalElement& el : random_cells(40)) {
    const Eigen::MatrixXd s = local_skew(el, build_projectors(el), swirl);
    for (int i = 0; i < s.rows(); ++i) {
      EXPECT_EQ(s(i, i), 0.0);
      for (int j = 0; j < s.cols(); ++j) EXPECT_EQ(s(i, j), -s(j, i));
    }
  }
}

TEST(LocalSkew, MatchesOracleForUnitConvection) {
  // For linear p, q: s(p, q) = 1/2 (int (d_x p) . q - int (d_x q) . p).
  std::mt19937 rng(19);
  for (const LocalElement& el : random_cells(60)) {
    const Eigen::MatrixXd s = local_skew(el, build_projectors(el), unit_x);
    const Linear p = random_linear(rng), q = random_linear(rng);
    const QuadratureRule cell = polygon_rule(el.polygon, 2);
    double exact = 0.0;
    for (std::size_t k = 0; k < cell.size(); ++k) {
      const Point& x = cell.points[k];
      exact += 0.5 * cell.weights[k] * (p.grad.col(0).dot(q(x)) - q.grad.col(0).dot(p(x)));
    }
    const double value = edge_means(el, q).dot(s * edge_means(el, p));
    EXPECT_NEAR(value, exact, 1e-11 * std::max(1.0, std::abs(exact)));
  }
}

TEST(LocalDiv, ConstantsInKernel) {
  for (const LocalElement& el : random_cells(40)) {
    const Eigen::RowVectorXd b = local_div(el);
    const Eigen::VectorXd ex = edge_means(el, [](const Point&) { return Point(1.0, 0.0); });
    const Eigen::VectorXd ey = edge_means(el, [](const Point&) { return Point(0.0, 1.0); });
    EXPECT_NEAR(b.dot(ex), 0.0, 1e-13);
    EXPECT_NEAR(b.dot(ey), 0.0, 1e-13);
  }
}

TEST(LocalDiv, RadialFieldGivesMinusTwiceArea) {
  for (const LocalElement& el : random_cells(40)) {
    const Eigen::VectorXd v = edge_means(el, [](const Point& x) { return x; });
    EXPECT_NEAR(local_div(el).dot(v), -2.0 * el.area, 1e-12);
  }
}

TEST(LocalDiv, KernelDimension) {
  for (const LocalElement& el : random_cells(30)) {
    EXPECT_EQ(rank_of(local_div(el)), 1);
    EXPECT_EQ(el.num_dofs() - rank_of(local_div(el)), el.num_dofs() - 1);
  }
}

TEST(LocalFlux, SymmetricAndConsistent) {
  std::mt19937 rng(23);
  for (const LocalElement& el : random_cells(40)) {
    const LocalProjectors proj = build_projectors(el);
    const Linear p = random_linear(rng), q = random_linear(rng);
    for (int e = 0; e < el.num_edges(); ++e) {
      const Eigen::MatrixXd f = local_boundary_flux(el, proj, swirl, e, 6);
      EXPECT_LT((f - f.transpose()).norm(), 1e-15 * std::max(1.0, f.norm()));
      const auto k = static_cast<std::size_t>(e);
      const Point& n = el.normals[k];
      const Point half = 0.5 * el.lengths[k] * Point(-n.y(), n.x());
      const QuadratureRule r = edge_rule(el.midpoints[k] - half, el.midpoints[k] + half, 6);
      double exact = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) {
        const Point& x = r.points[j];
        exact += 0.5 * r.weights[j] * swirl(x).dot(n) * p(x).dot(q(x));
      }
      EXPECT_NEAR(edge_means(el, q).dot(f * edge_means(el, p)), exact, 1e-11 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(LocalFlux, RejectsBadEdge) {
  const LocalElement el = random_cells(1).front();
  const LocalProjectors proj = build_projectors(el);
  EXPECT_THROW((void)local_boundary_flux(el, proj, unit_x, el.num_edges()), std::out_of_range);
  EXPECT_THROW((void)local_boundary_flux(el, proj, unit_x, -1), std::out_of_range);
}

TEST(LocalDump, JsonHasAllBlocks) {
  const LocalElement el = random_cells(3).back();
  const LocalProjectors proj = build_projectors(el);
  LocalParameters params;
  params.convection = unit_x;
  const LocalMatrices mats = build_local_matrices(el, proj, params);
  const auto doc = nlohmann::json::parse(dump_local_json(el, proj, mats));
  EXPECT_EQ(doc.at("cell").get<int>(), el.cell);
  EXPECT_EQ(doc.at("pi_nabla").size(), 6u);
  EXPECT_EQ(doc.at("pi_nabla").at(0).size(), static_cast<std::size_t>(el.num_dofs()));
  EXPECT_EQ(doc.at("a_sym").size(), static_cast<std::size_t>(el.num_dofs()));
  EXPECT_EQ(doc.at("div").size(), 1u);
  EXPECT_DOUBLE_EQ(doc.at("mass").at(1).at(2).get<double>(), mats.mass(1, 2));
}
