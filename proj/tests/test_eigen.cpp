#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "ovem/eigen_solver.hpp"
#include "ovem/harness.hpp"

using namespace ovem;

namespace {

const Rectangle square{-1.0, -1.0, 1.0, 1.0};

AssemblyParams stokes() {
  AssemblyParams p;
  p.convection = [](const Point&) { return Point(0.0, 0.0); };
  return p;
}

AssemblyParams oseen(double speed = 1.0) {
  AssemblyParams p;
  p.convection = [speed](const Point&) { return Point(speed, 0.0); };
  return p;
}

EigenOptions opts(int count, EigenMethod method, double shift = 1.0) {
  EigenOptions o;
  o.count = count;
  o.method = method;
  o.shift = shift;
  return o;
}

}  // namespace

TEST(EigenSolver, StokesSpectrumIsReal) {
  const GlobalPencil pencil = assemble(generate_square_grid(8, square), stokes());
  const EigenResult r = solve_gevp(pencil, opts(6, EigenMethod::shift_invert));
  ASSERT_EQ(r.eigenvalues.size(), 6u);
  EXPECT_EQ(r.method, "shift-invert");
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    EXPECT_LT(std::abs(r.eigenvalues[i].imag()), 1e-8 * std::abs(r.eigenvalues[i]));
    EXPECT_GT(r.eigenvalues[i].real(), 0.0);
    EXPECT_LE(r.residuals[i], 1e-8);
    if (i > 0) EXPECT_LE(std::abs(r.eigenvalues[i - 1]), std::abs(r.eigenvalues[i]) + 1e-12);
  }
}

TEST(EigenSolver, ResidualsAndDivergenceSmall) {
  const GlobalPencil pencil = assemble(generate_voronoi(8, square, 3), oseen());
  const EigenResult r = solve_gevp(pencil, opts(8, EigenMethod::shift_invert));
  ASSERT_EQ(r.eigenvalues.size(), 8u);
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    EXPECT_LE(r.residuals[i], 1e-8);
    EXPECT_LE(r.div_residuals[i], 1e-10);
    // independent residual check from the assembled blocks
    const Eigen::VectorXcd& u = r.velocity[i];
    const Eigen::VectorXcd& p = r.pressure[i];
    const SparseMatrix a = pencil.a_sym + pencil.a_skew + pencil.a_flux;
    const Eigen::VectorXcd lhs = a.cast<Complex>() * u + pencil.b.transpose().cast<Complex>() * p;
    const Eigen::VectorXcd rhs = r.eigenvalues[i] * (pencil.mass.cast<Complex>() * u);
    // the multiplier couples only through the pressure rows and vanishes here
    EXPECT_LE((lhs - rhs).norm() / rhs.norm(), 1e-8);
    EXPECT_LE((pencil.b.cast<Complex>() * u).norm() / u.norm(), 1e-10);
  }
}

TEST(EigenSolver, AdjointSpectrumIsConjugate) {
  const GlobalPencil pencil = assemble(generate_hexagonal(6, square), oseen(3.0));
  const EigenResult primal = solve_gevp(pencil, opts(6, EigenMethod::shift_invert));
  const EigenResult dual = solve_gevp(assemble_adjoint(pencil), opts(6, EigenMethod::shift_invert));
  EXPECT_LE(conjugate_mismatch(primal.eigenvalues, dual.eigenvalues), 1e-7);
}

TEST(EigenSolver, DenseAndShiftInvertAgree) {
  const GlobalPencil pencil = assemble(generate_square_grid(4, square), oseen());
  const EigenResult qz = solve_gevp(pencil, opts(4, EigenMethod::dense_qz));
  const EigenResult si = solve_gevp(pencil, opts(4, EigenMethod::shift_invert));
  EXPECT_EQ(qz.method, "qz");
  ASSERT_EQ(qz.eigenvalues.size(), 4u);
  ASSERT_EQ(si.eigenvalues.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(qz.eigenvalues[i] - si.eigenvalues[i]), 1e-9 * std::abs(qz.eigenvalues[i]));
    EXPECT_LE(qz.residuals[i], 1e-8);
  }
}

TEST(EigenSolver, ShiftInvertFindsRepeatedEigenvalue) {
  // the symmetric 2x2 grid has a triple eigenvalue at the bottom of the spectrum
  const GlobalPencil pencil = assemble(generate_square_grid(2, square), oseen());
  const EigenResult qz = solve_gevp(pencil, opts(3, EigenMethod::dense_qz));
  const EigenResult si = solve_gevp(pencil, opts(3, EigenMethod::shift_invert));
  ASSERT_EQ(qz.eigenvalues.size(), 3u);
  ASSERT_EQ(si.eigenvalues.size(), 3u);
  EXPECT_LE(std::abs(qz.eigenvalues[0] - qz.eigenvalues[2]), 1e-9 * std::abs(qz.eigenvalues[0]));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(qz.eigenvalues[i] - si.eigenvalues[i]), 1e-9 * std::abs(qz.eigenvalues[i]));
    EXPECT_LE(si.residuals[i], 1e-8);
  }
}

TEST(EigenSolver, DenseSolveIsReproducible) {
  const GlobalPencil pencil = assemble(generate_square_grid(8, square), oseen());
  const EigenResult a = solve_gevp(pencil, opts(4, EigenMethod::dense_qz));
  (void)std::rand();
  const EigenResult b = solve_gevp(pencil, opts(4, EigenMethod::dense_qz));
  ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) EXPECT_EQ(a.eigenvalues[i], b.eigenvalues[i]);
}

TEST(EigenSolver, DenseOnTwoByTwoMesh) {
  const GlobalPencil pencil = assemble(generate_square_grid(2, square), oseen());
  const EigenResult r = solve_gevp(pencil, opts(2, EigenMethod::automatic));
  EXPECT_EQ(r.method, "qz");
  ASSERT_FALSE(r.eigenvalues.empty());
  for (double res : r.residuals) EXPECT_LE(res, 1e-8);
}

TEST(EigenSolver, IndependentOfShift) {
  const GlobalPencil pencil = assemble(generate_trapezoidal(8, square), oseen());
  const EigenResult a = solve_gevp(pencil, opts(4, EigenMethod::shift_invert, 0.5));
  const EigenResult b = solve_gevp(pencil, opts(4, EigenMethod::shift_invert, 5.0));
  ASSERT_EQ(a.eigenvalues.size(), 4u);
  ASSERT_EQ(b.eigenvalues.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(a.eigenvalues[i] - b.eigenvalues[i]), 1e-8 * std::abs(a.eigenvalues[i]));
  }
}

TEST(EigenSolver, ComplexEigenvaluesComeInConjugatePairs) {
  const GlobalPencil pencil = assemble(generate_square_grid(4, square), oseen(20.0));
  const EigenResult r = solve_gevp(pencil, opts(30, EigenMethod::dense_qz));
  int complex_count = 0;
  // the last entry may be a pair member cut off by the count
  for (std::size_t i = 0; i + 1 < r.eigenvalues.size(); ++i) {
    const Complex l = r.eigenvalues[i];
    if (std::abs(l.imag()) < 1e-8 * std::abs(l)) continue;
    ++complex_count;
    bool has_partner = false;
    for (const Complex& m : r.eigenvalues) has_partner |= std::abs(m - std::conj(l)) < 1e-8 * std::abs(l);
    EXPECT_TRUE(has_partner) << l;
  }
  EXPECT_GT(complex_count, 0);
}

TEST(EigenSolver, RejectsNonPositiveCount) {
  const GlobalPencil pencil = assemble(generate_square_grid(2, square), oseen());
  EXPECT_THROW((void)solve_gevp(pencil, opts(0, EigenMethod::automatic)), std::invalid_argument);
}

TEST(EigenSolver, ConjugateMismatchSizes) {
  EXPECT_TRUE(std::isinf(conjugate_mismatch({Complex(1, 1)}, {})));
  EXPECT_NEAR(conjugate_mismatch({Complex(1, 1), Complex(2, 0)}, {Complex(2, 0), Complex(1, -1)}), 0.0, 1e-15);
}

TEST(EigenSolver, JsonRoundTrip) {
  const GlobalPencil pencil = assemble(generate_square_grid(4, square), oseen());
  const EigenResult r = solve_gevp(pencil, opts(3, EigenMethod::dense_qz));
  const EigenResult back = eigen_result_from_json(eigen_result_json(r, true));
  EXPECT_EQ(back.method, r.method);
  ASSERT_EQ(back.eigenvalues.size(), r.eigenvalues.size());
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    EXPECT_EQ(back.eigenvalues[i], r.eigenvalues[i]);
    EXPECT_EQ(back.residuals[i], r.residuals[i]);
    EXPECT_EQ((back.velocity[i] - r.velocity[i]).norm(), 0.0);
  }
  EXPECT_EQ(eigen_result_json(back, true), eigen_result_json(r, true));
}

TEST(SourceSolve, ZeroLoadGivesZeroSolution) {
  const GlobalPencil pencil = assemble(generate_voronoi(6, square, 1), oseen());
  const SourceSolution s = solve_source(pencil, Eigen::VectorXd::Zero(pencil.dofs.num_velocity));
  EXPECT_EQ(s.velocity.norm(), 0.0);
  EXPECT_EQ(s.pressure.norm(), 0.0);
}

TEST(SourceSolve, DiscreteSolutionIsDivergenceFree) {
  const Rectangle unit{0.0, 0.0, 1.0, 1.0};
  const PolygonalMesh mesh = generate_trapezoidal(8, unit);
  const GlobalPencil pencil = assemble(mesh, oseen());
  const ManufacturedSolution exact;
  const Eigen::VectorXd rhs =
      load_vector(mesh, pencil.dofs, [&](const Point& x) { return exact.load(x); });
  const SourceSolution s = solve_source(pencil, rhs);
  EXPECT_LE((pencil.b * s.velocity).norm() / s.velocity.norm(), 1e-10);
  // zero-mean pressure constraint
  EXPECT_NEAR(pencil.mean_row.dot(s.pressure), 0.0, 1e-12);
  EXPECT_THROW((void)solve_source(pencil, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(SourceSolve, SatisfiesFullBorderedSystem) {
  for (const bool adjoint : {false, true}) {
    const GlobalPencil primal = assemble(generate_voronoi(8, square, 4), oseen(2.0));
    const GlobalPencil pencil = adjoint ? assemble_adjoint(primal) : primal;
    ASSERT_TRUE(pencil.dofs.has_multiplier);
    const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(pencil.dofs.num_velocity, -1.0, 2.0);
    const SourceSolution s = solve_source(pencil, rhs);
    Eigen::VectorXd x(pencil.size());
    x << s.velocity, s.pressure, s.multiplier;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(pencil.size());
    full.head(rhs.size()) = rhs;
    EXPECT_LE((pencil.left() * x - full).norm() / rhs.norm(), 1e-10);
  }
}
