#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ovem/mesh.hpp"
#include "ovem/quadrature.hpp"

namespace ovem {

using VectorField = std::function<Point(const Point&)>;

/// Default cell quadrature degree for the k = 1 element integrals.
inline constexpr int default_cell_degree = 4;

/// Geometry and DOF layout of one cell for the lowest-order (k = 1)
/// nonconforming velocity space. Local velocity DOFs are the edge means of
/// each component, edges in loop order, (x, y) interleaved:
///   dof 2*i + c = (1/|e_i|) * int_{e_i} v_c.
/// Vector polynomials in (P_1)^2 are stored as 6 coefficients, index 3*c + a,
/// on the scaled monomials {1, (x-x_K)/h_K, (y-y_K)/h_K}.
struct LocalElement {
  int cell = -1;
  Polygon polygon;
  double area = 0.0;
  double diameter = 0.0;
  Point centroid = Point::Zero();
  std::vector<CellEdge> edges;
  std::vector<double> lengths;
  std::vector<Point> midpoints;
  std::vector<Point> normals;  ///< outward with respect to this cell
  ScaledMonomialBasis basis{Point::Zero(), 1.0, 1};
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();  ///< scalar monomial Gram matrix

  [[nodiscard]] int num_edges() const { return static_cast<int>(edges.size()); }
  [[nodiscard]] int num_dofs() const { return 2 * num_edges(); }

  /// DOF vector of the vector polynomial with coefficients `coeffs` (6).
  [[nodiscard]] Eigen::VectorXd dofs_of(const Eigen::VectorXd& coeffs) const;
  /// num_dofs() x 6 matrix mapping polynomial coefficients to DOFs.
  [[nodiscard]] Eigen::MatrixXd dof_matrix() const;
  /// Evaluates a 6-coefficient vector polynomial.
  [[nodiscard]] Point evaluate(const Eigen::VectorXd& coeffs, const Point& x) const;
  /// 2 x 6 evaluation matrix at x.
  [[nodiscard]] Eigen::Matrix<double, 2, 6> evaluation_matrix(const Point& x) const;
  /// 6 x 6 Gram matrix of the vector basis (block diagonal).
  [[nodiscard]] Eigen::Matrix<double, 6, 6> vector_gram() const;
};

[[nodiscard]] LocalElement make_local_element(const PolygonalMesh& mesh, int cell);

struct LocalProjectors {
  Eigen::MatrixXd pi_nabla;   ///< 6 x ndof: coefficients of the elliptic projection
  Eigen::MatrixXd pi_zero;    ///< 6 x ndof: coefficients of the L2 projection onto (P_1)^2
  Eigen::MatrixXd grad_zero;  ///< 4 x ndof: row 2*c + j = mean of d v_c / d x_j
};

/// Mean gradient from the boundary: (1/|K|) sum_e |e| mean_e(v) (x) n_e.
[[nodiscard]] Eigen::MatrixXd build_grad_zero(const LocalElement& el);
/// Elliptic projection: gradient = mean gradient, constant fixed by
/// int_{dK} (Pi v - v) = 0.
[[nodiscard]] Eigen::MatrixXd build_pi_nabla(const LocalElement& el, const Eigen::MatrixXd& grad_zero);
/// L2 projection onto (P_1)^2. The local space is enhanced so that the
/// (P_1)^2 moments of v equal those of Pi_nabla v; they are computable.
[[nodiscard]] Eigen::MatrixXd build_pi_zero(const LocalElement& el, const Eigen::MatrixXd& pi_nabla);
[[nodiscard]] LocalProjectors build_projectors(const LocalElement& el);

/// 1/2 int_e (beta . n) Pi_nabla w . Pi_nabla v on local edge `edge`. Added on
/// Neumann edges it makes the skew-symmetric convection consistent with the
/// natural condition (nu grad u - p I) n = 0.
[[nodiscard]] Eigen::MatrixXd local_boundary_flux(const LocalElement& el, const LocalProjectors& proj,
                                                  const VectorField& convection, int edge,
                                                  int degree = default_cell_degree);

/// nu * |K| G^T G + nu * alpha * (I - D Pi)^T (I - D Pi)
[[nodiscard]] Eigen::MatrixXd local_sym(const LocalElement& el, const LocalProjectors& proj, double viscosity,
                                        double alpha);
/// 1/2 (T - T^T), T_ij = int_K ((beta . grad) phi_j) . Pi0 phi_i with the
/// gradient replaced by its cell mean. Exactly antisymmetric.
[[nodiscard]] Eigen::MatrixXd local_skew(const LocalElement& el, const LocalProjectors& proj,
                                         const VectorField& convection, int degree = default_cell_degree);
/// Row of b^K(v, 1) = -int_K div v.
[[nodiscard]] Eigen::RowVectorXd local_div(const LocalElement& el);
/// Pi0^T Gram Pi0 + beta_k h_K^2 (I - D Pi0)^T (I - D Pi0)
[[nodiscard]] Eigen::MatrixXd local_mass(const LocalElement& el, const LocalProjectors& proj, double beta_k = 0.0);

struct LocalParameters {
  double viscosity = 1.0;
  double alpha = 1.0;      ///< stiffness stabilization scaling
  double beta_mass = 0.0;  ///< mass stabilization scaling
  VectorField convection = [](const Point&) { return Point(0.0, 0.0); };
  int quadrature_degree = default_cell_degree;
};

struct LocalMatrices {
  Eigen::MatrixXd a_sym;
  Eigen::MatrixXd a_skew;
  Eigen::RowVectorXd div;
  Eigen::MatrixXd mass;
};

[[nodiscard]] LocalMatrices build_local_matrices(const LocalElement& el, const LocalProjectors& proj,
                                                 const LocalParameters& params);

/// JSON dump of one cell's projectors and matrices.
[[nodiscard]] std::string dump_local_json(const LocalElement& el, const LocalProjectors& proj,
                                          const LocalMatrices& mats);

}  // namespace ovem
