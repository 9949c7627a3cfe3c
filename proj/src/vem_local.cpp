#include "ovem/vem_local.hpp"

#include <stdexcept>

#include <json.hpp>

namespace ovem {

namespace {

void check_invertible(const Eigen::MatrixXd& m, int cell, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw std::runtime_error(std::string("singular ") + what + " system on cell " + std::to_string(cell));
  }
}

}  // namespace

Eigen::VectorXd LocalElement::dofs_of(const Eigen::VectorXd& coeffs) const { return dof_matrix() * coeffs; }

Eigen::MatrixXd LocalElement::dof_matrix() const {
  // The edge mean of a linear function is its midpoint value.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(num_dofs(), 6);
  for (int i = 0; i < num_edges(); ++i) {
    const Eigen::VectorXd m = basis.values(midpoints[static_cast<std::size_t>(i)]);
    for (int c = 0; c < 2; ++c) d.block(2 * i + c, 3 * c, 1, 3) = m.transpose();
  }
  return d;
}

Point LocalElement::evaluate(const Eigen::VectorXd& coeffs, const Point& x) const {
  return evaluation_matrix(x) * coeffs;
}

Eigen::Matrix<double, 2, 6> LocalElement::evaluation_matrix(const Point& x) const {
  const Eigen::VectorXd m = basis.values(x);
  Eigen::Matrix<double, 2, 6> e = Eigen::Matrix<double, 2, 6>::Zero();
  e.block<1, 3>(0, 0) = m.transpose();
  e.block<1, 3>(1, 3) = m.transpose();
  return e;
}

Eigen::Matrix<double, 6, 6> LocalElement::vector_gram() const {
  Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Zero();
  g.block<3, 3>(0, 0) = gram;
  g.block<3, 3>(3, 3) = gram;
  return g;
}

LocalElement make_local_element(const PolygonalMesh& mesh, int cell) {
  LocalElement el;
  el.cell = cell;
  el.polygon = mesh.cell_polygon(cell);
  const CellGeometry& g = mesh.geometry(cell);
  el.area = g.area;
  el.diameter = g.diameter;
  el.centroid = g.centroid;
  const auto ce = mesh.cell_edges(cell);
  el.edges.assign(ce.begin(), ce.end());
  for (const CellEdge& e : el.edges) {
    const Edge& edge = mesh.edge(e.edge);
    el.lengths.push_back(edge.length);
    el.midpoints.push_back(edge.midpoint);
    el.normals.push_back(static_cast<double>(e.sign) * edge.normal);
  }
  el.basis = ScaledMonomialBasis(el.centroid, el.diameter, 1);
  el.gram = monomial_moments(el.polygon, el.basis);
  return el;
}

Eigen::MatrixXd build_grad_zero(const LocalElement& el) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, el.num_dofs());
  for (int i = 0; i < el.num_edges(); ++i) {
    const double l = el.lengths[static_cast<std::size_t>(i)];
    const Point& n = el.normals[static_cast<std::size_t>(i)];
    for (int c = 0; c < 2; ++c) {
      for (int j = 0; j < 2; ++j) g(2 * c + j, 2 * i + c) = l * n(j) / el.area;
    }
  }
  return g;
}

Eigen::MatrixXd build_pi_nabla(const LocalElement& el, const Eigen::MatrixXd& grad_zero) {
  const int ndof = el.num_dofs();
  const double h = el.diameter;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(6, ndof);
  double perimeter = 0.0;
  for (double l : el.lengths) perimeter += l;
  if (!(perimeter > 0.0)) throw std::runtime_error("degenerate boundary on cell " + std::to_string(el.cell));
  for (int c = 0; c < 2; ++c) {
    // linear part: the mean gradient, in scaled-monomial coefficients
    p.row(3 * c + 1) = h * grad_zero.row(2 * c + 0);
    p.row(3 * c + 2) = h * grad_zero.row(2 * c + 1);
    // constant from the boundary mean condition
    Eigen::RowVectorXd constant = Eigen::RowVectorXd::Zero(ndof);
    for (int i = 0; i < el.num_edges(); ++i) {
      const double l = el.lengths[static_cast<std::size_t>(i)];
      const Eigen::VectorXd m = el.basis.values(el.midpoints[static_cast<std::size_t>(i)]);
      constant(2 * i + c) += l;
      constant -= l * (m(1) * p.row(3 * c + 1) + m(2) * p.row(3 * c + 2));
    }
    p.row(3 * c) = constant / perimeter;
  }
  return p;
}

Eigen::MatrixXd build_pi_zero(const LocalElement& el, const Eigen::MatrixXd& pi_nabla) {
  // In the enhanced space the (P_1)^2 moments of v are those of Pi_nabla v.
  const Eigen::Matrix<double, 6, 6> gram6 = el.vector_gram();
  check_invertible(gram6, el.cell, "L2 projection");
  const Eigen::MatrixXd moments = gram6 * pi_nabla;
  return gram6.llt().solve(moments);
}

LocalProjectors build_projectors(const LocalElement& el) {
  LocalProjectors p;
  p.grad_zero = build_grad_zero(el);
  p.pi_nabla = build_pi_nabla(el, p.grad_zero);
  p.pi_zero = build_pi_zero(el, p.pi_nabla);
  return p;
}

Eigen::MatrixXd local_sym(const LocalElement& el, const LocalProjectors& proj, double viscosity, double alpha) {
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (alpha < 0.0) throw std::invalid_argument("stabilization parameter alpha must be non-negative");
  const int ndof = el.num_dofs();
  Eigen::MatrixXd a = viscosity * el.area * proj.grad_zero.transpose() * proj.grad_zero;
  const Eigen::MatrixXd defect = Eigen::MatrixXd::Identity(ndof, ndof) - el.dof_matrix() * proj.pi_nabla;
  a.noalias() += viscosity * alpha * defect.transpose() * defect;
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd local_skew(const LocalElement& el, const LocalProjectors& proj, const VectorField& convection,
                           int degree) {
  const int ndof = el.num_dofs();
  const QuadratureRule rule = polygon_rule(el.polygon, degree);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(ndof, ndof);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point& x = rule.points[q];
    const Point b = convection(x);
    // (beta . grad) v, component c = sum_j beta_j G_cj
    Eigen::MatrixXd convected(2, ndof);
    for (int c = 0; c < 2; ++c) convected.row(c) = b.x() * proj.grad_zero.row(2 * c) + b.y() * proj.grad_zero.row(2 * c + 1);
    const Eigen::MatrixXd projected = el.evaluation_matrix(x) * proj.pi_zero;  // 2 x ndof
    t.noalias() += rule.weights[q] * projected.transpose() * convected;
  }
  Eigen::MatrixXd s(ndof, ndof);
  for (int i = 0; i < ndof; ++i) {
    for (int j = 0; j < ndof; ++j) s(i, j) = 0.5 * (t(i, j) - t(j, i));
  }
  return s;
}

Eigen::MatrixXd local_boundary_flux(const LocalElement& el, const LocalProjectors& proj,
                                    const VectorField& convection, int edge, int degree) {
  if (edge < 0 || edge >= el.num_edges()) throw std::out_of_range("local edge index out of range");
  const auto k = static_cast<std::size_t>(edge);
  const Point& n = el.normals[k];
  const Point half = 0.5 * el.lengths[k] * Point(-n.y(), n.x());
  const QuadratureRule rule = edge_rule(el.midpoints[k] - half, el.midpoints[k] + half, degree);
  const int ndof = el.num_dofs();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(ndof, ndof);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point& x = rule.points[q];
    const Eigen::MatrixXd trace = el.evaluation_matrix(x) * proj.pi_nabla;  // 2 x ndof
    f.noalias() += (0.5 * rule.weights[q] * convection(x).dot(n)) * trace.transpose() * trace;
  }
  return 0.5 * (f + f.transpose());
}

Eigen::RowVectorXd local_div(const LocalElement& el) {
  Eigen::RowVectorXd b(el.num_dofs());
  for (int i = 0; i < el.num_edges(); ++i) {
    const double l = el.lengths[static_cast<std::size_t>(i)];
    const Point& n = el.normals[static_cast<std::size_t>(i)];
    b(2 * i) = -l * n.x();
    b(2 * i + 1) = -l * n.y();
  }
  return b;
}

Eigen::MatrixXd local_mass(const LocalElement& el, const LocalProjectors& proj, double beta_k) {
  if (beta_k < 0.0) throw std::invalid_argument("mass stabilization parameter must be non-negative");
  const int ndof = el.num_dofs();
  Eigen::MatrixXd m = proj.pi_zero.transpose() * el.vector_gram() * proj.pi_zero;
  if (beta_k > 0.0) {
    const Eigen::MatrixXd defect = Eigen::MatrixXd::Identity(ndof, ndof) - el.dof_matrix() * proj.pi_zero;
    m.noalias() += beta_k * el.diameter * el.diameter * defect.transpose() * defect;
  }
  return 0.5 * (m + m.transpose());
}

LocalMatrices build_local_matrices(const LocalElement& el, const LocalProjectors& proj,
                                   const LocalParameters& params) {
  LocalMatrices m;
  m.a_sym = local_sym(el, proj, params.viscosity, params.alpha);
  m.a_skew = local_skew(el, proj, params.convection, params.quadrature_degree);
  m.div = local_div(el);
  m.mass = local_mass(el, proj, params.beta_mass);
  return m;
}

namespace {

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string dump_local_json(const LocalElement& el, const LocalProjectors& proj, const LocalMatrices& mats) {
  nlohmann::json doc;
  doc["cell"] = el.cell;
  doc["area"] = el.area;
  doc["diameter"] = el.diameter;
  doc["centroid"] = {el.centroid.x(), el.centroid.y()};
  nlohmann::json verts = nlohmann::json::array();
  for (const Point& p : el.polygon) verts.push_back({p.x(), p.y()});
  doc["polygon"] = verts;
  doc["pi_nabla"] = to_json(proj.pi_nabla);
  doc["pi_zero"] = to_json(proj.pi_zero);
  doc["grad_zero"] = to_json(proj.grad_zero);
  doc["a_sym"] = to_json(mats.a_sym);
  doc["a_skew"] = to_json(mats.a_skew);
  doc["div"] = to_json(mats.div);
  doc["mass"] = to_json(mats.mass);
  return doc.dump(1);
}

}  // namespace ovem
