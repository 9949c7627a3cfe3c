#include "ovem/assembly.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ovem {

using Triplet = Eigen::Triplet<double>;

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::clamped ? "clamped" : "mixed"; }

BoundaryCondition parse_boundary_condition(const std::string& name) {
  if (name == "clamped") return BoundaryCondition::clamped;
  if (name == "mixed") return BoundaryCondition::mixed;
  throw std::invalid_argument("unknown boundary condition '" + name + "' (expected clamped or mixed)");
}

DofNumbering number_dofs(const PolygonalMesh& mesh, BoundaryCondition bc) {
  DofNumbering dofs;
  dofs.edge_dofs.assign(static_cast<std::size_t>(mesh.num_edges()), {-1, -1});
  double dirichlet_length = 0.0;
  int next = 0;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.on_boundary()) {
      if (edge.boundary == BoundaryKind::dirichlet) {
        dirichlet_length += edge.length;
        continue;
      }
      if (bc == BoundaryCondition::clamped) {
        throw std::invalid_argument("clamped boundary condition on a mesh with Neumann edges");
      }
    }
    dofs.edge_dofs[static_cast<std::size_t>(e)] = {next, next + 1};
    next += 2;
  }
  if (bc == BoundaryCondition::mixed && !(dirichlet_length > 0.0)) {
    throw std::invalid_argument("mixed boundary condition needs a Dirichlet part of positive length");
  }
  dofs.num_velocity = next;
  dofs.num_pressure = mesh.num_cells();
  dofs.has_multiplier = bc == BoundaryCondition::clamped;
  return dofs;
}

SparseMatrix GlobalPencil::left() const {
  const int nv = dofs.num_velocity;
  const int np = dofs.num_pressure;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a_sym.nonZeros() + a_skew.nonZeros() + a_flux.nonZeros() + 2 * b.nonZeros() + 2 * np));
  auto append = [&](const SparseMatrix& m, int r0, int c0, bool transpose) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (transpose) t.emplace_back(r0 + c, c0 + r, it.value());
        else t.emplace_back(r0 + r, c0 + c, it.value());
      }
    }
  };
  append(a_sym, 0, 0, false);
  append(a_skew, 0, 0, false);
  append(a_flux, 0, 0, false);
  append(b, 0, nv, true);
  append(b, nv, 0, false);
  if (dofs.has_multiplier) {
    const int mi = dofs.multiplier_index();
    for (int p = 0; p < np; ++p) {
      t.emplace_back(nv + p, mi, mean_row(p));
      t.emplace_back(mi, nv + p, mean_row(p));
    }
  }
  SparseMatrix out(size(), size());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix GlobalPencil::right() const {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(mass.nonZeros()));
  for (int k = 0; k < mass.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(mass, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  SparseMatrix out(size(), size());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

GlobalPencil assemble(const PolygonalMesh& mesh, const AssemblyParams& params) {
  if (!(params.viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (params.alpha < 0.0) throw std::invalid_argument("stabilization parameter alpha must be non-negative");
  if (params.beta_mass < 0.0) throw std::invalid_argument("mass stabilization parameter must be non-negative");

  GlobalPencil pencil;
  pencil.dofs = number_dofs(mesh, params.bc);
  const DofNumbering& dofs = pencil.dofs;
  const int nv = dofs.num_velocity;

  LocalParameters local;
  local.viscosity = params.viscosity;
  local.alpha = params.alpha;
  local.beta_mass = params.beta_mass;
  local.convection = params.convection;
  local.quadrature_degree = params.quadrature_degree;

  std::vector<Triplet> t_sym, t_skew, t_flux, t_b, t_mass;
  pencil.mean_row = Eigen::VectorXd::Zero(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalElement el = make_local_element(mesh, c);
    const LocalProjectors proj = build_projectors(el);
    const LocalMatrices mats = build_local_matrices(el, proj, local);
    std::vector<int> map(static_cast<std::size_t>(el.num_dofs()));
    for (int i = 0; i < el.num_edges(); ++i) {
      const auto& g = dofs.edge_dofs[static_cast<std::size_t>(el.edges[static_cast<std::size_t>(i)].edge)];
      map[static_cast<std::size_t>(2 * i)] = g[0];
      map[static_cast<std::size_t>(2 * i + 1)] = g[1];
    }
    for (int i = 0; i < el.num_dofs(); ++i) {
      const int gi = map[static_cast<std::size_t>(i)];
      if (gi < 0) continue;
      t_b.emplace_back(c, gi, mats.div(i));
      for (int j = 0; j < el.num_dofs(); ++j) {
        const int gj = map[static_cast<std::size_t>(j)];
        if (gj < 0) continue;
        t_sym.emplace_back(gi, gj, mats.a_sym(i, j));
        t_skew.emplace_back(gi, gj, mats.a_skew(i, j));
        t_mass.emplace_back(gi, gj, mats.mass(i, j));
      }
    }
    for (int i = 0; i < el.num_edges(); ++i) {
      const Edge& edge = mesh.edge(el.edges[static_cast<std::size_t>(i)].edge);
      if (!edge.on_boundary() || edge.boundary != BoundaryKind::neumann) continue;
      const Eigen::MatrixXd flux = local_boundary_flux(el, proj, params.convection, i, params.quadrature_degree);
      for (int r = 0; r < el.num_dofs(); ++r) {
        const int gr = map[static_cast<std::size_t>(r)];
        if (gr < 0) continue;
        for (int q = 0; q < el.num_dofs(); ++q) {
          const int gq = map[static_cast<std::size_t>(q)];
          if (gq >= 0) t_flux.emplace_back(gr, gq, flux(r, q));
        }
      }
    }
    pencil.mean_row(c) = el.area;
  }
  pencil.a_sym.resize(nv, nv);
  pencil.a_sym.setFromTriplets(t_sym.begin(), t_sym.end());
  pencil.a_skew.resize(nv, nv);
  pencil.a_skew.setFromTriplets(t_skew.begin(), t_skew.end());
  pencil.a_flux.resize(nv, nv);
  pencil.a_flux.setFromTriplets(t_flux.begin(), t_flux.end());
  pencil.mass.resize(nv, nv);
  pencil.mass.setFromTriplets(t_mass.begin(), t_mass.end());
  pencil.b.resize(dofs.num_pressure, nv);
  pencil.b.setFromTriplets(t_b.begin(), t_b.end());
  if (!dofs.has_multiplier) pencil.mean_row.setZero();
  return pencil;
}

GlobalPencil assemble_adjoint(const GlobalPencil& pencil) {
  GlobalPencil adj = pencil;
  adj.a_skew = -pencil.a_skew;
  adj.b = -pencil.b;
  adj.adjoint = !pencil.adjoint;
  return adj;
}

Eigen::VectorXd interpolate(const PolygonalMesh& mesh, const VectorField& field, int degree) {
  Eigen::VectorXd out(2 * mesh.num_edges());
  const auto verts = mesh.vertices();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    const QuadratureRule rule = edge_rule(verts[static_cast<std::size_t>(edge.vertices[0])],
                                          verts[static_cast<std::size_t>(edge.vertices[1])], degree);
    Point mean = Point::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) mean += rule.weights[q] * field(rule.points[q]);
    mean /= edge.length;
    out(2 * e) = mean.x();
    out(2 * e + 1) = mean.y();
  }
  return out;
}

Eigen::VectorXd restrict_to_free(const DofNumbering& dofs, const Eigen::VectorXd& edge_values) {
  Eigen::VectorXd out(dofs.num_velocity);
  for (std::size_t e = 0; e < dofs.edge_dofs.size(); ++e) {
    for (int c = 0; c < 2; ++c) {
      const int g = dofs.edge_dofs[e][static_cast<std::size_t>(c)];
      if (g >= 0) out(g) = edge_values(2 * static_cast<Eigen::Index>(e) + c);
    }
  }
  return out;
}

Eigen::VectorXd extend_to_edges(const DofNumbering& dofs, const Eigen::VectorXd& velocity) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(dofs.edge_dofs.size()));
  for (std::size_t e = 0; e < dofs.edge_dofs.size(); ++e) {
    for (int c = 0; c < 2; ++c) {
      const int g = dofs.edge_dofs[e][static_cast<std::size_t>(c)];
      if (g >= 0) out(2 * static_cast<Eigen::Index>(e) + c) = velocity(g);
    }
  }
  return out;
}

Eigen::VectorXd gather_local(const LocalElement& el, const Eigen::VectorXd& edge_values) {
  Eigen::VectorXd out(el.num_dofs());
  for (int i = 0; i < el.num_edges(); ++i) {
    const int e = el.edges[static_cast<std::size_t>(i)].edge;
    out(2 * i) = edge_values(2 * e);
    out(2 * i + 1) = edge_values(2 * e + 1);
  }
  return out;
}

Eigen::VectorXd load_vector(const PolygonalMesh& mesh, const DofNumbering& dofs, const VectorField& f, int degree) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.num_velocity);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const LocalElement el = make_local_element(mesh, c);
    const LocalProjectors proj = build_projectors(el);
    const QuadratureRule rule = polygon_rule(el.polygon, degree);
    Eigen::Matrix<double, 6, 1> moments = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      moments.noalias() += rule.weights[q] * el.evaluation_matrix(rule.points[q]).transpose() * f(rule.points[q]);
    }
    const Eigen::VectorXd local = proj.pi_zero.transpose() * moments;
    for (int i = 0; i < el.num_edges(); ++i) {
      const auto& g = dofs.edge_dofs[static_cast<std::size_t>(el.edges[static_cast<std::size_t>(i)].edge)];
      for (int k = 0; k < 2; ++k) {
        if (g[static_cast<std::size_t>(k)] >= 0) rhs(g[static_cast<std::size_t>(k)]) += local(2 * i + k);
      }
    }
  }
  return rhs;
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix) {
  out << "%% " << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

void write_triplets(const std::string& path, const SparseMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_triplets(out, matrix);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

SparseMatrix read_triplets(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%", 0) != 0) throw std::runtime_error("missing triplet header");
  std::istringstream header(line.substr(2));
  long rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw std::runtime_error("malformed triplet header");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  long r = 0, c = 0;
  double v = 0.0;
  while (in >> r >> c >> v) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw std::runtime_error("triplet index out of range");
    t.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  }
  if (static_cast<long>(t.size()) != nnz) throw std::runtime_error("triplet count does not match header");
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace ovem
