#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ovem/mesh.hpp"
#include "ovem/vem_local.hpp"

namespace ovem {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryCondition {
  clamped,  ///< u = 0 on the whole boundary, zero-mean pressure
  mixed,    ///< u = 0 on Dirichlet edges, natural condition on Neumann edges
};

[[nodiscard]] std::string to_string(BoundaryCondition bc);
[[nodiscard]] BoundaryCondition parse_boundary_condition(const std::string& name);

struct AssemblyParams {
  double viscosity = 1.0;
  VectorField convection = [](const Point&) { return Point(1.0, 0.0); };
  double alpha = 1.0;      ///< stiffness stabilization scaling
  double beta_mass = 0.0;  ///< mass stabilization scaling
  BoundaryCondition bc = BoundaryCondition::clamped;
  int quadrature_degree = default_cell_degree;
};

/// Global unknowns, ordered [velocity | pressure | multiplier].
/// Two velocity DOFs per free edge, shared by both adjacent cells. Dirichlet
/// edges carry no unknowns (their entries in `edge_dofs` are -1).
struct DofNumbering {
  std::vector<std::array<int, 2>> edge_dofs;
  int num_velocity = 0;
  int num_pressure = 0;
  bool has_multiplier = false;

  [[nodiscard]] int pressure_offset() const { return num_velocity; }
  [[nodiscard]] int multiplier_index() const { return has_multiplier ? num_velocity + num_pressure : -1; }
  [[nodiscard]] int size() const { return num_velocity + num_pressure + (has_multiplier ? 1 : 0); }
};

[[nodiscard]] DofNumbering number_dofs(const PolygonalMesh& mesh, BoundaryCondition bc);

/// Left matrix [[A, B^T, 0], [B, 0, m], [0, m^T, 0]] with A = A_sym + A_skew +
/// A_flux, and right matrix blockdiag(M, 0, 0) of the generalized eigenproblem.
/// A_flux is the symmetric Neumann-edge convective flux; it is empty when the
/// whole boundary is Dirichlet.
struct GlobalPencil {
  DofNumbering dofs;
  SparseMatrix a_sym;
  SparseMatrix a_skew;
  SparseMatrix a_flux;
  SparseMatrix b;            ///< num_pressure x num_velocity
  SparseMatrix mass;
  Eigen::VectorXd mean_row;  ///< cell areas when the multiplier is active
  bool adjoint = false;

  [[nodiscard]] SparseMatrix left() const;
  [[nodiscard]] SparseMatrix right() const;
  [[nodiscard]] int size() const { return dofs.size(); }
};

[[nodiscard]] GlobalPencil assemble(const PolygonalMesh& mesh, const AssemblyParams& params);

/// Pencil of the adjoint problem: skew convection and divergence blocks change
/// sign (A_flux is symmetric and stays), so left() equals the primal transpose up to the symmetric similarity
/// diag(I, -I, -I). Applying it twice returns the primal pencil.
[[nodiscard]] GlobalPencil assemble_adjoint(const GlobalPencil& pencil);

/// Edge means of both components on every mesh edge (2 per edge, edge-major).
[[nodiscard]] Eigen::VectorXd interpolate(const PolygonalMesh& mesh, const VectorField& field, int degree = 6);
/// Keeps the free velocity entries of an edge-major vector.
[[nodiscard]] Eigen::VectorXd restrict_to_free(const DofNumbering& dofs, const Eigen::VectorXd& edge_values);
/// Inverse of restrict_to_free, zero on Dirichlet edges.
[[nodiscard]] Eigen::VectorXd extend_to_edges(const DofNumbering& dofs, const Eigen::VectorXd& velocity);
/// Local DOF vector of a cell from an edge-major vector.
[[nodiscard]] Eigen::VectorXd gather_local(const LocalElement& el, const Eigen::VectorXd& edge_values);

/// Velocity load c_h(f, phi_i) = int_K f . Pi0 phi_i, free DOFs only.
[[nodiscard]] Eigen::VectorXd load_vector(const PolygonalMesh& mesh, const DofNumbering& dofs, const VectorField& f,
                                          int degree = 6);

/// Writes "%% rows cols nnz" followed by one "row col value" line per stored
/// entry (0-based, column-major order, 17 significant digits).
void write_triplets(std::ostream& out, const SparseMatrix& matrix);
void write_triplets(const std::string& path, const SparseMatrix& matrix);
[[nodiscard]] SparseMatrix read_triplets(std::istream& in);

}  // namespace ovem
