#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ovem/assembly.hpp"
#include "ovem/eigen_solver.hpp"
#include "ovem/mesh_generators.hpp"

namespace ovem {

enum class Experiment { table1, table2, spurious, mass_stab, source };

[[nodiscard]] std::string to_string(Experiment experiment);
/// Accepts table1, table2, spurious, mass-stab (or mass_stab), source.
[[nodiscard]] Experiment parse_experiment(const std::string& name);

enum class Side { left, right, bottom, top };

[[nodiscard]] std::string to_string(Side side);
[[nodiscard]] Side parse_side(const std::string& name);

/// Marks every boundary edge of a rectangular mesh as Neumann except those on
/// the listed sides.
[[nodiscard]] PolygonalMesh apply_mixed_boundary(const PolygonalMesh& mesh, const Rectangle& domain,
                                                 const std::vector<Side>& dirichlet_sides);

struct ExperimentConfig {
  Experiment experiment = Experiment::table1;
  MeshFamily family = MeshFamily::quad;
  Rectangle domain{-1.0, -1.0, 1.0, 1.0};  ///< ignored by the L-shaped families
  std::vector<int> n_list{8, 16, 32, 64};
  double viscosity = 1.0;
  Point convection{1.0, 0.0};  ///< constant convective field
  std::vector<double> alpha_list{1.0};
  std::vector<double> beta_k_list{0.0};
  BoundaryCondition bc = BoundaryCondition::clamped;
  std::vector<Side> dirichlet_sides{Side::bottom};  ///< used when bc is mixed
  int nev = 10;
  double shift = 1.0;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  bool check_adjoint = true;
  std::vector<double> reference;  ///< reference eigenvalues, may be shorter than nev
  std::string out_dir = ".";

  /// Throws std::invalid_argument on an empty or non-increasing N list, empty
  /// parameter lists, or non-positive nev.
  void validate() const;
};

/// Reference setup of each experiment.
[[nodiscard]] ExperimentConfig default_config(Experiment experiment);

[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);
/// Keys absent from the document keep the defaults of `base`.
[[nodiscard]] ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base);

/// Experiments index meshes by N = 1/h: a side of width w gets N*w cells, so
/// (-1,1)^2 and the L-shape get 2N cells per side and (0,1)^2 gets N.
[[nodiscard]] int cells_per_side(const ExperimentConfig& config, int n);
[[nodiscard]] PolygonalMesh make_mesh(const ExperimentConfig& config, int n);
[[nodiscard]] AssemblyParams make_assembly_params(const ExperimentConfig& config, double alpha, double beta_k);

/// Least-squares fit lambda(h) ~ extrapolated + constant * h^order.
struct RateFit {
  double extrapolated = 0.0;
  double constant = 0.0;
  double order = 0.0;
  double residual = 0.0;  ///< Euclidean norm of the fit residual
  bool monotone = true;   ///< samples monotone in h
  bool reliable = true;   ///< false when the data carry no h-dependence
};

/// Scans the order over [0.5, 4] and refines by golden section; the linear
/// parameters are solved exactly at each order. Needs at least 3 samples.
[[nodiscard]] RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& lambda);
/// Real parts when every imaginary part is below 1e-8, moduli otherwise.
[[nodiscard]] RateFit fit_rate(const std::vector<double>& h, const std::vector<Complex>& lambda);

/// Least-squares slope of log(error) against log(h).
[[nodiscard]] double log_log_slope(const std::vector<double>& h, const std::vector<double>& error);

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<double> h;                          ///< 1/N per level
  std::vector<std::vector<Complex>> eigenvalues;  ///< [level][i]
  std::vector<std::optional<RateFit>> fits;       ///< per tracked eigenvalue, when >= 3 levels
  std::vector<double> adjoint_mismatch;           ///< per level, NaN when not checked
  std::vector<double> max_residual;               ///< per level
  std::vector<double> max_div_residual;           ///< per level

  [[nodiscard]] int tracked() const;
};

/// One mesh level per N; the eigenvalues are tracked by ascending modulus.
/// A failing level aborts with EigenSolverError; `partial` then holds the
/// completed levels.
[[nodiscard]] ConvergenceReport run_convergence(const ExperimentConfig& config,
                                                ConvergenceReport* partial = nullptr);

/// One eigenvalue column of a parameter sweep.
struct SweepColumn {
  int n = 0;
  double alpha = 1.0;
  double beta_k = 0.0;
  std::vector<Complex> eigenvalues;
  double floor = 0.0;  ///< physical floor at this mesh
  int flagged = 0;     ///< eigenvalues with modulus below the floor
  double max_div_residual = 0.0;
  std::string error;   ///< eigensolver failure; empty when the column solved
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<SweepColumn> columns;

  [[nodiscard]] const SweepColumn& column(int n, double alpha, double beta_k) const;
};

/// Columns for every (N, alpha) pair. The floor is 0.8 times the alpha = 1
/// first eigenvalue on the same mesh.
[[nodiscard]] SweepReport run_spurious_sweep(const ExperimentConfig& config);
/// Columns for every (N, beta_K) pair at the first alpha. The floor is 0.9
/// times the beta_K = 0 first eigenvalue on the same mesh.
[[nodiscard]] SweepReport run_mass_stab_sweep(const ExperimentConfig& config);

/// Divergence-free manufactured solution on the unit square:
/// u = curl(x^2 (1-x)^2 y^2 (1-y)^2), p = x - 1/2.
struct ManufacturedSolution {
  Point convection{1.0, 0.0};
  double viscosity = 1.0;

  [[nodiscard]] Point velocity(const Point& x) const;
  /// Rows are the gradients of the two components.
  [[nodiscard]] Eigen::Matrix2d velocity_gradient(const Point& x) const;
  [[nodiscard]] double pressure(const Point& x) const;
  /// -nu Lap u + (beta . grad) u + grad p
  [[nodiscard]] Point load(const Point& x) const;
};

struct SourceReport {
  ExperimentConfig config;
  std::vector<double> h;
  std::vector<double> velocity_h1;  ///< |u - Pi_nabla u_h|_{1,h}
  std::vector<double> velocity_l2;  ///< ||u - Pi0 u_h||_0
  std::vector<double> pressure_l2;  ///< ||p - p_h||_0
  std::vector<double> div_residual;
  double rate_h1 = 0.0;
  double rate_l2 = 0.0;
  double rate_pressure = 0.0;
};

/// Clamped unit square with the manufactured load; uses config.n_list, the
/// first alpha and beta_K, and config.viscosity / convection.
[[nodiscard]] SourceReport run_source_convergence(const ExperimentConfig& config);

/// Discrete inf-sup constant: sqrt of the smallest nonzero eigenvalue of
/// B A^{-1} B^T against the pressure mass, A the symmetric velocity block.
/// Dense; intended for small meshes.
[[nodiscard]] double inf_sup_constant(const PolygonalMesh& mesh, double alpha = 1.0);

/// Formats a number at 6 significant digits; complex values with a
/// non-negligible imaginary part as "re+imi".
[[nodiscard]] std::string format_value(double value);
[[nodiscard]] std::string format_value(Complex value);

/// Header "lambda_i,N<n>...,order,extr,reference", one row per tracked
/// eigenvalue.
[[nodiscard]] std::string convergence_csv(const ConvergenceReport& report);
[[nodiscard]] std::string convergence_json(const ConvergenceReport& report);
[[nodiscard]] ConvergenceReport convergence_from_json(const std::string& text);

/// Header "lambda_i,<column label>...", then a "flagged" row.
[[nodiscard]] std::string sweep_csv(const SweepReport& report);
[[nodiscard]] std::string sweep_json(const SweepReport& report);
[[nodiscard]] SweepReport sweep_from_json(const std::string& text);

/// Header "N,h,velocity_h1,velocity_l2,pressure_l2,div_residual", then a
/// "rate" row.
[[nodiscard]] std::string source_csv(const SourceReport& report);
[[nodiscard]] std::string source_json(const SourceReport& report);
[[nodiscard]] SourceReport source_from_json(const std::string& text);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Runs config.experiment and writes <experiment>.csv and <experiment>.json
/// into config.out_dir. Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config);

}  // namespace ovem
