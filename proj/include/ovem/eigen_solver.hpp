#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovem/assembly.hpp"

namespace ovem {

using Complex = std::complex<double>;

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenResult {
  std::vector<Complex> eigenvalues;     ///< ascending modulus, conjugate pairs adjacent
  std::vector<Eigen::VectorXcd> velocity;
  std::vector<Eigen::VectorXcd> pressure;
  std::vector<double> residuals;        ///< |A x - lambda M x| / |M x|
  std::vector<double> div_residuals;    ///< |B u| / |u|
  std::string method;                   ///< "shift-invert" or "qz"
  Complex shift{1.0, 0.0};
  int iterations = 0;
};

enum class EigenMethod { automatic, shift_invert, dense_qz };

struct EigenOptions {
  int count = 10;
  Complex shift{1.0, 0.0};
  double tol = 1e-12;        ///< Ritz residual tolerance relative to |theta|
  int max_restarts = 200;
  /// Pencil residual |Ax - lambda Mx| / |Mx| that Ritz pairs left unconverged
  /// after max_restarts must still meet; otherwise solve_gevp throws.
  double residual_tol = 1e-8;
  EigenMethod method = EigenMethod::automatic;
  int dense_threshold = 500;  ///< automatic picks QZ below this size
  unsigned seed = 12345;
};

/// Finite eigenvalues of left() x = lambda right() x nearest the shift.
[[nodiscard]] EigenResult solve_gevp(const GlobalPencil& pencil, const EigenOptions& options = {});

struct SourceSolution {
  Eigen::VectorXd velocity;  ///< free velocity DOFs
  Eigen::VectorXd pressure;
  double multiplier = 0.0;
};

/// Solves the saddle-point system left() [u; p; mu] = [rhs; 0; 0].
[[nodiscard]] SourceSolution solve_source(const GlobalPencil& pencil, const Eigen::VectorXd& rhs);

/// Greedy matching of `b` against the conjugates of `a`; returns the largest
/// relative distance |conj(a_i) - b_j| / max(1, |a_i|), or infinity when the
/// sizes differ.
[[nodiscard]] double conjugate_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// JSON serialization of eigenvalues, residuals and metadata (vectors omitted
/// unless requested).
[[nodiscard]] std::string eigen_result_json(const EigenResult& result, bool with_vectors = false);
[[nodiscard]] EigenResult eigen_result_from_json(const std::string& text);

}  // namespace ovem
