#include "ovem/eigen_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <json.hpp>

namespace ovem {

namespace {

using ComplexSparse = Eigen::SparseMatrix<Complex>;

constexpr double infinite_threshold = 1e8;
constexpr double null_mass_threshold = 1e-12;

Eigen::VectorXcd apply_real(const SparseMatrix& m, const Eigen::VectorXcd& x) {
  const Eigen::VectorXd re = m * x.real();
  const Eigen::VectorXd im = m * x.imag();
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

template <class Op>
Eigen::MatrixXcd apply_block(const Op& op, const Eigen::MatrixXcd& q) {
  Eigen::MatrixXcd out(q.rows(), q.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j) out.col(j) = op(Eigen::VectorXcd(q.col(j)));
  return out;
}

// LU of a saddle-point matrix whose last row and column are the zero-mean
// multiplier border. That border is dense over the pressures and wrecks the
// fill-reducing ordering, so when the constant pressure z spans the null space of
// the border-free block K0 (both sides), we factor K0 with one pressure pinned
// and recover the multiplier and the z-component in closed form:
//   mu = z.b / z.c,   K0 x = b - c mu,   c.x = b_q.
// Otherwise the full matrix is factored.
class SaddleFactorization {
 public:
  SaddleFactorization(const SparseMatrix& k, const DofNumbering& dofs) {
    const Eigen::Index n = k.rows();
    if (dofs.has_multiplier && dofs.num_pressure > 0) {
      mult_ = dofs.multiplier_index();
      pin_ = dofs.pressure_offset();
      z_ = Eigen::VectorXd::Zero(n);
      z_.segment(dofs.pressure_offset(), dofs.num_pressure).setOnes();
      const SparseMatrix kt = k.transpose();
      c_ = Eigen::VectorXd(k.col(mult_));
      const Eigen::VectorXd row = Eigen::VectorXd(kt.col(mult_));
      Eigen::VectorXd kz = k * z_;
      Eigen::VectorXd ktz = kt * z_;
      kz(mult_) = 0.0;
      ktz(mult_) = 0.0;
      const double scale = k.norm();
      bordered_ = c_(mult_) == 0.0 && (row - c_).norm() <= 1e-14 * c_.norm() &&
                  kz.norm() <= 1e-12 * scale && ktz.norm() <= 1e-12 * scale;
      cz_ = c_.dot(z_);
      bordered_ = bordered_ && std::abs(cz_) > 0.0;
    }
    if (!bordered_) {
      lu_.compute(k);
      ok_ = lu_.info() == Eigen::Success;
      return;
    }
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(k.nonZeros()));
    for (Eigen::Index j = 0; j < k.outerSize(); ++j) {
      if (j == pin_ || j == mult_) continue;
      for (SparseMatrix::InnerIterator it(k, j); it; ++it) {
        if (it.row() == pin_ || it.row() == mult_) continue;
        entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
      }
    }
    entries.emplace_back(pin_, pin_, 1.0);
    entries.emplace_back(mult_, mult_, 1.0);
    SparseMatrix pinned(n, n);
    pinned.setFromTriplets(entries.begin(), entries.end());
    pinned.makeCompressed();
    lu_.compute(pinned);
    ok_ = lu_.info() == Eigen::Success;
  }

  [[nodiscard]] bool ok() const { return ok_; }

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (!bordered_) return lu_.solve(b);
    const double mu = z_.dot(b) / cz_;
    Eigen::VectorXd r = b - mu * c_;
    r(pin_) = 0.0;
    r(mult_) = 0.0;
    Eigen::VectorXd x = lu_.solve(r);
    x(mult_) = 0.0;
    x += ((b(mult_) - c_.dot(x)) / cz_) * z_;
    x(mult_) = mu;
    return x;
  }

 private:
  Eigen::SparseLU<SparseMatrix> lu_;
  Eigen::VectorXd c_;
  Eigen::VectorXd z_;
  double cz_ = 0.0;
  Eigen::Index pin_ = -1;
  Eigen::Index mult_ = -1;
  bool bordered_ = false;
  bool ok_ = false;
};

// y = (A - sigma M)^{-1} M x, real factorization for a real shift.
class ShiftInvertOperator {
 public:
  ShiftInvertOperator(const SparseMatrix& left, const SparseMatrix& right, const DofNumbering& dofs, Complex sigma)
      : right_(right) {
    if (sigma.imag() == 0.0) {
      SparseMatrix k = left - sigma.real() * right;
      k.makeCompressed();
      real_ = std::make_unique<SaddleFactorization>(k, dofs);
      ok_ = real_->ok();
    } else {
      complex_ = std::make_unique<Eigen::SparseLU<ComplexSparse>>();
      ComplexSparse k = left.cast<Complex>() - sigma * right.cast<Complex>();
      k.makeCompressed();
      complex_->compute(k);
      ok_ = complex_->info() == Eigen::Success;
    }
  }

  [[nodiscard]] bool ok() const { return ok_; }

  [[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const {
    if (real_) {
      // solve into contiguous temporaries: the solvers assume unit stride
      const Eigen::VectorXd re = real_->solve(Eigen::VectorXd(b.real()));
      const Eigen::VectorXd im = real_->solve(Eigen::VectorXd(b.imag()));
      Eigen::VectorXcd out(b.size());
      out.real() = re;
      out.imag() = im;
      return out;
    }
    return complex_->solve(b);
  }

  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return solve(apply_real(right_, x)); }

 private:
  const SparseMatrix& right_;
  std::unique_ptr<SaddleFactorization> real_;
  std::unique_ptr<Eigen::SparseLU<ComplexSparse>> complex_;
  bool ok_ = false;
};

// Swaps diagonal entries i and i+1 of the upper triangular T by a unitary
// rotation, keeping T = U^H H U.
void swap_schur(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u, Eigen::Index i) {
  const Complex a = t(i, i);
  const Complex b = t(i + 1, i + 1);
  Eigen::Vector2cd x(t(i, i + 1), b - a);
  const double nx = x.norm();
  if (nx == 0.0) return;
  x /= nx;
  Eigen::Matrix2cd z;
  z << x(0), -std::conj(x(1)), x(1), std::conj(x(0));
  t.middleRows(i, 2) = z.adjoint() * t.middleRows(i, 2);
  t.middleCols(i, 2) = t.middleCols(i, 2) * z;
  u.middleCols(i, 2) = u.middleCols(i, 2) * z;
  t(i + 1, i) = 0.0;
  t(i, i) = b;
  t(i + 1, i + 1) = a;
}

// Moves the `k` largest-modulus diagonal entries to the top, largest first.
void sort_schur(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u, Eigen::Index k) {
  const Eigen::Index n = t.rows();
  for (Eigen::Index pos = 0; pos < std::min(k, n); ++pos) {
    Eigen::Index best = pos;
    for (Eigen::Index j = pos + 1; j < n; ++j) {
      if (std::abs(t(j, j)) > std::abs(t(best, best))) best = j;
    }
    for (Eigen::Index j = best; j > pos; --j) swap_schur(t, u, j - 1);
  }
}

Eigen::VectorXcd random_start(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), 0.0);
  return v;
}

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct RitzPairs {
  Eigen::MatrixXcd basis;  // orthonormal Schur vectors of the converged block
  Eigen::VectorXcd theta;  // diagonal of the converged Schur factor
  int restarts = 0;
  bool converged = true;
  std::string failure;
};

// Krylov-Schur iteration for the `want` largest-modulus eigenvalues of op.
// `dim` bounds the dimension of the space the iterates live in.
RitzPairs krylov_schur(const LinearMap& op, const Eigen::VectorXcd& start, Eigen::Index dim, int want,
                       Eigen::Index subspace, const EigenOptions& opt) {
  const Eigen::Index n = start.size();
  const Eigen::Index p = std::min<Eigen::Index>(subspace, dim - 1);
  if (p < 1) throw EigenSolverError("pencil too small for Arnoldi");
  want = static_cast<int>(std::min<Eigen::Index>(want, p));
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, p + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(p + 1, p);

  const Eigen::VectorXcd v0 = op(start);
  if (!v0.allFinite() || v0.norm() == 0.0) throw EigenSolverError("shift-invert start vector is degenerate");
  v.col(0) = v0.normalized();

  Eigen::Index k = 0;
  Eigen::Index m = p;  // active dimension, shrinks on breakdown
  RitzPairs out;
  for (int restart = 0;; ++restart) {
    bool breakdown = false;
    for (Eigen::Index j = k; j < p; ++j) {
      Eigen::VectorXcd w = op(v.col(j));
      const double wnorm = w.norm();
      Eigen::VectorXcd coef = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * coef;
      // second pass: full reorthogonalization
      const Eigen::VectorXcd corr = v.leftCols(j + 1).adjoint() * w;
      w.noalias() -= v.leftCols(j + 1) * corr;
      coef += corr;
      h.col(j).head(j + 1) += coef;
      const double beta = w.norm();
      if (beta <= 1e-13 * wnorm) {
        m = j + 1;
        breakdown = true;
        break;
      }
      h(j + 1, j) = beta;
      v.col(j + 1) = w / beta;
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(h.topLeftCorner(m, m));
    Eigen::MatrixXcd t = schur.matrixT();
    Eigen::MatrixXcd u = schur.matrixU();
    const Eigen::Index keep = std::min<Eigen::Index>(m, breakdown ? m : std::max<Eigen::Index>(want + (p - want) / 2, want));
    sort_schur(t, u, keep);
    const Eigen::RowVectorXcd b = breakdown ? Eigen::RowVectorXcd::Zero(m)
                                            : Eigen::RowVectorXcd(h.row(m).head(m) * u);

    int nconv = 0;
    while (nconv < std::min<Eigen::Index>(want, m) &&
           std::abs(b(nconv)) <= opt.tol * std::max(std::abs(t(nconv, nconv)), 1e-300)) {
      ++nconv;
    }
    out.restarts = restart;
    if (nconv >= std::min<Eigen::Index>(want, m) || breakdown || restart >= opt.max_restarts) {
      if (nconv < want && !breakdown) {
        std::ostringstream msg;
        msg << "Krylov-Schur did not converge after " << restart << " restarts (" << nconv << " of " << want
            << " Ritz values converged; worst Ritz residual "
            << b.head(want).cwiseAbs().maxCoeff() << ")";
        out.converged = false;
        out.failure = msg.str();
      }
      const Eigen::Index r = std::min<Eigen::Index>(want, m);
      out.basis = v.leftCols(m) * u.leftCols(r);
      out.theta = t.diagonal().head(r);
      return out;
    }

    // Truncate to the leading `keep` Schur vectors; the residual row becomes b.
    k = keep;
    const Eigen::MatrixXcd vk = v.leftCols(m) * u.leftCols(k);
    const Eigen::VectorXcd next = v.col(m);
    v.leftCols(k) = vk;
    v.col(k) = next;
    h.setZero();
    h.topLeftCorner(k, k) = t.topLeftCorner(k, k).triangularView<Eigen::Upper>();
    h.row(k).head(k) = b.head(k);
    m = p;
  }
}

RitzPairs krylov_schur_with_retry(const LinearMap& op, const Eigen::VectorXcd& start, Eigen::Index dim, int want,
                                  const EigenOptions& opt) {
  const Eigen::Index subspace = std::max(3 * want, want + 20);
  RitzPairs first = krylov_schur(op, start, dim, want, subspace, opt);
  // clustered spectra stall small subspaces; one retry with a wider one
  if (first.converged || subspace >= dim - 1) return first;
  return krylov_schur(op, start, dim, want, 2 * subspace, opt);
}

// Krylov iterates see one copy of a semisimple multiple eigenvalue. Deflating the
// converged invariant subspace Q and restarting from a fresh vector exposes the
// other copies; the check repeats until the largest deflated value falls below
// the smallest wanted one.
Eigen::MatrixXcd deflation_sweep(const LinearMap& op, Eigen::MatrixXcd q, int want, const EigenOptions& opt) {
  const Eigen::Index n = q.rows();
  for (int pass = 0; pass < want && q.cols() < n - 1; ++pass) {
    const Eigen::MatrixXcd qq = q;
    const LinearMap deflated = [&](const Eigen::VectorXcd& x) {
      Eigen::VectorXcd y = op(x - qq * (qq.adjoint() * x));
      y -= qq * (qq.adjoint() * y);
      y -= qq * (qq.adjoint() * y);
      return y;
    };
    Eigen::VectorXcd start = random_start(n, opt.seed + 7919u * static_cast<unsigned>(pass + 1));
    start -= q * (q.adjoint() * start);
    const RitzPairs extra = krylov_schur_with_retry(deflated, start, n - q.cols(), 1, opt);
    if (!extra.converged) break;

    const Eigen::MatrixXcd projected = q.adjoint() * apply_block(op, q);
    const Eigen::VectorXcd current = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(projected, false).eigenvalues();
    const double smallest = current.cwiseAbs().minCoeff();
    if (extra.theta.size() == 0 || std::abs(extra.theta(0)) < (1.0 - 1e-10) * smallest) break;

    Eigen::MatrixXcd grown(n, q.cols() + 1);
    grown << q, extra.basis.col(0);
    q = Eigen::HouseholderQR<Eigen::MatrixXcd>(grown).householderQ() * Eigen::MatrixXcd::Identity(n, grown.cols());
  }
  return q;
}

Eigen::VectorXcd normalize_phase(Eigen::VectorXcd x) {
  x.normalize();
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  const Complex phase = x(imax) / std::abs(x(imax));
  return x / phase;
}

struct Candidate {
  Complex lambda;
  Eigen::VectorXcd x;
};

bool is_finite_mode(const Complex& lambda, const Eigen::VectorXcd& x, const SparseMatrix& right) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) return false;
  if (std::abs(lambda) > infinite_threshold) return false;
  return apply_real(right, x).norm() >= null_mass_threshold * x.norm();
}

EigenResult finish(const GlobalPencil& pencil, const SparseMatrix& left, const SparseMatrix& right,
                   std::vector<Candidate> found, const EigenOptions& opt) {
  // nearest to the shift first, then keep `count`
  std::stable_sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    return std::abs(a.lambda - opt.shift) < std::abs(b.lambda - opt.shift);
  });
  if (static_cast<int>(found.size()) > opt.count) found.resize(static_cast<std::size_t>(opt.count));

  // conjugate-pair closure
  const std::size_t nfound = found.size();
  for (std::size_t i = 0; i < nfound; ++i) {
    const Complex l = found[i].lambda;
    if (std::abs(l.imag()) <= 1e-8 * std::max(1.0, std::abs(l))) continue;
    bool present = false;
    for (const Candidate& c : found) present = present || std::abs(c.lambda - std::conj(l)) <= 1e-8 * std::max(1.0, std::abs(l));
    if (!present) found.push_back({std::conj(l), found[i].x.conjugate()});
  }
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    const double ma = std::abs(a.lambda);
    const double mb = std::abs(b.lambda);
    if (std::abs(ma - mb) > 1e-10 * std::max(ma, mb)) return ma < mb;
    return a.lambda.imag() > b.lambda.imag();
  });

  EigenResult result;
  const int nv = pencil.dofs.num_velocity;
  const int np = pencil.dofs.num_pressure;
  for (Candidate& c : found) {
    const Eigen::VectorXcd x = normalize_phase(c.x);
    const Eigen::VectorXcd mx = apply_real(right, x);
    const Eigen::VectorXcd r = apply_real(left, x) - c.lambda * mx;
    const Eigen::VectorXcd u = x.head(nv);
    result.eigenvalues.push_back(c.lambda);
    result.velocity.push_back(u);
    result.pressure.push_back(x.segment(nv, np));
    result.residuals.push_back(r.norm() / mx.norm());
    result.div_residuals.push_back(apply_real(pencil.b, u).norm() / u.norm());
  }
  result.shift = opt.shift;
  return result;
}

EigenResult solve_dense(const GlobalPencil& pencil, const SparseMatrix& left, const SparseMatrix& right,
                        const EigenOptions& opt) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(left);
  const Eigen::MatrixXd m = Eigen::MatrixXd(right);
  // RealQZ draws exceptional shifts from std::rand; reseed for reproducible output.
  std::srand(opt.seed);
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> qz(a, m, false);
  if (qz.info() != Eigen::Success) throw EigenSolverError("QZ iteration failed");
  const Eigen::VectorXcd alphas = qz.alphas();
  const Eigen::VectorXd betas = qz.betas();
  std::vector<Candidate> found;
  const Eigen::MatrixXcd ac = a.cast<Complex>();
  const Eigen::MatrixXcd mc = m.cast<Complex>();
  const Eigen::VectorXcd start = random_start(a.rows(), opt.seed);
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    if (betas(i) == 0.0) continue;
    const Complex lambda = alphas(i) / betas(i);
    if (std::abs(lambda) > infinite_threshold) continue;
    // eigenvector by inverse iteration at a slightly perturbed shift
    const Complex mu = lambda + Complex(1e-10 * (1.0 + std::abs(lambda)), 0.0);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ac - mu * mc);
    Eigen::VectorXcd x = start;
    for (int it = 0; it < 3; ++it) x = lu.solve(mc * x).normalized();
    if (!x.allFinite() || !is_finite_mode(lambda, x, right)) continue;
    found.push_back({lambda, x});
  }
  EigenResult result = finish(pencil, left, right, std::move(found), opt);
  result.method = "qz";
  return result;
}

}  // namespace

EigenResult solve_gevp(const GlobalPencil& pencil, const EigenOptions& options) {
  if (options.count < 1) throw std::invalid_argument("eigenvalue count must be positive");
  const SparseMatrix left = pencil.left();
  const SparseMatrix right = pencil.right();
  const bool dense = options.method == EigenMethod::dense_qz ||
                     (options.method == EigenMethod::automatic && pencil.size() < options.dense_threshold);
  if (dense) return solve_dense(pencil, left, right, options);

  EigenOptions opt = options;
  for (int attempt = 0;; ++attempt) {
    ShiftInvertOperator op(left, right, pencil.dofs, opt.shift);
    if (!op.ok()) {
      if (attempt >= 3) throw EigenSolverError("factorization of the shifted pencil failed after 3 retries");
      opt.shift += Complex(1e-3 * (attempt + 1) * (1.0 + std::abs(opt.shift)), 0.0);
      continue;
    }
    // Ask for a few more Ritz values than needed: some may be infinite modes.
    const int want = opt.count + 2;
    const LinearMap apply = [&op](const Eigen::VectorXcd& x) { return op.apply(x); };
    const RitzPairs ritz = krylov_schur_with_retry(apply, random_start(left.rows(), opt.seed), left.rows(), want, opt);
    const Eigen::MatrixXcd q = deflation_sweep(apply, ritz.basis, want, opt);
    // Rayleigh-Ritz on the (numerically) invariant subspace q
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(q.adjoint() * apply_block(apply, q));
    std::vector<Candidate> found;
    for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) {
      const Complex theta = ces.eigenvalues()(i);
      if (std::abs(theta) == 0.0) continue;
      const Complex lambda = opt.shift + 1.0 / theta;
      const Eigen::VectorXcd x = q * ces.eigenvectors().col(i);
      if (!is_finite_mode(lambda, x, right)) continue;
      found.push_back({lambda, x});
    }
    EigenResult result = finish(pencil, left, right, std::move(found), opt);
    result.method = "shift-invert";
    result.iterations = ritz.restarts;
    if (!ritz.converged) {
      // accept stalled Ritz pairs only when they solve the pencil to residual_tol
      const double worst = result.residuals.empty()
                               ? std::numeric_limits<double>::infinity()
                               : *std::max_element(result.residuals.begin(), result.residuals.end());
      if (!(worst <= opt.residual_tol)) {
        std::ostringstream msg;
        msg << ritz.failure << "; worst pencil residual " << worst;
        throw EigenSolverError(msg.str());
      }
    }
    return result;
  }
}

SourceSolution solve_source(const GlobalPencil& pencil, const Eigen::VectorXd& rhs) {
  const int nv = pencil.dofs.num_velocity;
  const int np = pencil.dofs.num_pressure;
  if (rhs.size() != nv) throw std::invalid_argument("load vector size does not match the velocity DOFs");
  SparseMatrix left = pencil.left();
  left.makeCompressed();
  const SaddleFactorization lu(left, pencil.dofs);
  if (!lu.ok()) {
    throw EigenSolverError(pencil.dofs.has_multiplier
                               ? "saddle-point system is singular"
                               : "saddle-point system is singular (pure Neumann pressure needs a mean constraint)");
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(pencil.size());
  full.head(nv) = rhs;
  const Eigen::VectorXd x = lu.solve(full);
  if (!x.allFinite()) throw EigenSolverError("saddle-point solve produced non-finite values");
  SourceSolution s;
  s.velocity = x.head(nv);
  s.pressure = x.segment(nv, np);
  if (pencil.dofs.has_multiplier) s.multiplier = x(pencil.dofs.multiplier_index());
  return s;
}

double conjugate_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = b.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(std::conj(x) - b[j]);
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, dist / std::max(1.0, std::abs(x)));
  }
  return worst;
}

namespace {

nlohmann::json complex_vector(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

Eigen::VectorXcd complex_vector(const nlohmann::json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = Complex(j[i][0], j[i][1]);
  return v;
}

}  // namespace

std::string eigen_result_json(const EigenResult& result, bool with_vectors) {
  nlohmann::json doc;
  doc["method"] = result.method;
  doc["shift"] = {result.shift.real(), result.shift.imag()};
  doc["iterations"] = result.iterations;
  nlohmann::json values = nlohmann::json::array();
  for (const Complex& l : result.eigenvalues) values.push_back({l.real(), l.imag()});
  doc["eigenvalues"] = values;
  doc["residuals"] = result.residuals;
  doc["div_residuals"] = result.div_residuals;
  if (with_vectors) {
    nlohmann::json vel = nlohmann::json::array();
    nlohmann::json pre = nlohmann::json::array();
    for (const auto& u : result.velocity) vel.push_back(complex_vector(u));
    for (const auto& p : result.pressure) pre.push_back(complex_vector(p));
    doc["velocity"] = vel;
    doc["pressure"] = pre;
  }
  return doc.dump(1);
}

EigenResult eigen_result_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  EigenResult r;
  r.method = doc.at("method").get<std::string>();
  r.shift = Complex(doc.at("shift")[0], doc.at("shift")[1]);
  r.iterations = doc.at("iterations").get<int>();
  for (const auto& l : doc.at("eigenvalues")) r.eigenvalues.emplace_back(l[0], l[1]);
  r.residuals = doc.at("residuals").get<std::vector<double>>();
  r.div_residuals = doc.at("div_residuals").get<std::vector<double>>();
  if (doc.contains("velocity")) {
    for (const auto& u : doc["velocity"]) r.velocity.push_back(complex_vector(u));
    for (const auto& p : doc["pressure"]) r.pressure.push_back(complex_vector(p));
  }
  return r;
}

}  // namespace ovem
