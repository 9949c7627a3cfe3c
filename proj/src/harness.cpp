#include "ovem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "ovem/quadrature.hpp"

namespace ovem {

using nlohmann::json;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::table1: return "table1";
    case Experiment::table2: return "table2";
    case Experiment::spurious: return "spurious";
    case Experiment::mass_stab: return "mass-stab";
    case Experiment::source: return "source";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "table1") return Experiment::table1;
  if (name == "table2") return Experiment::table2;
  if (name == "spurious") return Experiment::spurious;
  if (name == "mass-stab" || name == "mass_stab") return Experiment::mass_stab;
  if (name == "source") return Experiment::source;
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (expected table1, table2, spurious, mass-stab or source)");
}

std::string to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
  }
  return "unknown";
}

Side parse_side(const std::string& name) {
  if (name == "left") return Side::left;
  if (name == "right") return Side::right;
  if (name == "bottom") return Side::bottom;
  if (name == "top") return Side::top;
  throw std::invalid_argument("unknown side '" + name + "' (expected left, right, bottom or top)");
}

PolygonalMesh apply_mixed_boundary(const PolygonalMesh& mesh, const Rectangle& domain,
                                   const std::vector<Side>& dirichlet_sides) {
  const double tol = 1e-9 * std::max(domain.width(), domain.height());
  auto on_side = [&](const Point& m, Side s) {
    switch (s) {
      case Side::left: return std::abs(m.x() - domain.x_min) < tol;
      case Side::right: return std::abs(m.x() - domain.x_max) < tol;
      case Side::bottom: return std::abs(m.y() - domain.y_min) < tol;
      case Side::top: return std::abs(m.y() - domain.y_max) < tol;
    }
    return false;
  };
  return mesh.with_neumann([&](const Edge& e) {
    return std::none_of(dirichlet_sides.begin(), dirichlet_sides.end(),
                        [&](Side s) { return on_side(e.midpoint, s); });
  });
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw std::invalid_argument("N list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] <= 0) throw std::invalid_argument("N values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("N list must be strictly increasing");
  }
  if (alpha_list.empty()) throw std::invalid_argument("alpha list is empty");
  if (beta_k_list.empty()) throw std::invalid_argument("beta_K list is empty");
  if (nev <= 0) throw std::invalid_argument("nev must be positive");
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (bc == BoundaryCondition::mixed) {
    if (is_lshape(family)) throw std::invalid_argument("mixed boundary conditions need a rectangular domain");
    if (dirichlet_sides.empty()) throw std::invalid_argument("mixed boundary conditions need a Dirichlet side");
  }
}

ExperimentConfig default_config(Experiment experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::table1:
      c.family = MeshFamily::quad;
      c.n_list = {8, 16, 32, 64};
      c.nev = 4;
      c.reference = {13.6096, 23.1297, 23.4230, 32.2981};
      break;
    case Experiment::table2:
      c.family = MeshFamily::lshape_structured;
      c.n_list = {16, 32, 64};
      c.nev = 4;
      c.reference = {33.0306, 37.1106, 42.4023, 49.2552};
      break;
    case Experiment::spurious:
      c.family = MeshFamily::trapezoidal;
      c.domain = Rectangle{0.0, 0.0, 1.0, 1.0};
      c.n_list = {16};
      c.alpha_list = {1.0 / 32, 1.0 / 16, 1.0 / 4, 1.0, 4.0, 16.0, 32.0};
      c.beta_k_list = {1.0};
      c.bc = BoundaryCondition::mixed;
      c.check_adjoint = false;
      break;
    case Experiment::mass_stab:
      c.family = MeshFamily::quad;
      c.n_list = {32, 64};
      c.beta_k_list = {0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
      c.check_adjoint = false;
      break;
    case Experiment::source:
      c.family = MeshFamily::voronoi;
      c.domain = Rectangle{0.0, 0.0, 1.0, 1.0};
      c.n_list = {8, 16, 32, 64};
      c.check_adjoint = false;
      break;
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["experiment"] = to_string(c.experiment);
  doc["mesh"] = to_string(c.family);
  doc["domain"] = {c.domain.x_min, c.domain.y_min, c.domain.x_max, c.domain.y_max};
  doc["n"] = c.n_list;
  doc["viscosity"] = c.viscosity;
  doc["convection"] = {c.convection.x(), c.convection.y()};
  doc["alpha"] = c.alpha_list;
  doc["beta_k"] = c.beta_k_list;
  doc["bc"] = to_string(c.bc);
  json sides = json::array();
  for (Side s : c.dirichlet_sides) sides.push_back(to_string(s));
  doc["dirichlet_sides"] = sides;
  doc["nev"] = c.nev;
  doc["shift"] = c.shift;
  doc["tol"] = c.tol;
  doc["seed"] = c.seed;
  doc["check_adjoint"] = c.check_adjoint;
  doc["reference"] = c.reference;
  doc["out_dir"] = c.out_dir;
  return doc.dump(2);
}

namespace {

ExperimentConfig config_from(const json& doc, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  if (doc.contains("experiment")) c.experiment = parse_experiment(doc["experiment"].get<std::string>());
  if (doc.contains("mesh")) c.family = parse_mesh_family(doc["mesh"].get<std::string>());
  if (doc.contains("domain")) {
    const auto d = doc["domain"].get<std::vector<double>>();
    if (d.size() != 4) throw std::invalid_argument("domain needs [x_min, y_min, x_max, y_max]");
    c.domain = Rectangle{d[0], d[1], d[2], d[3]};
  }
  if (doc.contains("n")) c.n_list = doc["n"].get<std::vector<int>>();
  if (doc.contains("viscosity")) c.viscosity = doc["viscosity"].get<double>();
  if (doc.contains("convection")) {
    const auto b = doc["convection"].get<std::vector<double>>();
    if (b.size() != 2) throw std::invalid_argument("convection needs [bx, by]");
    c.convection = Point(b[0], b[1]);
  }
  if (doc.contains("alpha")) c.alpha_list = doc["alpha"].get<std::vector<double>>();
  if (doc.contains("beta_k")) c.beta_k_list = doc["beta_k"].get<std::vector<double>>();
  if (doc.contains("bc")) c.bc = parse_boundary_condition(doc["bc"].get<std::string>());
  if (doc.contains("dirichlet_sides")) {
    c.dirichlet_sides.clear();
    for (const auto& s : doc["dirichlet_sides"]) c.dirichlet_sides.push_back(parse_side(s.get<std::string>()));
  }
  if (doc.contains("nev")) c.nev = doc["nev"].get<int>();
  if (doc.contains("shift")) c.shift = doc["shift"].get<double>();
  if (doc.contains("tol")) c.tol = doc["tol"].get<double>();
  if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("check_adjoint")) c.check_adjoint = doc["check_adjoint"].get<bool>();
  if (doc.contains("reference")) c.reference = doc["reference"].get<std::vector<double>>();
  if (doc.contains("out_dir")) c.out_dir = doc["out_dir"].get<std::string>();
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  return config_from(json::parse(text), base);
}

int cells_per_side(const ExperimentConfig& config, int n) {
  if (n < 1) throw std::invalid_argument("mesh parameter N must be positive");
  // the L-shape lives in (-1,1)^2 whatever the configured rectangle says
  const double width = is_lshape(config.family) ? 2.0 : config.domain.width();
  const double cells = n * width;
  const double rounded = std::round(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * cells) {
    throw std::invalid_argument("N times the domain width must be a positive integer");
  }
  return static_cast<int>(rounded);
}

PolygonalMesh make_mesh(const ExperimentConfig& config, int n) {
  PolygonalMesh mesh = generate_mesh(config.family, cells_per_side(config, n), config.domain, config.seed);
  if (config.bc == BoundaryCondition::mixed) return apply_mixed_boundary(mesh, config.domain, config.dirichlet_sides);
  return mesh;
}

AssemblyParams make_assembly_params(const ExperimentConfig& config, double alpha, double beta_k) {
  AssemblyParams p;
  p.viscosity = config.viscosity;
  const Point b = config.convection;
  p.convection = [b](const Point&) { return b; };
  p.alpha = alpha;
  p.beta_mass = beta_k;
  p.bc = config.bc;
  return p;
}

namespace {

struct LinearFit {
  double extrapolated = 0.0;
  double constant = 0.0;
  double residual = 0.0;
};

LinearFit fit_linear(const std::vector<double>& h, const std::vector<double>& y, double order) {
  const std::size_t n = h.size();
  std::vector<double> x(n);
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::pow(h[i], order);
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  LinearFit f;
  f.constant = sxx > 0.0 ? sxy / sxx : 0.0;
  f.extrapolated = ym - f.constant * xm;
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.extrapolated - f.constant * x[i];
    r2 += r * r;
  }
  f.residual = std::sqrt(r2);
  return f;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& lambda) {
  if (h.size() != lambda.size()) throw std::invalid_argument("fit_rate: h and lambda sizes differ");
  if (h.size() < 3) throw std::invalid_argument("fit_rate needs at least 3 samples");
  for (double v : h) {
    if (!(v > 0.0)) throw std::invalid_argument("fit_rate: mesh sizes must be positive");
  }
  constexpr double lo = 0.5, hi = 4.0, step = 0.01;
  const int steps = static_cast<int>(std::lround((hi - lo) / step));
  int best = 0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double r = fit_linear(h, lambda, lo + step * k).residual;
    if (r < best_res) {
      best_res = r;
      best = k;
    }
  }
  double a = std::max(lo, lo + step * (best - 1));
  double b = std::min(hi, lo + step * (best + 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fit_linear(h, lambda, c).residual, fd = fit_linear(h, lambda, d).residual;
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fit_linear(h, lambda, c).residual;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fit_linear(h, lambda, d).residual;
    }
  }
  double order = 0.5 * (a + b);
  LinearFit lf = fit_linear(h, lambda, order);
  if (best_res < lf.residual) {
    order = lo + step * best;
    lf = fit_linear(h, lambda, order);
  }

  RateFit fit;
  fit.extrapolated = lf.extrapolated;
  fit.constant = lf.constant;
  fit.order = order;
  fit.residual = lf.residual;

  std::vector<std::size_t> idx(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return h[i] < h[j]; });
  bool up = true, down = true;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (lambda[idx[k]] < lambda[idx[k - 1]]) up = false;
    if (lambda[idx[k]] > lambda[idx[k - 1]]) down = false;
  }
  fit.monotone = up || down;

  const auto [mn, mx] = std::minmax_element(lambda.begin(), lambda.end());
  const double scale = std::max(1.0, std::max(std::abs(*mn), std::abs(*mx)));
  const bool flat = (*mx - *mn) <= 1e-12 * scale;
  const bool at_bound = std::abs(order - lo) < 1e-9 || std::abs(order - hi) < 1e-9;
  fit.reliable = !flat && !at_bound && fit.monotone;
  return fit;
}

RateFit fit_rate(const std::vector<double>& h, const std::vector<Complex>& lambda) {
  const bool real = std::all_of(lambda.begin(), lambda.end(), [](Complex z) { return std::abs(z.imag()) < 1e-8; });
  std::vector<double> y;
  y.reserve(lambda.size());
  for (Complex z : lambda) y.push_back(real ? z.real() : std::abs(z));
  return fit_rate(h, y);
}

double log_log_slope(const std::vector<double>& h, const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) throw std::invalid_argument("log_log_slope needs matching samples");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(error[i] > 0.0)) throw std::invalid_argument("log_log_slope needs positive data");
    x.push_back(std::log(h[i]));
    y.push_back(std::log(error[i]));
  }
  const double n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i] / n;
    ym += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  return sxy / sxx;
}

int ConvergenceReport::tracked() const {
  if (eigenvalues.empty()) return 0;
  std::size_t m = eigenvalues.front().size();
  for (const auto& level : eigenvalues) m = std::min(m, level.size());
  return static_cast<int>(m);
}

namespace {

EigenOptions eigen_options(const ExperimentConfig& config) {
  EigenOptions o;
  o.count = config.nev;
  o.shift = Complex(config.shift, 0.0);
  o.tol = config.tol;
  return o;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void fit_report(ConvergenceReport& report) {
  report.fits.assign(static_cast<std::size_t>(report.tracked()), std::nullopt);
  if (report.h.size() < 3) return;
  for (int i = 0; i < report.tracked(); ++i) {
    std::vector<Complex> values;
    for (const auto& level : report.eigenvalues) values.push_back(level[static_cast<std::size_t>(i)]);
    report.fits[static_cast<std::size_t>(i)] = fit_rate(report.h, values);
  }
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& config, ConvergenceReport* partial) {
  config.validate();
  ConvergenceReport report;
  report.config = config;
  const EigenOptions options = eigen_options(config);
  for (int n : config.n_list) {
    try {
      const PolygonalMesh mesh = make_mesh(config, n);
      const GlobalPencil pencil = assemble(mesh, make_assembly_params(config, config.alpha_list.front(),
                                                                      config.beta_k_list.front()));
      const EigenResult result = solve_gevp(pencil, options);
      double mismatch = nan_value;
      if (config.check_adjoint) {
        const EigenResult adjoint = solve_gevp(assemble_adjoint(pencil), options);
        mismatch = conjugate_mismatch(result.eigenvalues, adjoint.eigenvalues);
      }
      report.h.push_back(1.0 / n);
      report.eigenvalues.push_back(result.eigenvalues);
      report.adjoint_mismatch.push_back(mismatch);
      report.max_residual.push_back(max_of(result.residuals));
      report.max_div_residual.push_back(max_of(result.div_residuals));
    } catch (const std::exception&) {
      if (partial != nullptr) {
        *partial = report;
        fit_report(*partial);
      }
      throw;
    }
  }
  fit_report(report);
  return report;
}

const SweepColumn& SweepReport::column(int n, double alpha, double beta_k) const {
  for (const SweepColumn& c : columns) {
    if (c.n == n && c.alpha == alpha && c.beta_k == beta_k) return c;
  }
  throw std::out_of_range("no sweep column for the requested parameters");
}

namespace {

SweepColumn sweep_column(const PolygonalMesh& mesh, const ExperimentConfig& config, int n, double alpha,
                         double beta_k) {
  const GlobalPencil pencil = assemble(mesh, make_assembly_params(config, alpha, beta_k));
  SweepColumn c;
  c.n = n;
  c.alpha = alpha;
  c.beta_k = beta_k;
  // one stalled column (e.g. a tight cluster of stabilization modes) must not
  // discard the rest of the sweep; the failure is reported in the column
  try {
    const EigenResult result = solve_gevp(pencil, eigen_options(config));
    c.eigenvalues = result.eigenvalues;
    c.max_div_residual = max_of(result.div_residuals);
  } catch (const EigenSolverError& e) {
    c.error = e.what();
  }
  return c;
}

void flag_column(SweepColumn& c, double floor) {
  c.floor = floor;
  c.flagged = static_cast<int>(
      std::count_if(c.eigenvalues.begin(), c.eigenvalues.end(), [&](Complex z) { return std::abs(z) < floor; }));
}

double first_modulus(const SweepColumn& c) {
  if (!c.error.empty()) throw EigenSolverError("reference column failed: " + c.error);
  if (c.eigenvalues.empty()) throw EigenSolverError("no eigenvalue for the reference column");
  return std::abs(c.eigenvalues.front());
}

}  // namespace

SweepReport run_spurious_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepReport report;
  report.config = config;
  const double beta_k = config.beta_k_list.front();
  for (int n : config.n_list) {
    const PolygonalMesh mesh = make_mesh(config, n);
    const SweepColumn reference = sweep_column(mesh, config, n, 1.0, beta_k);
    const double floor = 0.8 * first_modulus(reference);
    for (double alpha : config.alpha_list) {
      SweepColumn c = alpha == 1.0 ? reference : sweep_column(mesh, config, n, alpha, beta_k);
      flag_column(c, floor);
      report.columns.push_back(std::move(c));
    }
  }
  return report;
}

SweepReport run_mass_stab_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepReport report;
  report.config = config;
  const double alpha = config.alpha_list.front();
  for (int n : config.n_list) {
    const PolygonalMesh mesh = make_mesh(config, n);
    const SweepColumn reference = sweep_column(mesh, config, n, alpha, 0.0);
    const double floor = 0.9 * first_modulus(reference);
    for (double beta_k : config.beta_k_list) {
      SweepColumn c = beta_k == 0.0 ? reference : sweep_column(mesh, config, n, alpha, beta_k);
      flag_column(c, floor);
      report.columns.push_back(std::move(c));
    }
  }
  return report;
}

namespace {

// g(t) = t^2 (1 - t)^2 and its derivatives
double g0(double t) { return t * t * (1.0 - t) * (1.0 - t); }
double g1(double t) { return 2.0 * t - 6.0 * t * t + 4.0 * t * t * t; }
double g2(double t) { return 2.0 - 12.0 * t + 12.0 * t * t; }
double g3(double t) { return -12.0 + 24.0 * t; }

}  // namespace

Point ManufacturedSolution::velocity(const Point& p) const {
  const double x = p.x(), y = p.y();
  return Point(g0(x) * g1(y), -g1(x) * g0(y));
}

Eigen::Matrix2d ManufacturedSolution::velocity_gradient(const Point& p) const {
  const double x = p.x(), y = p.y();
  Eigen::Matrix2d g;
  g << g1(x) * g1(y), g0(x) * g2(y), -g2(x) * g0(y), -g1(x) * g1(y);
  return g;
}

double ManufacturedSolution::pressure(const Point& p) const { return p.x() - 0.5; }

Point ManufacturedSolution::load(const Point& p) const {
  const double x = p.x(), y = p.y();
  const Point lap(g2(x) * g1(y) + g0(x) * g3(y), -(g3(x) * g0(y) + g1(x) * g2(y)));
  const Point convective = velocity_gradient(p) * convection;
  return -viscosity * lap + convective + Point(1.0, 0.0);
}

SourceReport run_source_convergence(const ExperimentConfig& config) {
  config.validate();
  SourceReport report;
  report.config = config;
  ExperimentConfig clamped = config;
  clamped.bc = BoundaryCondition::clamped;
  clamped.domain = Rectangle{0.0, 0.0, 1.0, 1.0};
  ManufacturedSolution exact;
  exact.convection = config.convection;
  exact.viscosity = config.viscosity;
  const VectorField f = [&](const Point& x) { return exact.load(x); };
  constexpr int error_degree = 8;
  for (int n : config.n_list) {
    const PolygonalMesh mesh = make_mesh(clamped, n);
    const GlobalPencil pencil =
        assemble(mesh, make_assembly_params(clamped, config.alpha_list.front(), config.beta_k_list.front()));
    const SourceSolution s = solve_source(pencil, load_vector(mesh, pencil.dofs, f));
    const Eigen::VectorXd edge_values = extend_to_edges(pencil.dofs, s.velocity);
    double e1 = 0.0, e0 = 0.0, ep = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const LocalElement el = make_local_element(mesh, c);
      const LocalProjectors proj = build_projectors(el);
      const Eigen::VectorXd uh = gather_local(el, edge_values);
      const Eigen::VectorXd nabla = proj.pi_nabla * uh;
      const Eigen::VectorXd zero = proj.pi_zero * uh;
      Eigen::Matrix2d grad_h;
      grad_h << nabla(1), nabla(2), nabla(4), nabla(5);
      grad_h /= el.diameter;
      const QuadratureRule rule = polygon_rule(el.polygon, error_degree);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.points[q];
        const double w = rule.weights[q];
        e1 += w * (exact.velocity_gradient(x) - grad_h).squaredNorm();
        e0 += w * (exact.velocity(x) - el.evaluate(zero, x)).squaredNorm();
        const double dp = exact.pressure(x) - s.pressure(c);
        ep += w * dp * dp;
      }
    }
    report.h.push_back(1.0 / n);
    report.velocity_h1.push_back(std::sqrt(e1));
    report.velocity_l2.push_back(std::sqrt(e0));
    report.pressure_l2.push_back(std::sqrt(ep));
    const double norm = s.velocity.norm();
    report.div_residual.push_back(norm > 0.0 ? (pencil.b * s.velocity).norm() / norm : 0.0);
  }
  if (report.h.size() >= 2) {
    report.rate_h1 = log_log_slope(report.h, report.velocity_h1);
    report.rate_l2 = log_log_slope(report.h, report.velocity_l2);
    report.rate_pressure = log_log_slope(report.h, report.pressure_l2);
  }
  return report;
}

double inf_sup_constant(const PolygonalMesh& mesh, double alpha) {
  AssemblyParams params;
  params.convection = [](const Point&) { return Point(0.0, 0.0); };
  params.alpha = alpha;
  const GlobalPencil pencil = assemble(mesh, params);
  const Eigen::MatrixXd a = Eigen::MatrixXd(pencil.a_sym);
  const Eigen::MatrixXd b = Eigen::MatrixXd(pencil.b);
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("velocity block is not positive definite");
  const Eigen::MatrixXd schur = b * llt.solve(b.transpose());
  Eigen::VectorXd inv_sqrt_area(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) inv_sqrt_area(c) = 1.0 / std::sqrt(mesh.geometry(c).area);
  const Eigen::MatrixXd scaled = inv_sqrt_area.asDiagonal() * schur * inv_sqrt_area.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  // the constant pressure spans the kernel of B^T
  return std::sqrt(std::max(0.0, eig.eigenvalues()(1)));
}

std::string format_value(double value) {
  if (std::isnan(value)) return "";
  std::ostringstream s;
  s << std::setprecision(6) << value;
  return s.str();
}

std::string format_value(Complex value) {
  if (std::abs(value.imag()) <= 1e-8 * std::max(1.0, std::abs(value))) return format_value(value.real());
  std::ostringstream s;
  s << std::setprecision(6) << value.real() << (value.imag() < 0.0 ? "-" : "+") << std::abs(value.imag()) << 'i';
  return s.str();
}

namespace {

json complex_list(const std::vector<Complex>& v) {
  json out = json::array();
  for (Complex z : v) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> complex_list(const json& j) {
  std::vector<Complex> out;
  for (const auto& z : j) out.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return out;
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double nullable(const json& j) { return j.is_null() ? nan_value : j.get<double>(); }

json nullable_list(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(nullable(x));
  return out;
}

std::vector<double> nullable_list(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(nullable(x));
  return out;
}

}  // namespace

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "lambda_i";
  for (double h : report.h) out << ",N" << std::lround(1.0 / h);
  out << ",order,extr,reference\n";
  for (int i = 0; i < report.tracked(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out << i + 1;
    for (const auto& level : report.eigenvalues) out << ',' << format_value(level[k]);
    const auto& fit = report.fits.size() > k ? report.fits[k] : std::nullopt;
    out << ',' << (fit ? format_value(fit->order) : "") << ',' << (fit ? format_value(fit->extrapolated) : "");
    out << ',' << (k < report.config.reference.size() ? format_value(report.config.reference[k]) : "") << '\n';
  }
  return out.str();
}

std::string convergence_json(const ConvergenceReport& report) {
  json doc;
  doc["config"] = json::parse(config_to_json(report.config));
  doc["h"] = report.h;
  json levels = json::array();
  for (const auto& level : report.eigenvalues) levels.push_back(complex_list(level));
  doc["eigenvalues"] = levels;
  json fits = json::array();
  for (const auto& f : report.fits) {
    if (!f) {
      fits.push_back(nullptr);
      continue;
    }
    fits.push_back({{"extrapolated", f->extrapolated},
                    {"constant", f->constant},
                    {"order", f->order},
                    {"residual", f->residual},
                    {"monotone", f->monotone},
                    {"reliable", f->reliable}});
  }
  doc["fits"] = fits;
  doc["adjoint_mismatch"] = nullable_list(report.adjoint_mismatch);
  doc["max_residual"] = report.max_residual;
  doc["max_div_residual"] = report.max_div_residual;
  return doc.dump(2);
}

ConvergenceReport convergence_from_json(const std::string& text) {
  const json doc = json::parse(text);
  ConvergenceReport r;
  r.config = config_from(doc.at("config"), ExperimentConfig{});
  r.h = doc.at("h").get<std::vector<double>>();
  for (const auto& level : doc.at("eigenvalues")) r.eigenvalues.push_back(complex_list(level));
  for (const auto& f : doc.at("fits")) {
    if (f.is_null()) {
      r.fits.emplace_back(std::nullopt);
      continue;
    }
    RateFit fit;
    fit.extrapolated = f.at("extrapolated").get<double>();
    fit.constant = f.at("constant").get<double>();
    fit.order = f.at("order").get<double>();
    fit.residual = f.at("residual").get<double>();
    fit.monotone = f.at("monotone").get<bool>();
    fit.reliable = f.at("reliable").get<bool>();
    r.fits.emplace_back(fit);
  }
  r.adjoint_mismatch = nullable_list(doc.at("adjoint_mismatch"));
  r.max_residual = doc.at("max_residual").get<std::vector<double>>();
  r.max_div_residual = doc.at("max_div_residual").get<std::vector<double>>();
  return r;
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "lambda_i";
  std::size_t rows = 0;
  for (const SweepColumn& c : report.columns) {
    out << ",N" << c.n << "_alpha" << format_value(c.alpha) << "_betaK" << format_value(c.beta_k);
    rows = std::max(rows, c.eigenvalues.size());
  }
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1;
    for (const SweepColumn& c : report.columns) {
      out << ',' << (i < c.eigenvalues.size() ? format_value(c.eigenvalues[i]) : "");
    }
    out << '\n';
  }
  out << "floor";
  for (const SweepColumn& c : report.columns) out << ',' << format_value(c.floor);
  out << "\nflagged";
  for (const SweepColumn& c : report.columns) out << ',' << c.flagged;
  out << "\nstatus";
  for (const SweepColumn& c : report.columns) out << ',' << (c.error.empty() ? "ok" : "not converged");
  out << '\n';
  return out.str();
}

std::string sweep_json(const SweepReport& report) {
  json doc;
  doc["config"] = json::parse(config_to_json(report.config));
  json cols = json::array();
  for (const SweepColumn& c : report.columns) {
    cols.push_back({{"n", c.n},
                    {"alpha", c.alpha},
                    {"beta_k", c.beta_k},
                    {"eigenvalues", complex_list(c.eigenvalues)},
                    {"floor", c.floor},
                    {"flagged", c.flagged},
                    {"max_div_residual", c.max_div_residual},
                    {"error", c.error}});
  }
  doc["columns"] = cols;
  return doc.dump(2);
}

SweepReport sweep_from_json(const std::string& text) {
  const json doc = json::parse(text);
  SweepReport r;
  r.config = config_from(doc.at("config"), ExperimentConfig{});
  for (const auto& j : doc.at("columns")) {
    SweepColumn c;
    c.n = j.at("n").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.beta_k = j.at("beta_k").get<double>();
    c.eigenvalues = complex_list(j.at("eigenvalues"));
    c.floor = j.at("floor").get<double>();
    c.flagged = j.at("flagged").get<int>();
    c.max_div_residual = j.at("max_div_residual").get<double>();
    c.error = j.value("error", std::string());
    r.columns.push_back(std::move(c));
  }
  return r;
}

std::string source_csv(const SourceReport& report) {
  std::ostringstream out;
  out << "N,h,velocity_h1,velocity_l2,pressure_l2,div_residual\n";
  for (std::size_t i = 0; i < report.h.size(); ++i) {
    out << std::lround(1.0 / report.h[i]) << ',' << format_value(report.h[i]) << ','
        << format_value(report.velocity_h1[i]) << ',' << format_value(report.velocity_l2[i]) << ','
        << format_value(report.pressure_l2[i]) << ',' << format_value(report.div_residual[i]) << '\n';
  }
  out << "rate,," << format_value(report.rate_h1) << ',' << format_value(report.rate_l2) << ','
      << format_value(report.rate_pressure) << ",\n";
  return out.str();
}

std::string source_json(const SourceReport& report) {
  json doc;
  doc["config"] = json::parse(config_to_json(report.config));
  doc["h"] = report.h;
  doc["velocity_h1"] = report.velocity_h1;
  doc["velocity_l2"] = report.velocity_l2;
  doc["pressure_l2"] = report.pressure_l2;
  doc["div_residual"] = report.div_residual;
  doc["rate_h1"] = report.rate_h1;
  doc["rate_l2"] = report.rate_l2;
  doc["rate_pressure"] = report.rate_pressure;
  return doc.dump(2);
}

SourceReport source_from_json(const std::string& text) {
  const json doc = json::parse(text);
  SourceReport r;
  r.config = config_from(doc.at("config"), ExperimentConfig{});
  r.h = doc.at("h").get<std::vector<double>>();
  r.velocity_h1 = doc.at("velocity_h1").get<std::vector<double>>();
  r.velocity_l2 = doc.at("velocity_l2").get<std::vector<double>>();
  r.pressure_l2 = doc.at("pressure_l2").get<std::vector<double>>();
  r.div_residual = doc.at("div_residual").get<std::vector<double>>();
  r.rate_h1 = doc.at("rate_h1").get<double>();
  r.rate_l2 = doc.at("rate_l2").get<double>();
  r.rate_pressure = doc.at("rate_pressure").get<double>();
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  const std::string stem = to_string(config.experiment);
  std::string csv, doc;
  switch (config.experiment) {
    case Experiment::table1:
    case Experiment::table2: {
      const ConvergenceReport r = run_convergence(config);
      csv = convergence_csv(r);
      doc = convergence_json(r);
      break;
    }
    case Experiment::spurious: {
      const SweepReport r = run_spurious_sweep(config);
      csv = sweep_csv(r);
      doc = sweep_json(r);
      break;
    }
    case Experiment::mass_stab: {
      const SweepReport r = run_mass_stab_sweep(config);
      csv = sweep_csv(r);
      doc = sweep_json(r);
      break;
    }
    case Experiment::source: {
      const SourceReport r = run_source_convergence(config);
      csv = source_csv(r);
      doc = source_json(r);
      break;
    }
  }
  const std::vector<std::filesystem::path> paths{dir / (stem + ".csv"), dir / (stem + ".json")};
  write_text(paths[0], csv);
  write_text(paths[1], doc);
  return paths;
}

}  // namespace ovem
