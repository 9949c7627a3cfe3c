#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ovem/harness.hpp"
#include "ovem/mesh_io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ovem::Rectangle parse_domain(const std::vector<double>& d) {
  if (d.size() != 4) throw std::invalid_argument("--domain needs x_min,y_min,x_max,y_max");
  return ovem::Rectangle{d[0], d[1], d[2], d[3]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonconforming virtual element solver for the Oseen eigenvalue problem"};
  app.require_subcommand(1);

  auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
  mesh_cmd->require_subcommand(1);
  auto* gen = mesh_cmd->add_subcommand("gen", "Generate a mesh and write it as JSON or OFF");
  std::string gen_family = "quad";
  int gen_n = 8;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  std::vector<double> gen_domain{0.0, 0.0, 1.0, 1.0};
  gen->add_option("--family", gen_family, "quad|trap|hex|voronoi|lshape|lshape5|lshape6")->capture_default_str();
  gen->add_option("--n", gen_n, "Cells per side")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed for the Voronoi families")->capture_default_str();
  gen->add_option("--domain", gen_domain, "x_min,y_min,x_max,y_max")->delimiter(',')->expected(4);
  gen->add_option("--out", gen_out, "Output path (.off for OFF, JSON otherwise)")->required();

  auto* run = app.add_subcommand("run", "Run an experiment and write <experiment>.csv and .json");
  std::string experiment, family, bc, config_path, out_dir;
  std::vector<int> n_list;
  std::vector<double> alpha, beta_k, domain;
  std::vector<std::string> sides;
  int nev = 0;
  double shift = 0.0;
  run->add_option("--experiment", experiment, "table1|table2|spurious|mass-stab|source");
  run->add_option("--mesh", family, "quad|trap|hex|voronoi|lshape5|lshape6");
  run->add_option("--n", n_list, "Comma-separated N list (h = 1/N)")->delimiter(',');
  run->add_option("--alpha", alpha, "Stiffness stabilization scaling(s)")->delimiter(',');
  run->add_option("--beta-k", beta_k, "Mass stabilization scaling(s)")->delimiter(',');
  run->add_option("--nev", nev, "Number of eigenvalues")->check(CLI::PositiveNumber);
  run->add_option("--shift", shift, "Shift of the shift-invert solver");
  run->add_option("--bc", bc, "clamped|mixed");
  run->add_option("--dirichlet-sides", sides, "Dirichlet sides for mixed conditions")->delimiter(',');
  run->add_option("--domain", domain, "x_min,y_min,x_max,y_max")->delimiter(',')->expected(4);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--config", config_path, "JSON config; explicit flags take precedence")->check(CLI::ExistingFile);

  auto* exp = app.add_subcommand("export", "Write the pencil matrices as sparse triplets");
  std::string exp_family = "quad", exp_bc = "clamped", exp_out = ".";
  int exp_n = 8;
  double exp_alpha = 1.0, exp_beta = 0.0;
  std::vector<double> exp_domain{-1.0, -1.0, 1.0, 1.0};
  exp->add_option("--mesh", exp_family, "Mesh family")->capture_default_str();
  exp->add_option("--n", exp_n, "Cells per side")->capture_default_str()->check(CLI::PositiveNumber);
  exp->add_option("--alpha", exp_alpha, "Stiffness stabilization scaling")->capture_default_str();
  exp->add_option("--beta-k", exp_beta, "Mass stabilization scaling")->capture_default_str();
  exp->add_option("--bc", exp_bc, "clamped|mixed")->capture_default_str();
  exp->add_option("--domain", exp_domain, "x_min,y_min,x_max,y_max")->delimiter(',')->expected(4);
  exp->add_option("--out", exp_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto mesh =
          ovem::generate_mesh(ovem::parse_mesh_family(gen_family), gen_n, parse_domain(gen_domain), gen_seed);
      ovem::export_mesh(mesh, gen_out, ovem::format_from_extension(gen_out));
      std::cout << "wrote " << gen_out << " (" << mesh.num_cells() << " cells, " << mesh.num_edges()
                << " edges)\n";
      return 0;
    }

    if (run->parsed()) {
      std::string config_text;
      if (!config_path.empty()) {
        config_text = read_file(config_path);
        if (experiment.empty()) {
          const auto probe = ovem::config_from_json(config_text, ovem::ExperimentConfig{});
          experiment = ovem::to_string(probe.experiment);
        }
      }
      if (experiment.empty()) throw std::invalid_argument("--experiment is required (or set it in --config)");
      const ovem::Experiment kind = ovem::parse_experiment(experiment);
      ovem::ExperimentConfig config = ovem::default_config(kind);
      if (!config_text.empty()) config = ovem::config_from_json(config_text, config);
      config.experiment = kind;
      if (!family.empty()) config.family = ovem::parse_mesh_family(family);
      if (!n_list.empty()) config.n_list = n_list;
      if (!alpha.empty()) config.alpha_list = alpha;
      if (!beta_k.empty()) config.beta_k_list = beta_k;
      if (nev > 0) config.nev = nev;
      if (run->count("--shift") > 0) config.shift = shift;
      if (!bc.empty()) config.bc = ovem::parse_boundary_condition(bc);
      if (!sides.empty()) {
        config.dirichlet_sides.clear();
        for (const auto& s : sides) config.dirichlet_sides.push_back(ovem::parse_side(s));
      }
      if (!domain.empty()) config.domain = parse_domain(domain);
      if (!out_dir.empty()) config.out_dir = out_dir;
      config.validate();
      const auto paths = ovem::run_experiment(config);
      std::cout << read_file(paths.front().string());
      for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
      return 0;
    }

    if (exp->parsed()) {
      ovem::ExperimentConfig config;
      config.family = ovem::parse_mesh_family(exp_family);
      config.bc = ovem::parse_boundary_condition(exp_bc);
      config.domain = parse_domain(exp_domain);
      const auto mesh = ovem::make_mesh(config, exp_n);
      const auto pencil = ovem::assemble(mesh, ovem::make_assembly_params(config, exp_alpha, exp_beta));
      const std::filesystem::path dir(exp_out);
      std::filesystem::create_directories(dir);
      ovem::write_triplets((dir / "left.txt").string(), pencil.left());
      ovem::write_triplets((dir / "right.txt").string(), pencil.right());
      std::cout << "wrote " << (dir / "left.txt").string() << " and " << (dir / "right.txt").string() << " ("
                << pencil.size() << " unknowns)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
