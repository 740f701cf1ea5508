#include "wolff/energy.hpp"
#include "wolff/experiments.hpp"
#include "wolff/kernels.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measure.hpp"
#include "wolff/operators.hpp"
#include "wolff/oscillation.hpp"
#include "wolff/reflectionless.hpp"
#include "wolff/selection.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) wolff::fail_io("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

// Cube codes contain commas; quote them for CSV output.
std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Wolff energies, domination selection, truncated singular integrals, "
               "oscillation coefficients, and reflectionless verification on point-cloud "
               "measures"};
  app.require_subcommand(1);

  // measure gen
  auto* measure = app.add_subcommand("measure", "Measure generation and inspection");
  measure->require_subcommand(1);
  auto* gen = measure->add_subcommand("gen", "Generate a measure from a JSON spec");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "JSON spec file")->required();
  gen->add_option("--out", gen_out, "output measure file")->required();
  gen->callback([&] {
    const wolff::MeasureSpec spec = wolff::MeasureSpec::from_json_text(read_file(gen_spec));
    const wolff::Measure mu = wolff::generate(spec);
    wolff::save_measure_file(gen_out, mu);
    std::cout << "wrote " << gen_out << " (" << mu.size() << " atoms, mass "
              << g17(mu.total_mass()) << ")\n";
  });

  // select
  auto* select = app.add_subcommand("select", "Upward/downward domination selection");
  std::string sel_measure, sel_levels;
  double sel_s = 0.5, sel_eps = 0.1;
  select->add_option("--measure", sel_measure, "measure file")->required();
  select->add_option("--eps", sel_eps, "density growth margin");
  select->add_option("--s", sel_s, "dimension index s");
  select->add_option("--levels", sel_levels, "lattice level range m_min:m_max")->required();
  select->callback([&] {
    const wolff::Measure mu = wolff::load_measure_file(sel_measure);
    const size_t colon = sel_levels.find(':');
    if (colon == std::string::npos)
      wolff::fail_parameter("select: --levels expects m_min:m_max");
    const int m_min = std::stoi(sel_levels.substr(0, colon));
    const int m_max = std::stoi(sel_levels.substr(colon + 1));
    const wolff::LatticeView view = wolff::enumerate_cubes(mu, m_min, m_max);
    wolff::SelectionOptions opts;
    opts.s = sel_s;
    opts.eps = sel_eps;
    const wolff::SelectionResult up = wolff::select_upward(mu, view, opts);
    const wolff::DownwardResult down = wolff::select_downward(mu, view, up, opts);
    std::cout << "cube,mass,density,upward,downward\n";
    for (size_t i = 0; i < view.cubes.size(); ++i) {
      std::cout << csv_field(wolff::format_cube(view.cubes[i])) << "," << g17(up.mass[i]) << ","
                << g17(up.density[i]) << "," << (up.selected[i] ? "1" : "0") << ","
                << (down.selected[i] ? "1" : "0") << "\n";
    }
    std::cerr << "cubes " << view.cubes.size() << ", retention up "
              << g17(up.energy_total > 0 ? up.energy_selected / up.energy_total : 0) << ", down "
              << g17(down.energy_total > 0 ? down.energy_selected / down.energy_total : 0)
              << (up.complete ? "" : " (upward search truncated)") << "\n";
  });

  // czo norm
  auto* czo = app.add_subcommand("czo", "Truncated singular integral operators");
  czo->require_subcommand(1);
  auto* norm = czo->add_subcommand("norm", "Sup over truncations of the operator norm");
  std::string czo_measure, czo_kernel = "riesz";
  double czo_s = 0.5;
  uint64_t czo_seed = 1;
  norm->add_option("--measure", czo_measure, "measure file")->required();
  norm->add_option("--kernel", czo_kernel, "riesz | smooth:<R> | random:<R>,<n0>");
  norm->add_option("--s", czo_s, "dimension index s");
  norm->add_option("--seed", czo_seed, "sign seed for random kernels");
  norm->callback([&] {
    const wolff::Measure mu = wolff::load_measure_file(czo_measure);
    const wolff::Kernel k = wolff::parse_kernel(czo_kernel, mu.dim(), czo_s, czo_seed);
    const wolff::SupNormEstimate est = wolff::operator_norm_sup(k, mu);
    std::cout << "measure_id,kernel,n,norm,residual\n";
    std::cout << csv_field(mu.id()) << "," << czo_kernel << "," << mu.size() << ","
              << g17(est.best.norm) << "," << g17(est.best.residual) << "\n";
  });

  // theta
  auto* theta_cmd = app.add_subcommand("theta", "Lipschitz oscillation coefficient on a cube");
  std::string th_measure, th_cube;
  double th_a = 2.0, th_s = 0.5;
  int th_family = 3;
  theta_cmd->add_option("--measure", th_measure, "measure file")->required();
  theta_cmd->add_option("--cube", th_cube, "cube code m:k1,k2,...")->required();
  theta_cmd->add_option("--A", th_a, "dilation factor (> 1)");
  theta_cmd->add_option("--s", th_s, "dimension index s");
  theta_cmd->add_option("--family", th_family, "test family size (bump radii 1..count)");
  theta_cmd->callback([&] {
    const wolff::Measure mu = wolff::load_measure_file(th_measure);
    const wolff::Cube q = wolff::parse_cube(th_cube);
    if (q.dim() != mu.dim())
      wolff::fail_parameter("theta: cube dimension does not match the measure");
    const wolff::TestFunctionFamily family = wolff::TestFunctionFamily::standard(th_family);
    const double denom = wolff::density(mu, q, th_s) * wolff::mass_cube(mu, q);
    std::cout << "cube,phi_index,theta,ratio,lp_residual,n_nodes\n";
    for (size_t j = 0; j < family.members.size(); ++j) {
      const wolff::ThetaResult r = wolff::theta(mu, q, family.members[j], th_a, th_s);
      std::cout << csv_field(wolff::format_cube(q)) << "," << j << "," << g17(r.value) << ","
                << g17(denom > 0 ? r.value / denom : 0) << "," << g17(r.lp_residual) << ","
                << r.n_nodes << "\n";
    }
  });

  // reflect verify
  auto* reflect = app.add_subcommand("reflect", "Reflectionless verification");
  reflect->require_subcommand(1);
  auto* verify = reflect->add_subcommand("verify", "Verify a plane-lattice structure hypothesis");
  std::string rv_measure, rv_hyp;
  double rv_tol = 1e-6;
  verify->add_option("--measure", rv_measure, "measure file")->required();
  verify->add_option("--hyp", rv_hyp, "hypothesis JSON file")->required();
  verify->add_option("--tol", rv_tol, "verification tolerance");
  verify->callback([&] {
    const wolff::Measure mu = wolff::load_measure_file(rv_measure);
    const wolff::StructureHypothesis hyp = wolff::load_hypothesis(rv_hyp);
    const wolff::StructureReport rep = wolff::verify_structure(mu, hyp, rv_tol);
    std::cout << "check,location,magnitude\n";
    for (const wolff::Violation& v : rep.violations)
      std::cout << v.check << "," << csv_field(v.location) << "," << g17(v.magnitude) << "\n";
    std::cerr << (rep.pass ? "pass" : "fail") << ": " << rep.violation_count
              << " violation(s), max plane distance " << g17(rep.max_plane_distance)
              << ", mass spread " << g17(rep.mass_spread) << "\n";
    if (!rep.pass) throw CLI::RuntimeError(1);
  });

  // run
  auto* run = app.add_subcommand("run", "Run a declarative experiment config");
  std::string run_config, run_out = "out";
  int run_jobs = 1;
  run->add_option("--config", run_config, "experiment JSON config")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--jobs", run_jobs, "worker count");
  run->callback([&] {
    const wolff::ExperimentConfig cfg = wolff::load_config(run_config);
    const wolff::RunReport rep = wolff::run_experiment(cfg, run_out, run_jobs);
    for (const std::string& f : rep.csv_files) std::cout << "wrote " << f << "\n";
    for (const wolff::TaskError& e : rep.errors)
      std::cerr << "error: " << e.point << " [" << e.task << "]: " << e.message << "\n";
    if (rep.equivalence) {
      for (const wolff::EquivalenceFamily& f : rep.equivalence->families) {
        std::cerr << f.id << ": " << f.verdict << " (wolff slope " << g17(f.wolff_slope)
                  << ", czo slope " << g17(f.czo_slope) << ")\n";
      }
    }
    std::cerr << (rep.pass ? "pass" : "fail") << "\n";
    if (!rep.pass) throw CLI::RuntimeError(1);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const wolff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
