// Command line driver: builds a composite problem (synthetic lasso / l_q
// regression, Tresca toy, or matrix files), runs the selected solver and
// writes a per-iteration CSV plus a JSON summary.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "gssn/matrix_io.hpp"
#include "gssn/problems.hpp"
#include "gssn/solver.hpp"

namespace {

using gssn::Index;
using gssn::Vector;

struct Options {
  std::string problem = "lasso";
  std::string matrix_path, rhs_path;
  double q = 1;
  double lambda_c = 1e-3;
  double mu = 0;  // overrides lambda_c when set
  std::string solver = "gssn";
  std::string direction = "cg";
  int max_iter = 1000;
  double tol = 1e-13;
  double typ_val = 1e3;
  double alpha = 0.8, beta = 0.2, sigma = 0.1;
  double rho_min = 1e-3, rho_max = 1e5;
  bool heuristic = false;
  unsigned seed = 0;
  std::string out_path, summary_path;
  // problem sizes
  Index m = 500, n = 2000, k_sparse = 50;
  double noise = 0;
  Index p = 50, n_free = 50;
};

int nnz_at_threshold(const Vector& x, double threshold) {
  int count = 0;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > threshold) ++count;
  return count;
}

void write_csv(const std::string& path, const gssn::ConvergenceLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "k,phi_fb,phi_z,step_norm,lambda,tau,rho,xi,cg_iters,time_s\n";
  out.precision(17);
  for (const auto& r : log.records)
    out << r.k << ',' << r.phi_fb << ',' << r.phi_z << ',' << r.step_norm << ',' << r.lambda
        << ',' << r.tau << ',' << r.rho << ',' << r.xi << ',' << r.cg_iters << ',' << r.time_s
        << '\n';
}

int run(const Options& opt) {
  gssn::SolverConfig config;
  config.alpha = opt.alpha;
  config.beta = opt.beta;
  config.sigma = opt.sigma;
  config.rho_min = opt.rho_min;
  config.rho_max = opt.rho_max;
  config.max_iter = opt.max_iter;
  config.tol_factor = opt.tol;
  config.typ_val = opt.typ_val;
  config.seed = opt.seed;
  config.direction_mode = opt.direction == "exact" ? gssn::SolverConfig::Direction::exact
                                                   : gssn::SolverConfig::Direction::cg;

  std::optional<gssn::CompositeProblem> problem;
  std::shared_ptr<const gssn::LinearOperator> A;
  Vector b;

  if (opt.problem == "lasso" || opt.problem == "file") {
    gssn::RegressionProblem reg;
    if (opt.problem == "lasso") {
      reg = gssn::gen_lasso(opt.m, opt.n, opt.k_sparse, opt.noise, opt.seed, opt.lambda_c, opt.q);
    } else {
      if (opt.matrix_path.empty() || opt.rhs_path.empty()) {
        std::cerr << "error: --problem file requires --matrix and --rhs\n";
        return 1;
      }
      reg.A = std::make_shared<gssn::LinearOperator>(gssn::load_matrix_market(opt.matrix_path));
      reg.b = gssn::load_vector(opt.rhs_path);
      if (reg.b.size() != reg.A->rows()) {
        std::cerr << "error: rhs length does not match matrix rows\n";
        return 1;
      }
      reg.q = opt.q;
      reg.lambda_c = opt.lambda_c;
      reg.mu = opt.lambda_c * reg.A->apply_adjoint(reg.b).lpNorm<Eigen::Infinity>();
    }
    if (opt.mu > 0) reg.mu = opt.mu;
    if (opt.q != 1 && opt.q != 0.5 && opt.q != 0) {
      std::cerr << "error: --q must be 1, 0.5 or 0\n";
      return 1;
    }
    config.damping_enabled = opt.q == 0.5 || opt.q == 1;
    config.damping_q = opt.q == 0.5 ? 0.5 : 1.0;
    A = reg.A;
    b = reg.b;
    problem.emplace(reg.to_composite());
  } else if (opt.problem == "tresca") {
    auto toy = gssn::gen_tresca_toy(opt.p, opt.n_free, opt.seed);
    problem.emplace(toy.to_composite());
  } else {
    std::cerr << "error: unknown problem '" << opt.problem << "'\n";
    return 1;
  }

  const Vector x0 = Vector::Zero(problem->dimension);
  gssn::RunResult result;
  nlohmann::json summary;

  if (opt.solver == "gssn") {
    if (opt.heuristic) {
      if (!A) {
        std::cerr << "error: --heuristic requires a regression problem\n";
        return 1;
      }
      result = gssn::heuristic_multistart(*problem, *A, b, x0, config);
    } else {
      result = gssn::solve_gssn(*problem, x0, config);
    }
  } else if (opt.solver == "pgm") {
    result = gssn::pgm_baseline(*problem, x0, config);
  } else if (opt.solver == "fista") {
    const double L = problem->smooth->lipschitz();
    Vector x;
    auto records = gssn::fista_baseline(*problem, x0, L, opt.max_iter, nullptr, &x);
    const double r0 = records.empty() ? 0 : records.front().residual;
    const double tol = opt.tol * std::max(opt.typ_val, r0);
    const auto& last = records.back();
    for (const auto& r : records)
      result.log.records.push_back({r.k, r.phi, r.phi, r.residual / (1.0 + L), 1.0 / L, 0.0,
                                    0.0, 0.0, 0, r.time_s});
    result.x_final = result.z_final = x;
    result.phi_final = last.phi;
    result.residual_final = last.residual;
    result.residual_initial = r0;
    result.iterations = last.k;
    result.lambda_final = 1.0 / L;
    result.wall_time_s = last.time_s;
    result.status =
        last.residual <= tol ? gssn::SolveStatus::converged : gssn::SolveStatus::max_iter;
  } else {
    std::cerr << "error: unknown solver '" << opt.solver << "'\n";
    return 1;
  }

  if (!opt.out_path.empty()) write_csv(opt.out_path, result.log);

  summary["status"] = gssn::to_string(result.status);
  summary["iterations"] = result.iterations;
  summary["phi_final"] = result.phi_final;
  summary["residual_final"] = result.residual_final;
  summary["residual_initial"] = result.residual_initial;
  summary["lambda_final"] = result.lambda_final;
  summary["nnz"] = nnz_at_threshold(result.z_final, 1e-10);
  summary["total_cg_iters"] = result.total_cg_iters;
  summary["wall_time_s"] = result.wall_time_s;
  if (!opt.summary_path.empty()) {
    std::ofstream out(opt.summary_path);
    if (!out) throw std::runtime_error("cannot open " + opt.summary_path + " for writing");
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";

  return result.status == gssn::SolveStatus::converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite optimization solver (globalized semismooth Newton)"};
  app.require_subcommand(0, 1);
  Options opt;

  CLI::App* solve = app.add_subcommand("solve", "solve a problem instance");
  solve->add_option("--problem", opt.problem, "lasso | tresca | file")
      ->check(CLI::IsMember({"lasso", "tresca", "file"}));
  solve->add_option("--matrix", opt.matrix_path, "Matrix Market file (with --problem file)");
  solve->add_option("--rhs", opt.rhs_path, "right-hand side, one value per line");
  solve->add_option("--q", opt.q, "regularizer exponent: 1, 0.5 or 0");
  solve->add_option("--lambda-c", opt.lambda_c, "mu = lambda_c * ||A^T b||_inf");
  solve->add_option("--mu", opt.mu, "explicit regularization weight (overrides --lambda-c)");
  solve->add_option("--solver", opt.solver, "gssn | pgm | fista")
      ->check(CLI::IsMember({"gssn", "pgm", "fista"}));
  solve->add_option("--direction", opt.direction, "exact | cg")
      ->check(CLI::IsMember({"exact", "cg"}));
  solve->add_option("--max-iter", opt.max_iter, "outer iteration cap");
  solve->add_option("--tol", opt.tol, "residual tolerance factor");
  solve->add_option("--typ-val", opt.typ_val, "typical residual magnitude");
  solve->add_option("--alpha", opt.alpha, "descent parameter");
  solve->add_option("--beta", opt.beta, "envelope decrease parameter");
  solve->add_option("--sigma", opt.sigma, "lambda increase slack");
  solve->add_option("--rho-min", opt.rho_min, "minimal trust radius");
  solve->add_option("--rho-max", opt.rho_max, "maximal trust radius");
  solve->add_flag("--heuristic", opt.heuristic, "multistart heuristic (nonconvex q)");
  solve->add_option("--seed", opt.seed, "random seed");
  solve->add_option("--out", opt.out_path, "per-iteration CSV output");
  solve->add_option("--summary", opt.summary_path, "JSON summary output");
  solve->add_option("--m", opt.m, "rows of the synthetic instance");
  solve->add_option("--n", opt.n, "columns of the synthetic instance");
  solve->add_option("--k-sparse", opt.k_sparse, "nonzeros of the synthetic truth");
  solve->add_option("--noise", opt.noise, "noise level of the synthetic rhs");
  solve->add_option("--p", opt.p, "contact nodes of the Tresca toy");
  solve->add_option("--n-free", opt.n_free, "free coordinates of the Tresca toy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (!solve->parsed()) {
    std::cout << app.help() << "\n";
    return 1;
  }

  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
