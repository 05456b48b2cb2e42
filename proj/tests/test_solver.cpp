#include <doctest.h>

#include <random>

#include "gssn/problems.hpp"
#include "gssn/solver.hpp"
#include "helpers.hpp"

using namespace gssn;

namespace {

SolverConfig base_config() {
  SolverConfig c;
  c.max_iter = 300;
  // the l_1 instances below need the zeta damping just like l_q: without it the
  // reduced systems turn singular once the working support exceeds the row count
  c.damping_enabled = true;
  c.damping_q = 1.0;
  return c;
}

}  // namespace

TEST_CASE("solve_gssn reaches the residual rule with both direction modes") {
  const RegressionProblem reg = gen_lasso(40, 120, 8, 0.0, 17, 1e-3, 1);
  const CompositeProblem problem = reg.to_composite();
  const Vector x0 = Vector::Zero(120);

  SolverConfig cfg = base_config();
  cfg.direction_mode = SolverConfig::Direction::cg;
  const RunResult cg = solve_gssn(problem, x0, cfg);
  cfg.direction_mode = SolverConfig::Direction::exact;
  const RunResult exact = solve_gssn(problem, x0, cfg);

  for (const RunResult* r : {&cg, &exact}) {
    CHECK(r->status == SolveStatus::converged);
    CHECK(r->residual_final <=
          cfg.tol_factor * std::max(cfg.typ_val, r->residual_initial));
    CHECK(r->iterations < 300);
  }
  CHECK((cg.z_final - exact.z_final).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("log records are monotone and consistent with the envelope decrease") {
  const CompositeProblem problem = gen_lasso(30, 80, 6, 0.0, 23, 1e-3, 1).to_composite();
  SolverConfig cfg = base_config();
  const RunResult r = solve_gssn(problem, Vector::Zero(80), cfg);
  REQUIRE(r.log.records.size() > 2);
  for (size_t i = 1; i < r.log.records.size(); ++i) {
    const LogRecord& prev = r.log.records[i - 1];
    const LogRecord& cur = r.log.records[i];
    CHECK(cur.k == prev.k + 1);
    const double eta = prev.step_norm * prev.step_norm / (2 * prev.lambda);
    CHECK(cur.phi_fb <=
          prev.phi_fb - cfg.beta * (1 - cfg.alpha) * eta + 1e-9 * (1 + std::abs(prev.phi_fb)));
    CHECK(cur.phi_z + (1 - cfg.alpha) * cur.step_norm * cur.step_norm / (2 * cur.lambda) <=
          cur.phi_fb + 1e-9 * (1 + std::abs(cur.phi_fb)));
  }
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const CompositeProblem problem = gen_lasso(25, 60, 5, 0.0, 31, 1e-3, 1).to_composite();
  const RunResult a = solve_gssn(problem, Vector::Zero(60), base_config());
  const RunResult b = solve_gssn(problem, Vector::Zero(60), base_config());
  CHECK(a.iterations == b.iterations);
  CHECK((a.z_final - b.z_final).norm() == 0.0);
  CHECK(a.phi_final == b.phi_final);
}

TEST_CASE("ConvergenceLog::append rejects inconsistent records") {
  ConvergenceLog log;
  log.append({0, 1.0, 1.0, 0, 0.1, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(log.append({0, 0.5, 0.5, 0, 0.1, 0, 0, 0, 0, 0}), std::logic_error);
  CHECK_THROWS_AS(log.append({1, 2.0, 2.0, 0, 0.1, 0, 0, 0, 0, 0}), std::logic_error);
  log.append({1, 0.5, 0.5, 0, 0.1, 0, 0, 0, 0, 0});
  CHECK(log.records.size() == 2);
}

TEST_CASE("zeta damping update reproduces its three branches") {
  Vector z(3), s(3);
  z << 1.0, -2.0, 0.0;
  s << 0.1, -0.2, 0.5;

  // nonpositive curvature along s: zeta doubles
  CHECK(zeta_damping_update(1e-6, -0.5, s, z, 1e-4, 0.5) == 2e-6);
  CHECK(zeta_damping_update(1e-6, 0.0, s, z, 1e-4, 0.5) == 2e-6);

  // ratios s_i/(z_i + eps sign z_i) stay near 0.1: nu outside [0.8, 1.2]
  const double eps = 1e-4;
  const double nu = std::max(-std::min(s[0] / (z[0] + eps), s[1] / (z[1] - eps)),
                             std::max(s[0] / (z[0] + eps), s[1] / (z[1] - eps)));
  CHECK(zeta_damping_update(1e-6, 1.0, s, z, eps, 0.5) ==
        doctest::Approx(1e-6 * std::sqrt(nu)));

  // q = 1 uses only the negative side; here all ratios are positive, so nu is
  // negative and the sqrt argument clamps at 1e-16
  CHECK(zeta_damping_update(1e-6, 1.0, s, z, eps, 1.0) ==
        doctest::Approx(1e-6 * 1e-8));

  // nu inside [0.8, 1.2]: unchanged
  Vector s_in(3);
  s_in << 1.0, -2.0, 0.0;  // ratios ~ 1
  CHECK(zeta_damping_update(1e-6, 1.0, s_in, z, eps, 0.5) == 1e-6);
}

TEST_CASE("zeta damping matrix puts zeta/z_i^2 on the support") {
  Vector z(3);
  z << 2.0, 0.0, -0.5;
  const SparseMatrix d = zeta_damping_matrix(1e-4, z);
  CHECK(d.coeff(0, 0) == doctest::Approx(1e-4 / 4.0));
  CHECK(d.coeff(1, 1) == 0.0);
  CHECK(d.coeff(2, 2) == doctest::Approx(1e-4 / 0.25));
}

TEST_CASE("bas_gssn with a zero direction still converges via proximal steps") {
  const CompositeProblem problem = gen_lasso(20, 40, 4, 0.0, 41, 1e-2, 1).to_composite();
  SolverConfig cfg = base_config();
  cfg.max_iter = 20000;
  const auto zero_dir = [](const CompositeProblem& p, const FbStep&, double) {
    DirectionInfo d;
    d.s = Vector::Zero(p.dimension);
    return d;
  };
  const RunResult r = bas_gssn(problem, Vector::Zero(40), cfg, zero_dir);
  CHECK(r.status == SolveStatus::converged);
}

TEST_CASE("directions violating the trust radius are rejected") {
  const CompositeProblem problem = gen_lasso(10, 20, 3, 0.0, 43, 1e-2, 1).to_composite();
  const auto bad_dir = [](const CompositeProblem& p, const FbStep&, double rho) {
    DirectionInfo d;
    d.s = Vector::Constant(p.dimension, 2 * rho);
    return d;
  };
  CHECK_THROWS_AS(bas_gssn(problem, Vector::Zero(20), base_config(), bad_dir),
                  std::logic_error);
}

TEST_CASE("phi_min guard stops unbounded descent") {
  // f = 1/2||x - c||^2 with a far away c; with pure proximal steps the
  // objective crosses phi_min long before the residual rule is met
  auto f = std::make_shared<SmoothFunction>(SmoothFunction::half_sqnorm_shift(
      Vector::Constant(5, 100.0)));
  auto g = std::make_shared<ProxFunction>(make_zero(5));
  const CompositeProblem problem(f, g, 5);
  SolverConfig cfg = base_config();
  cfg.phi_min = 4000.0;  // phi(x0) = 1/2*5*100^2 = 25000
  const auto zero_dir = [](const CompositeProblem& p, const FbStep&, double) {
    DirectionInfo d;
    d.s = Vector::Zero(p.dimension);
    return d;
  };
  const RunResult r = bas_gssn(problem, Vector::Zero(5), cfg, zero_dir);
  CHECK(r.status == SolveStatus::phi_below_min);
}

TEST_CASE("stagnation guard fires when enabled with a loose tolerance") {
  const CompositeProblem problem = gen_lasso(20, 40, 4, 0.0, 47, 1e-3, 1).to_composite();
  SolverConfig cfg = base_config();
  cfg.stagnation_guard = true;
  cfg.tol_factor = 1e-4;  // eta <= 1e-4 (phi_fb0 - phi_fb) long before the residual rule
  const RunResult r = solve_gssn(problem, Vector::Zero(40), cfg);
  CHECK(r.status == SolveStatus::stagnation);
}

TEST_CASE("pgm baseline converges monotonically on a small lasso") {
  const CompositeProblem problem = gen_lasso(15, 30, 3, 0.0, 53, 1e-2, 1).to_composite();
  SolverConfig cfg = base_config();
  cfg.max_iter = 50000;
  const RunResult r = pgm_baseline(problem, Vector::Zero(30), cfg);
  CHECK(r.status == SolveStatus::converged);
  for (size_t i = 1; i < r.log.records.size(); ++i)
    CHECK(r.log.records[i].phi_fb <=
          r.log.records[i - 1].phi_fb + 1e-9 * (1 + std::abs(r.log.records[i - 1].phi_fb)));
}

TEST_CASE("fista baseline decreases the objective and honors the time budget") {
  const CompositeProblem problem = gen_lasso(15, 30, 3, 0.0, 59, 1e-2, 1).to_composite();
  const double L = problem.smooth->lipschitz();
  Vector x;
  const auto log = fista_baseline(problem, Vector::Zero(30), L, 500, nullptr, &x);
  REQUIRE(log.size() == 500);
  CHECK(log.back().phi < log.front().phi);
  CHECK(log.back().residual < log.front().residual);
  CHECK(problem.phi(x) == doctest::Approx(log.back().phi));

  const auto budgeted = fista_baseline(problem, Vector::Zero(30), L, 1000000, nullptr,
                                       nullptr, 1e-4);
  CHECK(budgeted.size() < 1000000);
  CHECK_THROWS_AS(fista_baseline(problem, Vector::Zero(30), 0.0, 10), std::invalid_argument);
}

TEST_CASE("heuristic multistart never returns worse than its first pass") {
  const RegressionProblem reg = gen_lasso(20, 60, 4, 0.0, 61, 1e-4, 0.5);
  const CompositeProblem problem = reg.to_composite();
  SolverConfig cfg = base_config();
  cfg.damping_enabled = true;
  cfg.damping_q = 0.5;
  const RunResult r = heuristic_multistart(problem, *reg.A, reg.b, Vector::Zero(60), cfg);
  REQUIRE(!r.pass_phis.empty());
  CHECK(r.phi_final <= r.pass_phis.front() + 1e-12);
  CHECK(r.phi_final == *std::min_element(r.pass_phis.begin(), r.pass_phis.end()));
}

TEST_CASE("nonconvex l_half instances solve with damping enabled") {
  const RegressionProblem reg = gen_lasso(25, 80, 5, 0.0, 67, 1e-4, 0.5);
  const CompositeProblem problem = reg.to_composite();
  SolverConfig cfg = base_config();
  cfg.damping_enabled = true;
  cfg.damping_q = 0.5;
  const RunResult r = solve_gssn(problem, Vector::Zero(80), cfg);
  CHECK(r.status == SolveStatus::converged);
}
