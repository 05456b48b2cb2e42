#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gssn/fbe.hpp"
#include "gssn/newton.hpp"

namespace gssn {

struct SolverConfig {
  double alpha = 0.8;
  double beta = 0.2;
  double sigma = 0.1;
  double lambda0 = 0;        // 0: initialize as 1/lipschitz_estimate
  double lambda_bar = 0;     // 0: 1e6 * lambda0
  double rho_min = 1e-3;
  double rho_max = 1e5;
  int max_iter = 1000;
  int max_inner = 100;
  double tol_factor = 1e-13;
  double typ_val = 1e3;
  double phi_min = -inf;
  // stop when eta_k <= tol_factor * (phi_fb_0 - phi_fb_k); guards against
  // objectives that are not level bounded, off by default since it triggers
  // far above the residual tolerance on well posed problems
  bool stagnation_guard = false;
  bool damping_enabled = false;
  double damping_eps = 1e-4;
  double damping_q = 0.5;    // q of the l_q member the damping refers to
  double zeta0 = 1e-8;
  enum class Direction { exact, cg } direction_mode = Direction::cg;
  // per-call CG cap for the Newton direction; crude directions early on are
  // absorbed by the tau line search, but the cap must leave room for accurate
  // solves in the endgame where the fast local convergence comes from
  int cg_max_iters = 50;
  Index dense_cutoff = 2000;
  bool record_iterates = false;
  unsigned seed = 0;
};

enum class SolveStatus { converged, max_iter, phi_below_min, stagnation };

std::string to_string(SolveStatus s);

struct LogRecord {
  int k = 0;
  double phi_fb = 0;
  double phi_z = 0;
  double step_norm = 0;  // ||z - x||
  double lambda = 0;
  double tau = 0;
  double rho = 0;
  double xi = 0;
  int cg_iters = 0;
  double time_s = 0;
};

struct ConvergenceLog {
  std::vector<LogRecord> records;
  void append(LogRecord r);
};

struct RunResult {
  Vector x_final;
  Vector z_final;
  Vector z_star_final;
  double phi_final = 0;
  double residual_final = 0;
  double residual_initial = 0;
  double lambda_final = 0;
  int iterations = 0;
  int total_cg_iters = 0;
  SolveStatus status = SolveStatus::max_iter;
  ConvergenceLog log;
  std::vector<Vector> iterates;  // filled when config.record_iterates
  std::vector<double> pass_phis;  // filled by heuristic_multistart, one entry per pass
  double wall_time_s = 0;
};

/// A direction provider returns (s, xi, cg_iters) for the current step;
/// ||s|| <= rho is its contract.
struct DirectionInfo {
  Vector s;
  double xi = 0;
  int cg_iters = 0;
};
using DirectionProvider = std::function<DirectionInfo(const CompositeProblem&, const FbStep&,
                                                      double rho)>;

/// The globalized solver: proximal-gradient line search with
/// forward-backward-envelope descent plus Newton-type directions.
RunResult bas_gssn(const CompositeProblem& problem, const Vector& x0,
                   const SolverConfig& config, const DirectionProvider& direction);

/// Newton direction provider wired per config (exact or trust-region CG with
/// chi tolerance, preconditioning policy and optional zeta damping state).
class NewtonDirectionProvider {
 public:
  NewtonDirectionProvider(SolverConfig config) : config_(std::move(config)), zeta_(config_.zeta0) {}

  DirectionInfo operator()(const CompositeProblem& problem, const FbStep& step, double rho);

  double zeta() const { return zeta_; }

 private:
  SolverConfig config_;
  double zeta_;
};

/// zeta update rule for l_q damping; returns the new zeta.
double zeta_damping_update(double zeta, double s_w_s, const Vector& s, const Vector& z,
                           double eps, double q);

/// Diagonal damping entries zeta / z_i^2 on the nonzero coordinates of z.
SparseMatrix zeta_damping_matrix(double zeta, const Vector& z);

/// Convenience wrapper: bas_gssn with the Newton provider.
RunResult solve_gssn(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

/// Restart heuristic for nonconvex problems: repeated local solves with a
/// restricted least-squares correction between passes.
RunResult heuristic_multistart(const CompositeProblem& problem, const LinearOperator& A,
                               const Vector& b, const Vector& x0, const SolverConfig& config);

/// Plain proximal gradient with per-iteration backtracking; same termination
/// rule as bas_gssn.
RunResult pgm_baseline(const CompositeProblem& problem, const Vector& x0,
                       const SolverConfig& config);

struct FistaRecord {
  int k = 0;
  double phi = 0;             // phi(x)
  double residual = 0;        // (1 + L_f) ||x - T_{1/L_f}(x)||
  double relative_error = 0;  // ||x - x_ref||_inf / ||x_ref||_inf (if reference given)
  double time_s = 0;
};

/// Accelerated proximal gradient with fixed step 1/L_f; logs residual and
/// relative error per iteration. Stops early once the accumulated update time
/// exceeds time_budget_s (0: no budget); diagnostics are not counted.
std::vector<FistaRecord> fista_baseline(const CompositeProblem& problem, const Vector& x0,
                                        double L_f, int max_iter,
                                        const Vector* reference = nullptr,
                                        Vector* x_out = nullptr,
                                        double time_budget_s = 0);

}  // namespace gssn
