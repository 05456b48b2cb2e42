#include "gssn/solver.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace gssn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double initial_lambda(const CompositeProblem& problem, const SolverConfig& config) {
  if (config.lambda0 > 0) return config.lambda0;
  const double L = problem.smooth->lipschitz();
  return L > 0 ? 1.0 / L : 1.0;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::phi_below_min: return "phi_below_min";
    case SolveStatus::stagnation: return "stagnation";
  }
  return "?";
}

void ConvergenceLog::append(LogRecord r) {
  if (!records.empty()) {
    const LogRecord& prev = records.back();
    if (r.k <= prev.k)
      throw std::logic_error("ConvergenceLog: iteration index not increasing");
    if (r.phi_fb > prev.phi_fb + 1e-9 * (1.0 + std::abs(prev.phi_fb)))
      throw std::logic_error("ConvergenceLog: envelope value increased");
  }
  records.push_back(std::move(r));
}

RunResult bas_gssn(const CompositeProblem& problem, const Vector& x0,
                   const SolverConfig& config, const DirectionProvider& direction) {
  const auto t0 = Clock::now();
  RunResult result;

  double lambda = initial_lambda(problem, config);
  const double lambda_bar = config.lambda_bar > 0 ? config.lambda_bar : 1e6 * lambda;
  lambda = std::min(lambda, lambda_bar);

  FbStep step = forward_backward(problem, x0, lambda);
  int inner = 0;
  while (!descent_ok(problem, step, config.alpha)) {
    lambda /= 2;
    step = forward_backward(problem, x0, lambda);
    if (++inner > config.max_inner)
      throw std::runtime_error("bas_gssn: initial lambda backtracking failed");
  }

  const double phi_fb0 = step.phi_fb;
  const double r0 = residual(step);
  const double tol = config.tol_factor * std::max(config.typ_val, r0);
  double rho = config.rho_max;

  result.residual_initial = r0;
  result.log.append({0, step.phi_fb, problem.phi(step.z), (step.z - step.x).norm(),
                     lambda, 0.0, rho, 0.0, 0, seconds_since(t0)});
  if (config.record_iterates) result.iterates.push_back(step.x);

  result.status = SolveStatus::max_iter;
  int k = 0;
  for (; k < config.max_iter; ++k) {
    const double r = residual(step);
    if (r <= tol || step.x == step.z) {
      result.status = SolveStatus::converged;
      break;
    }
    const double phi_z = problem.phi(step.z);
    if (phi_z <= config.phi_min) {
      result.status = SolveStatus::phi_below_min;
      break;
    }
    if (config.stagnation_guard && k > 0 &&
        step.eta <= config.tol_factor * (phi_fb0 - step.phi_fb)) {
      result.status = SolveStatus::stagnation;
      break;
    }

    DirectionInfo dir = direction(problem, step, rho);
    if (dir.s.size() != problem.dimension)
      throw std::logic_error("bas_gssn: direction has wrong dimension");
    const double s_norm = dir.s.norm();
    if (s_norm > rho * (1.0 + 1e-12))
      throw std::logic_error("bas_gssn: direction exceeds trust radius");
    result.total_cg_iters += dir.cg_iters;

    // step 5: trial point z + s with unchanged lambda
    double tau = 1.0;
    double lambda_next = lambda;
    Vector x_next = step.z + dir.s;
    FbStep next = forward_backward(problem, x_next, lambda_next);

    // step 6: backtrack tau on insufficient envelope decrease, lambda on
    // failed descent at the trial point
    // the strict decrease test saturates once the per-step decrease falls
    // below the rounding error of phi_fb itself; the epsilon-scale slack stops
    // the backtracking from thrashing at machine-accurate iterates
    const double fp_slack = 64.0 * std::numeric_limits<double>::epsilon() *
                            (1.0 + std::abs(step.phi_fb));
    const double decrease_bound =
        step.phi_fb - config.beta * (1.0 - config.alpha) * step.eta + fp_slack;
    inner = 0;
    bool line_search_ok = true;
    while (next.phi_fb > decrease_bound ||
           !descent_ok(problem, next, config.alpha, fp_slack)) {
      if (next.phi_fb > decrease_bound) {
        tau /= 2;
        x_next = step.z + tau * dir.s;
      } else {
        lambda_next /= 2;
      }
      next = forward_backward(problem, x_next, lambda_next);
      if (++inner > config.max_inner) {
        line_search_ok = false;
        break;
      }
    }
    if (!line_search_ok) {
      result.status = SolveStatus::stagnation;
      break;
    }

    // step 7: try to double lambda while the sigma-relaxed descent holds
    inner = 0;
    while (descent_ok(problem, next, config.sigma * config.alpha) &&
           2 * lambda_next <= lambda_bar && inner++ < config.max_inner) {
      FbStep probe = forward_backward(problem, x_next, 2 * lambda_next);
      if (!descent_ok(problem, probe, config.alpha)) break;
      lambda_next *= 2;
      next = std::move(probe);
    }

    const double slack = 1e-9 * (1.0 + std::abs(step.phi_fb));
    if (next.phi_fb > decrease_bound + slack)
      throw std::logic_error("bas_gssn: envelope decrease condition violated");
    if (phi_z + (1.0 - config.alpha) * step.eta > step.phi_fb + slack)
      throw std::logic_error("bas_gssn: envelope bound on phi(z) violated");

    rho = update_radius(rho, s_norm, tau, config.rho_min, config.rho_max);

    step = std::move(next);
    lambda = lambda_next;
    result.log.append({k + 1, step.phi_fb, problem.phi(step.z), (step.z - step.x).norm(),
                       lambda, tau, rho, dir.xi, dir.cg_iters, seconds_since(t0)});
    if (config.record_iterates) result.iterates.push_back(step.x);
  }

  result.x_final = step.x;
  result.z_final = step.z;
  result.z_star_final = step.z_star;
  result.phi_final = problem.phi(step.z);
  result.residual_final = residual(step);
  result.lambda_final = lambda;
  result.iterations = k;
  result.wall_time_s = seconds_since(t0);
  return result;
}

// ---- Newton direction provider -------------------------------------------

SparseMatrix zeta_damping_matrix(double zeta, const Vector& z) {
  const Index n = z.size();
  SparseMatrix d(n, n);
  d.reserve(Eigen::VectorXi::Constant(static_cast<int>(n), 1));
  for (Index i = 0; i < n; ++i)
    if (z[i] != 0) d.insert(i, i) = zeta / (z[i] * z[i]);
  d.makeCompressed();
  return d;
}

double zeta_damping_update(double zeta, double s_w_s, const Vector& s, const Vector& z,
                           double eps, double q) {
  if (s_w_s <= 0) return 2 * zeta;
  double nu_minus = inf, nu_plus = -inf;
  bool any = false;
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] == 0) continue;
    any = true;
    const double ratio = s[i] / (z[i] + eps * (z[i] > 0 ? 1.0 : -1.0));
    nu_minus = std::min(nu_minus, ratio);
    nu_plus = std::max(nu_plus, ratio);
  }
  if (!any) return zeta;
  const double nu = q == 1.0 ? -nu_minus : std::max(-nu_minus, nu_plus);
  if (nu >= 0.8 && nu <= 1.2) return zeta;
  return zeta * std::sqrt(std::max(nu, 1e-16));
}

DirectionInfo NewtonDirectionProvider::operator()(const CompositeProblem& problem,
                                                  const FbStep& step, double rho) {
  DirectionInfo info;
  const ScdElement scd = problem.nonsmooth->scd_element(step.z, step.z_star_g);

  SparseMatrix damping;
  const SparseMatrix* damping_ptr = nullptr;
  if (config_.damping_enabled) {
    damping = zeta_damping_matrix(zeta_, step.z);
    damping_ptr = &damping;
  }
  const ReducedSystem sys =
      build_reduced(problem, step.z, step.z_star_g, step.z_star, scd, damping_ptr);

  if (sys.empty()) {
    info.s = Vector::Zero(problem.dimension);
    return info;
  }

  NewtonOutcome out;
  if (config_.direction_mode == SolverConfig::Direction::exact) {
    out = exact_direction(sys, rho, config_.dense_cutoff);
  } else {
    const double xi_bar = chi_tolerance(std::max(step.z_star.norm(), 1e-300));
    Preconditioner precond = Preconditioner::identity();
    const auto& smooth = *problem.smooth;
    if (sys.has_explicit_matrix()) {
      if (smooth.hessian_matrix())
        precond = Preconditioner::incomplete_cholesky(sys.explicit_matrix());
      else
        precond = Preconditioner::diagonal(sys.explicit_matrix().diagonal());
    } else if (smooth.factor()) {
      // diagonal of the reduced gram is cheaply extractable when the basis is
      // a coordinate selection: diag(Z^T A^T A Z)_j = ||A e_{i(j)}||^2
      bool cheap = false;
      if (smooth.factor()->has_explicit_matrix()) {
        const SparseMatrix& A = smooth.factor()->explicit_matrix();
        const SparseMatrix& Z = sys.basis();
        Vector colsq = Vector::Zero(A.cols());
        for (Index c = 0; c < A.outerSize(); ++c)
          for (SparseMatrix::InnerIterator it(A, c); it; ++it)
            colsq[c] += it.value() * it.value();
        Vector d = sys.reduced_w().diagonal();
        cheap = true;
        for (Index j = 0; j < Z.outerSize(); ++j) {
          SparseMatrix::InnerIterator it(Z, j);
          if (!it) {
            cheap = false;
            break;
          }
          const Index row = it.row();
          const double v = it.value();
          ++it;
          if (it) {
            cheap = false;  // rotated block basis; no cheap diagonal
            break;
          }
          d[j] += v * v * colsq[row];
        }
        if (cheap) precond = Preconditioner::diagonal(std::move(d));
      }
      if (!cheap)
        precond =
            Preconditioner::scaled_identity(sigma_probe(*smooth.factor(), 10, config_.seed));
    }
    out = cg_trust_region(sys, rho, xi_bar, precond, config_.cg_max_iters);
  }

  if (config_.damping_enabled) {
    const Vector u = sys.basis().transpose() * out.s;
    const double s_w_s = u.dot(sys.apply(u));
    zeta_ = zeta_damping_update(zeta_, s_w_s, out.s, step.z, config_.damping_eps,
                                config_.damping_q);
  }

  info.s = std::move(out.s);
  info.xi = out.xi;
  info.cg_iters = out.cg_iters;
  return info;
}

RunResult solve_gssn(const CompositeProblem& problem, const Vector& x0,
                     const SolverConfig& config) {
  auto provider = std::make_shared<NewtonDirectionProvider>(config);
  return bas_gssn(problem, x0, config,
                  [provider](const CompositeProblem& p, const FbStep& s, double rho) {
                    return (*provider)(p, s, rho);
                  });
}

// ---- restart heuristic ---------------------------------------------------

namespace {

/// CG on the normal equations restricted to the support set, stopped when the
/// residual drops by the given factor.
Vector restricted_least_squares(const LinearOperator& A, const Vector& rhs_residual,
                                const std::vector<Index>& support, Index n,
                                double drop_factor) {
  Vector mask = Vector::Zero(n);
  for (Index i : support) mask[i] = 1.0;

  auto op = [&](const Vector& v) -> Vector {
    Vector masked = mask.asDiagonal() * v;
    return mask.asDiagonal() * A.apply_adjoint(A.apply(masked));
  };

  Vector x = Vector::Zero(n);
  Vector r = mask.asDiagonal() * A.apply_adjoint(rhs_residual);
  const double r0 = r.norm();
  if (r0 == 0) return x;
  Vector p = r;
  double rr = r.squaredNorm();
  const int max_iters = static_cast<int>(2 * support.size()) + 10;
  for (int it = 0; it < max_iters && r.norm() > drop_factor * r0; ++it) {
    const Vector ap = op(p);
    const double pap = p.dot(ap);
    if (pap <= 0) break;
    const double a = rr / pap;
    x += a * p;
    r -= a * ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return x;
}

}  // namespace

RunResult heuristic_multistart(const CompositeProblem& problem, const LinearOperator& A,
                               const Vector& b, const Vector& x0, const SolverConfig& config) {
  const auto t0 = Clock::now();
  const Index n = problem.dimension;

  double phi_opt = inf;
  int j_opt = 0;
  RunResult best;
  std::vector<double> pass_phis;
  double phi_prev = inf;

  Vector x = x0;
  for (int j = 0;; ++j) {
    RunResult local = solve_gssn(problem, x, config);
    const Vector x_bar = local.z_final;
    const double phi_bar = problem.phi(x_bar);
    const double lambda_j = local.lambda_final;
    pass_phis.push_back(phi_bar);

    if (phi_bar < phi_opt) {
      phi_opt = phi_bar;
      j_opt = j;
      best = local;
    }
    const bool flat =
        j >= 1 && std::abs(phi_bar - phi_prev) <= 1e-12 * (1.0 + std::abs(phi_prev));
    if (j > std::max(j_opt + 2, 10) || flat) break;
    phi_prev = phi_bar;

    const FbStep probe = forward_backward(problem, x_bar, 1000 * lambda_j);
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i)
      if (probe.z[i] != 0) support.push_back(i);
    if (support.empty()) break;

    const Vector dx = restricted_least_squares(A, b - A.apply(x_bar), support, n, 0.1);
    x = x_bar + 0.25 * dx;
  }

  best.phi_final = phi_opt;
  best.pass_phis = std::move(pass_phis);
  best.wall_time_s = seconds_since(t0);
  return best;
}

// ---- baselines -----------------------------------------------------------

RunResult pgm_baseline(const CompositeProblem& problem, const Vector& x0,
                       const SolverConfig& config) {
  const auto t0 = Clock::now();
  RunResult result;

  double lambda = initial_lambda(problem, config);
  const double lambda_bar = config.lambda_bar > 0 ? config.lambda_bar : 1e6 * lambda;
  lambda = std::min(lambda, lambda_bar);

  FbStep step = forward_backward(problem, x0, lambda);
  int inner = 0;
  while (!descent_ok(problem, step, config.alpha)) {
    lambda /= 2;
    step = forward_backward(problem, x0, lambda);
    if (++inner > config.max_inner)
      throw std::runtime_error("pgm_baseline: lambda backtracking failed");
  }

  const double r0 = residual(step);
  const double tol = config.tol_factor * std::max(config.typ_val, r0);
  result.residual_initial = r0;
  result.log.append({0, step.phi_fb, problem.phi(step.z), (step.z - step.x).norm(),
                     lambda, 0.0, 0.0, 0.0, 0, seconds_since(t0)});
  if (config.record_iterates) result.iterates.push_back(step.x);

  result.status = SolveStatus::max_iter;
  int k = 0;
  for (; k < config.max_iter; ++k) {
    if (residual(step) <= tol || step.x == step.z) {
      result.status = SolveStatus::converged;
      break;
    }
    if (problem.phi(step.z) <= config.phi_min) {
      result.status = SolveStatus::phi_below_min;
      break;
    }
    const Vector x_next = step.z;
    double lambda_next = std::min(lambda_bar, 2 * lambda);
    FbStep next = forward_backward(problem, x_next, lambda_next);
    inner = 0;
    while (!descent_ok(problem, next, config.alpha)) {
      lambda_next /= 2;
      next = forward_backward(problem, x_next, lambda_next);
      if (++inner > config.max_inner)
        throw std::runtime_error("pgm_baseline: lambda backtracking failed");
    }
    step = std::move(next);
    lambda = lambda_next;
    result.log.append({k + 1, step.phi_fb, problem.phi(step.z), (step.z - step.x).norm(),
                       lambda, 0.0, 0.0, 0.0, 0, seconds_since(t0)});
    if (config.record_iterates) result.iterates.push_back(step.x);
  }

  result.x_final = step.x;
  result.z_final = step.z;
  result.z_star_final = step.z_star;
  result.phi_final = problem.phi(step.z);
  result.residual_final = residual(step);
  result.lambda_final = lambda;
  result.iterations = k;
  result.wall_time_s = seconds_since(t0);
  return result;
}

std::vector<FistaRecord> fista_baseline(const CompositeProblem& problem, const Vector& x0,
                                        double L_f, int max_iter, const Vector* reference,
                                        Vector* x_out, double time_budget_s) {
  if (L_f <= 0) throw std::invalid_argument("fista_baseline: L_f must be positive");
  const double lambda = 1.0 / L_f;
  std::vector<FistaRecord> log;
  log.reserve(max_iter);

  Vector x = x0;
  Vector y = x0;
  double t = 1.0;
  double elapsed = 0;
  const double ref_norm = reference ? reference->lpNorm<Eigen::Infinity>() : 0;

  for (int k = 0; k < max_iter; ++k) {
    const auto t0 = Clock::now();
    Vector x_next =
        problem.nonsmooth->prox(lambda, y - lambda * problem.smooth->gradient(y));
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = std::move(x_next);
    t = t_next;
    elapsed += seconds_since(t0);

    // diagnostics kept out of the timed section
    FistaRecord rec;
    rec.k = k + 1;
    rec.phi = problem.phi(x);
    const Vector z = problem.nonsmooth->prox(lambda, x - lambda * problem.smooth->gradient(x));
    rec.residual = (1.0 + L_f) * (x - z).norm();
    if (reference && ref_norm > 0)
      rec.relative_error = (x - *reference).lpNorm<Eigen::Infinity>() / ref_norm;
    rec.time_s = elapsed;
    log.push_back(rec);
    if (time_budget_s > 0 && elapsed > time_budget_s) break;
  }
  if (x_out) *x_out = x;
  return log;
}

}  // namespace gssn
