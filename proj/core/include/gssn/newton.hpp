#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gssn/prox.hpp"
#include "gssn/problem.hpp"

namespace gssn {

/// Reduced Newton system over the active subspace rge P with orthonormal
/// basis Z: action u -> Z^T (hess f + W_g) Z u, right-hand side Z^T z*.
class ReducedSystem {
 public:
  using Action = std::function<Vector(const Vector&)>;

  ReducedSystem() = default;
  ReducedSystem(SparseMatrix basis, Action hess_action_full, SparseMatrix reduced_w,
                Vector rhs, Vector z_star,
                std::optional<SparseMatrix> explicit_reduced = std::nullopt);

  Index dim() const { return rhs_.size(); }          // m
  Index full_dim() const { return basis_.rows(); }   // n
  bool empty() const { return dim() == 0; }

  const SparseMatrix& basis() const { return basis_; }
  const Vector& rhs() const { return rhs_; }               // Z^T z*
  const Vector& z_star() const { return z_star_; }
  double z_star_norm() const { return z_star_norm_; }

  Vector apply(const Vector& u) const;                     // M u
  Vector to_full(const Vector& u) const;                   // Z u
  Vector project_rhs_full() const;                         // P z* = Z rhs

  /// Reduced nonsmooth part Z^T (W_g + damping) Z.
  const SparseMatrix& reduced_w() const { return reduced_w_; }

  bool has_explicit_matrix() const { return explicit_.has_value(); }
  const SparseMatrix& explicit_matrix() const { return explicit_.value(); }

  /// Materializes M as a dense matrix by m applications of the action
  /// (or from the explicit matrix if present).
  Matrix dense_matrix() const;

 private:
  SparseMatrix basis_;
  Action hess_full_;
  SparseMatrix reduced_w_;
  Vector rhs_;
  Vector z_star_;
  double z_star_norm_ = 0;
  std::optional<SparseMatrix> explicit_;
};

enum class NewtonExit {
  converged,
  radius,
  negative_curvature,
  two_dim_fallback,
  exact,
  gradient_fallback,
};

std::string to_string(NewtonExit e);

struct NewtonOutcome {
  Vector s;               // search direction, in rge P
  double xi = 0;          // relative residual ||W s + P z*|| / ||z*||
  int cg_iters = 0;
  NewtonExit exit_reason = NewtonExit::exact;
};

/// Preconditioner for the reduced CG: identity, scaled identity, diagonal or
/// incomplete Cholesky of the explicit reduced matrix.
class Preconditioner {
 public:
  static Preconditioner identity();
  static Preconditioner scaled_identity(double sigma);
  static Preconditioner diagonal(Vector d);
  static Preconditioner incomplete_cholesky(const SparseMatrix& m);

  Vector solve(const Vector& r) const { return solve_(r); }

 private:
  explicit Preconditioner(std::function<Vector(const Vector&)> solve) : solve_(std::move(solve)) {}
  std::function<Vector(const Vector&)> solve_;
};

/// Assembles the reduced system from the SC element of g at (z, z*_g) via the
/// sum rule W_phi = P hess f(z) P + W_g. An explicit reduced matrix is built
/// when the smooth part carries a factor or Hessian matrix and m is within
/// the dense/sparse budget.
ReducedSystem build_reduced(const CompositeProblem& problem, const Vector& z,
                            const Vector& z_star_g, const Vector& z_star,
                            const ScdElement& scd,
                            const SparseMatrix* w_damping = nullptr);

/// Exact reduced solve with rank-revealing factorization; singular systems
/// fall back to the scaled steepest descent direction of length rho.
NewtonOutcome exact_direction(const ReducedSystem& sys, double rho,
                              Index dense_cutoff = 2000);

/// Preconditioned trust-region CG on the reduced problem with residual,
/// radius and negative-curvature exits.
NewtonOutcome cg_trust_region(const ReducedSystem& sys, double rho, double xi_bar,
                              const Preconditioner& precond, int max_iters = 0);

/// Global minimizer of 1/2 s^T W s + <z*, s> over span{v1,v2} intersected
/// with the rho-ball.
Vector two_dim_subproblem(const std::function<Vector(const Vector&)>& w_action,
                          const Vector& z_star, double rho,
                          const Vector& v1, const Vector& v2);

/// Trust-radius update: shrink on small tau, grow on full boundary steps.
double update_radius(double rho, double step_norm, double tau, double rho_min, double rho_max);

/// CG stopping tolerance 0.1 / (1 - ln(t/(t+1))), increasing in t.
double chi_tolerance(double t);

/// Mean Rayleigh quotient of A^T A over random probes; used for scaled
/// identity preconditioning when no matrix is available.
double sigma_probe(const LinearOperator& op, int count = 10, unsigned seed = 0);

/// 1/lambda_min of the reduced matrix when positive definite, +inf otherwise.
double estimate_regularity(const ReducedSystem& sys, Index dense_cutoff = 2000);

/// Smallest eigenvalue test of A_I^T A_I + diag(w_bar); first component is
/// lambda_min >= -tol * scale.
std::pair<bool, double> second_order_check(const LinearOperator& a_active,
                                           const Vector& w_bar_active,
                                           double tol = 1e-8,
                                           Index dense_cutoff = 2000);

}  // namespace gssn
