#include "gssn/newton.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <random>

namespace gssn {

ReducedSystem::ReducedSystem(SparseMatrix basis, Action hess_action_full, SparseMatrix reduced_w,
                             Vector rhs, Vector z_star, std::optional<SparseMatrix> explicit_reduced)
    : basis_(std::move(basis)), hess_full_(std::move(hess_action_full)),
      reduced_w_(std::move(reduced_w)), rhs_(std::move(rhs)), z_star_(std::move(z_star)),
      explicit_(std::move(explicit_reduced)) {
  z_star_norm_ = z_star_.norm();
}

Vector ReducedSystem::apply(const Vector& u) const {
  if (explicit_) return (*explicit_) * u;
  return basis_.transpose() * hess_full_(basis_ * u) + reduced_w_ * u;
}

Vector ReducedSystem::to_full(const Vector& u) const { return basis_ * u; }

Vector ReducedSystem::project_rhs_full() const { return basis_ * rhs_; }

Matrix ReducedSystem::dense_matrix() const {
  if (explicit_) return Matrix(*explicit_);
  const Index m = dim();
  Matrix out(m, m);
  Vector e = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

std::string to_string(NewtonExit e) {
  switch (e) {
    case NewtonExit::converged: return "converged";
    case NewtonExit::radius: return "radius";
    case NewtonExit::negative_curvature: return "negative_curvature";
    case NewtonExit::two_dim_fallback: return "two_dim_fallback";
    case NewtonExit::exact: return "exact";
    case NewtonExit::gradient_fallback: return "gradient_fallback";
  }
  return "?";
}

// ---- preconditioner ------------------------------------------------------

Preconditioner Preconditioner::identity() {
  return Preconditioner([](const Vector& r) { return r; });
}

Preconditioner Preconditioner::scaled_identity(double sigma) {
  const double inv = sigma > 0 ? 1.0 / sigma : 1.0;
  return Preconditioner([inv](const Vector& r) -> Vector { return inv * r; });
}

Preconditioner Preconditioner::diagonal(Vector d) {
  Vector inv = d.unaryExpr([](double v) { return v > 0 ? 1.0 / v : 1.0; });
  return Preconditioner([inv = std::move(inv)](const Vector& r) -> Vector {
    return inv.asDiagonal() * r;
  });
}

Preconditioner Preconditioner::incomplete_cholesky(const SparseMatrix& m) {
  auto ic = std::make_shared<Eigen::IncompleteCholesky<double>>();
  ic->compute(m);
  if (ic->info() != Eigen::Success) {
    // indefinite or otherwise not factorizable: fall back to the diagonal
    Vector d = m.diagonal();
    return diagonal(std::move(d));
  }
  return Preconditioner([ic](const Vector& r) -> Vector { return ic->solve(r); });
}

// ---- system assembly -----------------------------------------------------

ReducedSystem build_reduced(const CompositeProblem& problem, const Vector& z,
                            const Vector& z_star_g, const Vector& z_star,
                            const ScdElement& scd, const SparseMatrix* w_damping) {
  (void)z_star_g;
  const SparseMatrix& Z = scd.basis();
  SparseMatrix w_red = scd.reduced_w();
  if (w_damping) w_red = w_red + Z.transpose() * (*w_damping) * Z;
  Vector rhs = Z.transpose() * z_star;

  std::optional<SparseMatrix> explicit_reduced;
  const Index m = Z.cols();
  const auto& smooth = *problem.smooth;
  if (m > 0 && m <= 5000) {
    if (smooth.factor() && smooth.factor()->has_explicit_matrix()) {
      const SparseMatrix& A = smooth.factor()->explicit_matrix();
      // materializing (AZ)^T (AZ) costs rows * m^2 flops; past this budget the
      // matrix-free path (two factor applications per CG step) is cheaper
      const double work = static_cast<double>(A.rows()) * m * m;
      if (work <= 2e7) {
        const Matrix AZ = Matrix(A * Z);
        const Matrix gram = AZ.transpose() * AZ;
        SparseMatrix mat = gram.sparseView() + w_red;
        mat.makeCompressed();
        explicit_reduced = std::move(mat);
      }
    } else if (smooth.hessian_matrix()) {
      SparseMatrix mat =
          SparseMatrix(Z.transpose()) * (*smooth.hessian_matrix()) * Z + w_red;
      mat.makeCompressed();
      explicit_reduced = std::move(mat);
    }
  }

  auto hess = [&smooth, z](const Vector& v) { return smooth.hessian_action(z, v); };
  return ReducedSystem(Z, hess, std::move(w_red), std::move(rhs), z_star,
                       std::move(explicit_reduced));
}

// ---- exact direction -----------------------------------------------------

NewtonOutcome exact_direction(const ReducedSystem& sys, double rho, Index dense_cutoff) {
  NewtonOutcome out;
  if (sys.empty()) {
    out.s = Vector::Zero(sys.full_dim());
    out.exit_reason = NewtonExit::exact;
    return out;
  }
  if (sys.dim() > dense_cutoff)
    throw std::invalid_argument("exact_direction: system exceeds dense cutoff");

  const Matrix M = sys.dense_matrix();
  Eigen::FullPivLU<Matrix> lu(M);
  lu.setThreshold(1e-12);
  const double zs_norm = sys.z_star_norm();
  if (!lu.isInvertible()) {
    if (sys.rhs().norm() == 0) {
      out.s = Vector::Zero(sys.full_dim());
      out.exit_reason = NewtonExit::exact;
      return out;
    }
    Vector u = -rho * sys.rhs() / sys.rhs().norm();
    out.s = sys.to_full(u);
    out.xi = zs_norm > 0 ? (sys.apply(u) + sys.rhs()).norm() / zs_norm : 0.0;
    out.exit_reason = NewtonExit::gradient_fallback;
    return out;
  }
  Vector u = lu.solve(-sys.rhs());
  if (u.norm() > rho) {
    u *= rho / u.norm();
    out.s = sys.to_full(u);
    out.xi = zs_norm > 0 ? (sys.apply(u) + sys.rhs()).norm() / zs_norm : 0.0;
    out.exit_reason = NewtonExit::radius;
    return out;
  }
  out.s = sys.to_full(u);
  out.xi = zs_norm > 0 ? (sys.apply(u) + sys.rhs()).norm() / zs_norm : 0.0;
  out.exit_reason = NewtonExit::exact;
  return out;
}

// ---- two-dimensional trust-region subproblem -----------------------------

namespace {

/// Exact solve of min 1/2 y^T M y + c^T y, ||y|| <= rho, for d x d symmetric M
/// with d <= 2, via eigendecomposition and a safeguarded multiplier search.
Vector small_trust_region(const Matrix& M, const Vector& c, double rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const Vector lam = es.eigenvalues();
  const Vector ct = es.eigenvectors().transpose() * c;
  const Index d = c.size();

  // interior stationary point
  if (lam.minCoeff() > 0) {
    Vector y = -ct.cwiseQuotient(lam);
    if (y.norm() <= rho) return es.eigenvectors() * y;
  }

  auto norm_at = [&](double nu) {
    double sq = 0;
    for (Index i = 0; i < d; ++i) {
      const double denom = lam[i] + nu;
      sq += (ct[i] * ct[i]) / (denom * denom);
    }
    return std::sqrt(sq);
  };

  const double nu_floor = std::max(0.0, -lam.minCoeff());
  // hard case: components along the smallest eigenvalue vanish
  bool hard = true;
  for (Index i = 0; i < d; ++i)
    if (std::abs(lam[i] - lam.minCoeff()) < 1e-14 * std::max(1.0, std::abs(lam.minCoeff())) &&
        std::abs(ct[i]) > 1e-14 * std::max(1.0, c.norm()))
      hard = false;
  if (hard && nu_floor > 0) {
    const double nu = nu_floor;
    Vector y = Vector::Zero(d);
    double used = 0;
    for (Index i = 0; i < d; ++i) {
      const double denom = lam[i] + nu;
      if (denom > 1e-14) {
        y[i] = -ct[i] / denom;
        used += y[i] * y[i];
      }
    }
    if (used <= rho * rho) {
      // fill up to the boundary along the null direction
      for (Index i = 0; i < d; ++i) {
        if (lam[i] + nu <= 1e-14) {
          y[i] = std::sqrt(std::max(0.0, rho * rho - used));
          break;
        }
      }
      return es.eigenvectors() * y;
    }
  }

  // boundary solution: find nu > nu_floor with ||y(nu)|| = rho by bisection
  double lo = nu_floor;
  double hi = std::max(1.0, nu_floor) * 2;
  while (norm_at(hi) > rho && hi < 1e300) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_at(mid) > rho)
      lo = mid;
    else
      hi = mid;
  }
  const double nu = 0.5 * (lo + hi);
  Vector y(d);
  for (Index i = 0; i < d; ++i) y[i] = -ct[i] / (lam[i] + nu);
  if (y.norm() > 0) y *= rho / y.norm();
  return es.eigenvectors() * y;
}

}  // namespace

Vector two_dim_subproblem(const std::function<Vector(const Vector&)>& w_action,
                          const Vector& z_star, double rho,
                          const Vector& v1, const Vector& v2) {
  const Index n = z_star.size();
  // orthonormalize the span, dropping near-dependent directions
  std::vector<Vector> basis;
  for (const Vector* v : {&v1, &v2}) {
    Vector w = *v;
    for (const Vector& b : basis) w -= b.dot(w) * b;
    const double nw = w.norm();
    if (nw > 1e-12 * std::max(1.0, v->norm())) basis.push_back(w / nw);
  }
  if (basis.empty()) return Vector::Zero(n);

  const Index d = static_cast<Index>(basis.size());
  Matrix B(n, d);
  for (Index j = 0; j < d; ++j) B.col(j) = basis[j];
  Matrix M(d, d);
  for (Index j = 0; j < d; ++j) M.col(j) = B.transpose() * w_action(B.col(j));
  M = 0.5 * (M + M.transpose()).eval();
  const Vector c = B.transpose() * z_star;

  return B * small_trust_region(M, c, rho);
}

// ---- trust-region CG -----------------------------------------------------

NewtonOutcome cg_trust_region(const ReducedSystem& sys, double rho, double xi_bar,
                              const Preconditioner& precond, int max_iters) {
  NewtonOutcome out;
  const Index n = sys.full_dim();
  const Index m = sys.dim();
  if (m == 0) {
    out.s = Vector::Zero(n);
    out.exit_reason = NewtonExit::converged;
    return out;
  }
  // default cap: full Krylov dimension for small systems, a flat practical
  // bound for large ill-conditioned ones (the globalization absorbs the
  // cruder direction through its line search)
  if (max_iters <= 0) max_iters = std::min(static_cast<int>(2 * m) + 10, 500);

  const double zs_norm = sys.z_star_norm();
  const Vector& r0 = sys.rhs();
  Vector u = Vector::Zero(m);
  Vector r = r0;
  Vector cinv_r = precond.solve(r);
  Vector p = -cinv_r;
  Vector p0 = p;
  double r_cinv_r = r.dot(cinv_r);

  auto xi_of = [&](const Vector& uu) {
    return zs_norm > 0 ? (sys.apply(uu) + r0).norm() / zs_norm : 0.0;
  };

  int j = 0;
  while (true) {
    if (u.norm() > rho) {
      u *= rho / u.norm();
      out.s = sys.to_full(u);
      out.xi = xi_of(u);
      out.cg_iters = j;
      out.exit_reason = NewtonExit::radius;
      return out;
    }
    if ((sys.apply(u) + r0).norm() < xi_bar * zs_norm || j >= max_iters) {
      out.s = sys.to_full(u);
      out.xi = xi_of(u);
      out.cg_iters = j;
      out.exit_reason = NewtonExit::converged;
      return out;
    }
    const Vector y = sys.apply(p);
    const double curvature = y.dot(p);
    if (curvature <= 0) {
      auto w_full = [&sys](const Vector& v) -> Vector {
        // W acts on rge P as Z M Z^T; the span lies in rge P
        return sys.to_full(sys.apply(sys.basis().transpose() * v));
      };
      out.s = two_dim_subproblem(w_full, sys.z_star(), rho, sys.to_full(p0), sys.to_full(p));
      out.xi = xi_of(sys.basis().transpose() * out.s);
      out.cg_iters = j;
      out.exit_reason = j == 0 ? NewtonExit::negative_curvature : NewtonExit::two_dim_fallback;
      return out;
    }
    const double alpha = -r.dot(p) / curvature;
    u += alpha * p;
    r += alpha * y;
    cinv_r = precond.solve(r);
    const double r_cinv_r_next = r.dot(cinv_r);
    p = -cinv_r + (r_cinv_r_next / r_cinv_r) * p;
    r_cinv_r = r_cinv_r_next;
    ++j;
  }
}

// ---- scalar helpers ------------------------------------------------------

double update_radius(double rho, double step_norm, double tau, double rho_min, double rho_max) {
  if (tau < 0.25) return std::max(rho_min, step_norm / 2.0);
  if (step_norm == rho && tau == 1.0) return std::min(rho_max, 1.5 * step_norm);
  return rho;
}

double chi_tolerance(double t) {
  if (!(t > 0)) throw std::invalid_argument("chi_tolerance: t must be positive");
  return 0.1 / (1.0 - std::log(t / (t + 1.0)));
}

double sigma_probe(const LinearOperator& op, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double sum = 0;
  for (int i = 0; i < count; ++i) {
    Vector x(op.cols());
    for (Index k = 0; k < x.size(); ++k) x[k] = gauss(rng);
    const double nx2 = x.squaredNorm();
    if (nx2 == 0) continue;
    sum += op.apply(x).squaredNorm() / nx2;
  }
  return sum / count;
}

double estimate_regularity(const ReducedSystem& sys, Index dense_cutoff) {
  if (sys.dim() == 0 || sys.dim() > dense_cutoff) return inf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sys.dense_matrix());
  const double lam_min = es.eigenvalues().minCoeff();
  return lam_min > 0 ? 1.0 / lam_min : inf;
}

std::pair<bool, double> second_order_check(const LinearOperator& a_active,
                                           const Vector& w_bar_active, double tol,
                                           Index dense_cutoff) {
  const Index m = a_active.cols();
  if (m == 0 || m > dense_cutoff)
    return {false, std::numeric_limits<double>::quiet_NaN()};
  Matrix M(m, m);
  Vector e = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    e[j] = 1.0;
    M.col(j) = a_active.apply_adjoint(a_active.apply(e));
    e[j] = 0.0;
  }
  const double scale = std::max(1.0, M.norm());
  M += Matrix(w_bar_active.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const double lam_min = es.eigenvalues().minCoeff();
  return {lam_min >= -tol * scale, lam_min};
}

}  // namespace gssn
