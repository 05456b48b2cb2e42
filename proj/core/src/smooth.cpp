#include "gssn/smooth.hpp"

#include <cmath>

namespace gssn {

SmoothFunction SmoothFunction::least_squares(std::shared_ptr<const LinearOperator> A, Vector b) {
  auto bb = std::make_shared<Vector>(std::move(b));
  const Index n = A->cols();
  SmoothFunction f(
      n,
      [A, bb](const Vector& x) {
        Vector r = A->apply(x) - *bb;
        return 0.5 * r.squaredNorm();
      },
      [A, bb](const Vector& x) -> Vector {
        return A->apply_adjoint(A->apply(x) - *bb);
      },
      [A](const Vector&, const Vector& v) -> Vector {
        return A->apply_adjoint(A->apply(v));
      });
  f.factor_ = std::move(A);
  return f;
}

SmoothFunction SmoothFunction::quadratic(std::shared_ptr<const SparseMatrix> A, Vector l) {
  auto ll = std::make_shared<Vector>(std::move(l));
  const Index n = A->cols();
  SmoothFunction f(
      n,
      [A, ll](const Vector& v) { return 0.5 * v.dot((*A) * v) - ll->dot(v); },
      [A, ll](const Vector& v) -> Vector { return (*A) * v - *ll; },
      [A](const Vector&, const Vector& v) -> Vector { return (*A) * v; });
  f.hess_matrix_ = std::move(A);
  return f;
}

SmoothFunction SmoothFunction::half_sqnorm_shift(Vector c) {
  auto cc = std::make_shared<Vector>(std::move(c));
  const Index n = cc->size();
  SmoothFunction f(
      n,
      [cc](const Vector& x) { return 0.5 * (x - *cc).squaredNorm(); },
      [cc](const Vector& x) -> Vector { return x - *cc; },
      [](const Vector&, const Vector& v) -> Vector { return v; },
      1.0);
  return f;
}

double SmoothFunction::lipschitz(const LinearOperator* fallback_op) const {
  std::lock_guard lock(lip_cache_->m);
  if (lip_cache_->value) return *lip_cache_->value;
  double lip = 1.0;
  if (factor_) {
    lip = lipschitz_estimate(*factor_, 30);
  } else if (hess_matrix_) {
    LinearOperator h(*hess_matrix_);
    // hessian eigenvalue, not its square: probe ||H|| via power iteration on H^T H
    lip = std::sqrt(lipschitz_estimate(h, 30));
  } else if (fallback_op) {
    lip = lipschitz_estimate(*fallback_op, 30);
  }
  lip_cache_->value = lip;
  return lip;
}

double gradient_check(const SmoothFunction& f, const Vector& x, double h) {
  const Vector g = f.gradient(x);
  const double scale = std::max(1.0, g.norm());
  double worst = 0.0;
  Vector xp = x, xm = x;
  for (Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return worst;
}

}  // namespace gssn
