#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "gssn/linear_operator.hpp"
#include "gssn/types.hpp"

namespace gssn {

/// Smooth part f of the composite objective: value, gradient and Hessian
/// action. For f(x) = 1/2 ||Ax-b||^2 the factor A is kept so that reduced
/// Newton matrices can be materialized column-wise; for explicit quadratics
/// the Hessian itself is kept.
class SmoothFunction {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Vector(const Vector&, const Vector&)>;

  SmoothFunction(Index dim, ValueFn value, GradFn gradient, HessFn hessian_action,
                 std::optional<double> lipschitz_hint = std::nullopt)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)),
        hess_(std::move(hessian_action)) {
    lip_cache_->value = lipschitz_hint;
  }

  /// f(x) = 1/2 ||Ax - b||^2
  static SmoothFunction least_squares(std::shared_ptr<const LinearOperator> A, Vector b);

  /// f(v) = 1/2 v^T A v - <l, v>, A symmetric
  static SmoothFunction quadratic(std::shared_ptr<const SparseMatrix> A, Vector l);

  /// f(x) = 1/2 ||x - c||^2
  static SmoothFunction half_sqnorm_shift(Vector c);

  Index dim() const { return dim_; }
  double value(const Vector& x) const { return value_(x); }
  Vector gradient(const Vector& x) const { return gradient_(x); }
  Vector hessian_action(const Vector& x, const Vector& v) const { return hess_(x, v); }

  /// Lipschitz bound for the gradient; computed once by power iteration when
  /// no hint and no factor is available.
  double lipschitz(const class LinearOperator* fallback_op = nullptr) const;

  const std::shared_ptr<const LinearOperator>& factor() const { return factor_; }
  const std::shared_ptr<const SparseMatrix>& hessian_matrix() const { return hess_matrix_; }

 private:
  struct LipCache {
    std::mutex m;
    std::optional<double> value;
  };

  Index dim_;
  ValueFn value_;
  GradFn gradient_;
  HessFn hess_;
  std::shared_ptr<LipCache> lip_cache_ = std::make_shared<LipCache>();
  std::shared_ptr<const LinearOperator> factor_;   // hessian = factor^T factor
  std::shared_ptr<const SparseMatrix> hess_matrix_;  // hessian = this matrix
};

/// Max over coordinates of the relative error between the analytic gradient
/// and central finite differences with step h.
double gradient_check(const SmoothFunction& f, const Vector& x, double h);

struct CompositeProblem;

}  // namespace gssn
