#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "gssn/types.hpp"

namespace gssn {

/// Linear map v -> Av with adjoint. May carry an explicit sparse matrix;
/// matrix-free operators only expose the two actions.
class LinearOperator {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  LinearOperator(Index rows, Index cols, Apply apply, Apply apply_adjoint)
      : rows_(rows), cols_(cols),
        apply_(std::move(apply)), adjoint_(std::move(apply_adjoint)) {}

  explicit LinearOperator(SparseMatrix A);
  explicit LinearOperator(Matrix A);

  static LinearOperator identity(Index n);
  static LinearOperator diagonal(const Vector& d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  Vector apply(const Vector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
    return apply_(v);
  }
  Vector apply_adjoint(const Vector& u) const {
    if (u.size() != rows_) throw std::invalid_argument("LinearOperator::apply_adjoint: dimension mismatch");
    return adjoint_(u);
  }

  bool has_explicit_matrix() const { return explicit_.has_value(); }
  const SparseMatrix& explicit_matrix() const { return explicit_.value(); }

 private:
  Index rows_, cols_;
  Apply apply_, adjoint_;
  std::optional<SparseMatrix> explicit_;
};

/// Largest eigenvalue of A^T A by power iteration; 0 for the zero operator.
double lipschitz_estimate(const LinearOperator& op, int iters = 30, unsigned seed = 0);

}  // namespace gssn
