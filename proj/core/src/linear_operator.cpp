#include "gssn/linear_operator.hpp"

#include <memory>
#include <random>

namespace gssn {

LinearOperator::LinearOperator(SparseMatrix A)
    : rows_(A.rows()), cols_(A.cols()) {
  auto mat = std::make_shared<SparseMatrix>(std::move(A));
  mat->makeCompressed();
  apply_ = [mat](const Vector& v) -> Vector { return (*mat) * v; };
  adjoint_ = [mat](const Vector& u) -> Vector { return mat->transpose() * u; };
  explicit_ = *mat;
}

LinearOperator::LinearOperator(Matrix A)
    : rows_(A.rows()), cols_(A.cols()) {
  auto mat = std::make_shared<Matrix>(std::move(A));
  apply_ = [mat](const Vector& v) -> Vector { return (*mat) * v; };
  adjoint_ = [mat](const Vector& u) -> Vector { return mat->transpose() * u; };
  explicit_ = mat->sparseView();
}

LinearOperator LinearOperator::identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return LinearOperator(std::move(id));
}

LinearOperator LinearOperator::diagonal(const Vector& d) {
  SparseMatrix m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(static_cast<int>(d.size()), 1));
  for (Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  return LinearOperator(std::move(m));
}

double lipschitz_estimate(const LinearOperator& op, int iters, unsigned seed) {
  const Index n = op.cols();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  double nv = v.norm();
  if (nv == 0) return 0.0;
  v /= nv;
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = op.apply_adjoint(op.apply(v));
    double nw = w.norm();
    if (nw == 0) return 0.0;  // v in the null space; zero-ish operator
    estimate = v.dot(w);
    v = w / nw;
  }
  return std::max(estimate, 0.0);
}

}  // namespace gssn
