#include <doctest.h>

#include <Eigen/Dense>
#include <memory>
#include <random>

#include "gssn/smooth.hpp"
#include "helpers.hpp"

using namespace gssn;

namespace {

SmoothFunction make_ls(std::mt19937_64& rng, Index m, Index n, Vector* b_out = nullptr) {
  Matrix A = Matrix::NullaryExpr(m, n, [&](Index, Index) {
    return std::normal_distribution<double>()(rng);
  });
  Vector b = testing::random_vector(m, rng);
  if (b_out) *b_out = b;
  return SmoothFunction::least_squares(std::make_shared<LinearOperator>(std::move(A)),
                                       std::move(b));
}

}  // namespace

TEST_CASE("least squares value, gradient and hessian action are consistent") {
  std::mt19937_64 rng(3);
  Vector b;
  SmoothFunction f = make_ls(rng, 6, 4, &b);
  const Vector x = testing::random_vector(4, rng);
  const Matrix A = Matrix(f.factor()->explicit_matrix());
  CHECK(f.value(x) == doctest::Approx(0.5 * (A * x - b).squaredNorm()));
  CHECK((f.gradient(x) - A.transpose() * (A * x - b)).norm() < 1e-12);
  const Vector v = testing::random_vector(4, rng);
  CHECK((f.hessian_action(x, v) - A.transpose() * (A * v)).norm() < 1e-12);
  CHECK(gradient_check(f, x, 1e-6) < 1e-7);
}

TEST_CASE("quadratic energy matches its formula and finite differences") {
  std::mt19937_64 rng(4);
  Matrix H = Matrix::NullaryExpr(5, 5, [&](Index, Index) {
    return std::normal_distribution<double>()(rng);
  });
  H = (H + H.transpose()).eval();
  auto Hs = std::make_shared<SparseMatrix>(H.sparseView());
  const Vector l = testing::random_vector(5, rng);
  SmoothFunction f = SmoothFunction::quadratic(Hs, l);
  const Vector x = testing::random_vector(5, rng);
  CHECK(f.value(x) == doctest::Approx(0.5 * x.dot(H * x) - l.dot(x)));
  CHECK((f.gradient(x) - (H * x - l)).norm() < 1e-12);
  CHECK(gradient_check(f, x, 1e-6) < 1e-7);
}

TEST_CASE("half_sqnorm_shift gradient is x - c") {
  const Vector c = (Vector(2) << 1.0, -2.0).finished();
  SmoothFunction f = SmoothFunction::half_sqnorm_shift(c);
  const Vector x = (Vector(2) << 3.0, 1.0).finished();
  CHECK(f.value(x) == doctest::Approx(0.5 * (x - c).squaredNorm()));
  CHECK((f.gradient(x) - (x - c)).norm() == 0.0);
  CHECK(f.lipschitz() == 1.0);
}

TEST_CASE("lipschitz of least squares and quadratic matches eigen oracles") {
  std::mt19937_64 rng(5);
  SmoothFunction f = make_ls(rng, 8, 6);
  const Matrix A = Matrix(f.factor()->explicit_matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
  CHECK(f.lipschitz() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));

  Matrix H = Matrix::NullaryExpr(5, 5, [&](Index, Index) {
    return std::normal_distribution<double>()(rng);
  });
  H = (H + H.transpose()).eval();
  SmoothFunction q = SmoothFunction::quadratic(std::make_shared<SparseMatrix>(H.sparseView()),
                                               Vector::Zero(5));
  Eigen::SelfAdjointEigenSolver<Matrix> eh(H);
  const double oracle = eh.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(q.lipschitz() == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("lipschitz cache returns the hint unchanged") {
  SmoothFunction f(
      2, [](const Vector&) { return 0.0; },
      [](const Vector& x) -> Vector { return Vector::Zero(x.size()); },
      [](const Vector&, const Vector& v) -> Vector { return v; }, 42.0);
  CHECK(f.lipschitz() == 42.0);
}
