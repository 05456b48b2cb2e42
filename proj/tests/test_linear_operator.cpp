#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "gssn/linear_operator.hpp"
#include "helpers.hpp"

using namespace gssn;

TEST_CASE("dense and sparse constructors agree with direct products") {
  std::mt19937_64 rng(1);
  Matrix A = Matrix::NullaryExpr(4, 6, [&](Index, Index) {
    return std::normal_distribution<double>()(rng);
  });
  LinearOperator op(A);
  CHECK(op.rows() == 4);
  CHECK(op.cols() == 6);
  const Vector v = testing::random_vector(6, rng);
  const Vector u = testing::random_vector(4, rng);
  CHECK((op.apply(v) - A * v).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((op.apply_adjoint(u) - A.transpose() * u).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(op.has_explicit_matrix());
  CHECK((Matrix(op.explicit_matrix()) - A).norm() == 0.0);

  LinearOperator sp(SparseMatrix(A.sparseView()));
  CHECK((sp.apply(v) - A * v).norm() < 1e-14);
}

TEST_CASE("dimension mismatches throw") {
  LinearOperator op = LinearOperator::identity(3);
  CHECK_THROWS_AS(op.apply(Vector::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(op.apply_adjoint(Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("identity and diagonal factories") {
  const Vector d = (Vector(3) << 2.0, -1.0, 0.5).finished();
  LinearOperator diag = LinearOperator::diagonal(d);
  const Vector v = (Vector(3) << 1.0, 1.0, 1.0).finished();
  CHECK((diag.apply(v) - d).norm() == 0.0);
  CHECK((LinearOperator::identity(3).apply(v) - v).norm() == 0.0);
}

TEST_CASE("lipschitz_estimate matches the dense eigenvalue oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix A = Matrix::NullaryExpr(10, 8, [&](Index, Index) {
      return std::normal_distribution<double>()(rng);
    });
    // oracle: largest eigenvalue of A^T A from a dense symmetric eigensolver
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
    const double oracle = es.eigenvalues().maxCoeff();
    // power iteration underestimates; its rate depends on the spectral gap
    const double est = lipschitz_estimate(LinearOperator(A), 2000);
    CHECK(est == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(est <= oracle * (1 + 1e-10));
  }
}

TEST_CASE("lipschitz_estimate of the zero operator is zero") {
  CHECK(lipschitz_estimate(LinearOperator(Matrix::Zero(3, 3))) == 0.0);
}
