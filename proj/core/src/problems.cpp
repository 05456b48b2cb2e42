#include "gssn/problems.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace gssn {

CompositeProblem RegressionProblem::to_composite() const {
  auto f = std::make_shared<SmoothFunction>(SmoothFunction::least_squares(A, b));
  std::shared_ptr<const ProxFunction> g;
  if (q == 1)
    g = std::make_shared<ProxFunction>(make_l1(mu));
  else if (q == 0)
    g = std::make_shared<ProxFunction>(make_l0(mu));
  else
    g = std::make_shared<ProxFunction>(make_lq(mu, q));
  return CompositeProblem(std::move(f), std::move(g), A->cols());
}

CompositeProblem TrescaToyProblem::to_composite() const {
  auto f = std::make_shared<SmoothFunction>(SmoothFunction::quadratic(A, l));
  auto g = std::make_shared<ProxFunction>(make_tresca(F, d, dim()));
  return CompositeProblem(std::move(f), std::move(g), dim());
}

RegressionProblem gen_lasso(Index m, Index n, Index k_sparse, double noise, unsigned seed,
                            double lambda_c, double q) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  std::shared_ptr<LinearOperator> op;
  if (n <= 5000) {
    Matrix A(m, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) A(i, j) = gauss(rng);
    op = std::make_shared<LinearOperator>(std::move(A));
  } else {
    std::vector<Eigen::Triplet<double>> trips;
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i)
        if (unif01(rng) < 0.01)
          trips.emplace_back(static_cast<int>(i), static_cast<int>(j), gauss(rng));
    SparseMatrix A(m, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    op = std::make_shared<LinearOperator>(std::move(A));
  }

  Vector x_true = Vector::Zero(n);
  std::vector<Index> idx(n);
  for (Index i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution coin;
  for (Index i = 0; i < k_sparse && i < n; ++i)
    x_true[idx[i]] = (coin(rng) ? 1.0 : -1.0) * mag(rng);

  Vector b = op->apply(x_true);
  if (noise > 0)
    for (Index i = 0; i < m; ++i) b[i] += noise * gauss(rng);

  RegressionProblem prob;
  prob.A = std::move(op);
  prob.mu = lambda_c * (prob.A->apply_adjoint(b)).lpNorm<Eigen::Infinity>();
  prob.b = std::move(b);
  prob.q = q;
  prob.lambda_c = lambda_c;
  prob.ground_truth = std::move(x_true);
  return prob;
}

TrescaToyProblem gen_tresca_toy(Index p, Index n_free, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::normal_distribution<double> gauss;

  const Index n = 3 * p + n_free;
  // banded, strictly diagonally dominant, symmetrized
  std::vector<Eigen::Triplet<double>> trips;
  const Index band = 2;
  Matrix dense = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - band); j < i; ++j) {
      const double v = -unif(rng) / 4;
      dense(i, j) = v;
      dense(j, i) = v;
    }
  for (Index i = 0; i < n; ++i) {
    double off = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) off += std::abs(dense(i, j));
    dense(i, i) = off + unif(rng) + 0.5;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (dense(i, j) != 0) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), dense(i, j));
  auto A = std::make_shared<SparseMatrix>(n, n);
  A->setFromTriplets(trips.begin(), trips.end());
  A->makeCompressed();

  if (n <= 3000) {
    Eigen::SimplicialLLT<SparseMatrix> llt(*A);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("gen_tresca_toy: generated matrix not positive definite");
  }

  TrescaToyProblem prob;
  prob.A = std::move(A);
  prob.l = Vector::NullaryExpr(n, [&](Index) { return gauss(rng); });
  prob.p = p;
  prob.F = Vector::NullaryExpr(p, [&](Index) { return unif(rng); });
  prob.d = Vector::NullaryExpr(p, [&](Index) { return 0.1 * unif(rng); });
  return prob;
}

}  // namespace gssn
