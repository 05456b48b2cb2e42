#pragma once

#include <memory>
#include <optional>

#include "gssn/problem.hpp"
#include "gssn/linear_operator.hpp"

namespace gssn {

/// Sparse regression instance: min 1/2 ||Ax-b||^2 + mu ||x||_q^q.
struct RegressionProblem {
  std::shared_ptr<const LinearOperator> A;
  Vector b;
  double mu = 0;
  double q = 1;
  double lambda_c = 0;  // mu = lambda_c * ||A^T b||_inf when built from lambda_c
  std::optional<Vector> ground_truth;

  CompositeProblem to_composite() const;
};

/// Quadratic energy with per-node friction blocks and gap constraints.
struct TrescaToyProblem {
  std::shared_ptr<const SparseMatrix> A;  // n x n SPD
  Vector l;                               // load
  Index p = 0;                            // contact nodes; first 3p coords are blocks
  Vector F;                               // friction coefficients, size p
  Vector d;                               // gaps, size p

  Index dim() const { return l.size(); }
  CompositeProblem to_composite() const;
};

/// Synthetic lasso/l_q instance; A dense for n <= 5000, sparse otherwise.
RegressionProblem gen_lasso(Index m, Index n, Index k_sparse, double noise, unsigned seed,
                            double lambda_c, double q = 1);

/// Banded SPD toy with Tresca block structure, n = 3p + n_free.
TrescaToyProblem gen_tresca_toy(Index p, Index n_free, unsigned seed);

}  // namespace gssn
