#pragma once

#include "gssn/problem.hpp"

namespace gssn {

/// One forward-backward step z in T_lambda(x) together with the quantities
/// the globalized method keeps per iterate. Immutable; rebuilt whenever x or
/// lambda changes.
struct FbStep {
  Vector x;
  double lambda = 0;
  Vector z;
  double eta = 0;        // ||z-x||^2 / (2 lambda)
  Vector z_star_g;       // -grad f(x) - (z-x)/lambda, subgradient of g at z
  Vector z_star;         // grad f(z) + z_star_g, subgradient of phi at z
  double phi_fb = 0;     // psi^FB_lambda(x, z)
  double f_x = 0;
  Vector grad_x;
};

/// z = prox_{lambda g}(x - lambda grad f(x)) with all derived quantities.
FbStep forward_backward(const CompositeProblem& problem, const Vector& x, double lambda);

/// psi^FB_lambda(x, z) = f(x) + <grad f(x), z-x> + ||z-x||^2/(2 lambda) + g(z).
double psi_fb(const CompositeProblem& problem, const Vector& x, const Vector& z, double lambda);

/// f(z) <= l_f(x,z) + alpha/(2 lambda) ||z-x||^2 + slack; the optional slack
/// lets callers keep the test meaningful once alpha/(2 lambda) ||z-x||^2 is
/// below the rounding error of the function values
bool descent_ok(const CompositeProblem& problem, const FbStep& step, double alpha,
                double slack = 0.0);

/// r = (1 + 1/lambda) ||x - z||
double residual(const FbStep& step);

}  // namespace gssn
