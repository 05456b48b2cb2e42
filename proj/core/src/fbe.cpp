#include "gssn/fbe.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gssn {

FbStep forward_backward(const CompositeProblem& problem, const Vector& x, double lambda) {
  FbStep step;
  step.x = x;
  step.lambda = lambda;
  step.f_x = problem.smooth->value(x);
  step.grad_x = problem.smooth->gradient(x);
  if (!step.grad_x.allFinite())
    throw std::runtime_error("forward_backward: non-finite gradient");
  step.z = problem.nonsmooth->prox(lambda, x - lambda * step.grad_x);
  const Vector diff = step.z - x;
  step.eta = diff.squaredNorm() / (2.0 * lambda);
  step.z_star_g = -step.grad_x - diff / lambda;
  step.z_star = problem.smooth->gradient(step.z) + step.z_star_g;
  step.phi_fb = step.f_x + step.grad_x.dot(diff) + step.eta + problem.nonsmooth->eval(step.z);
  return step;
}

double psi_fb(const CompositeProblem& problem, const Vector& x, const Vector& z, double lambda) {
  const double g_z = problem.nonsmooth->eval(z);
  if (g_z == inf) return inf;
  const Vector diff = z - x;
  return problem.smooth->value(x) + problem.smooth->gradient(x).dot(diff) +
         diff.squaredNorm() / (2.0 * lambda) + g_z;
}

bool descent_ok(const CompositeProblem& problem, const FbStep& step, double alpha,
                double slack) {
  const Vector diff = step.z - step.x;
  const double linear = step.f_x + step.grad_x.dot(diff);
  return problem.smooth->value(step.z) <=
         linear + alpha / (2.0 * step.lambda) * diff.squaredNorm() + slack;
}

double residual(const FbStep& step) {
  return (1.0 + 1.0 / step.lambda) * (step.x - step.z).norm();
}

}  // namespace gssn
