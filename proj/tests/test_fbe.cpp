#include <doctest.h>

#include <memory>
#include <random>

#include "gssn/fbe.hpp"
#include "gssn/problems.hpp"
#include "helpers.hpp"

using namespace gssn;

namespace {

CompositeProblem small_lasso(unsigned seed) {
  return gen_lasso(12, 20, 4, 0.0, seed, 1e-2, 1).to_composite();
}

}  // namespace

TEST_CASE("forward_backward reproduces its defining quantities") {
  std::mt19937_64 rng(2);
  const CompositeProblem problem = small_lasso(5);
  const Vector x = testing::random_vector(20, rng);
  const double lambda = 0.05;
  const FbStep step = forward_backward(problem, x, lambda);

  const Vector grad = problem.smooth->gradient(x);
  const Vector z = problem.nonsmooth->prox(lambda, x - lambda * grad);
  CHECK((step.z - z).norm() == 0.0);
  CHECK(step.eta == doctest::Approx((z - x).squaredNorm() / (2 * lambda)));
  CHECK((step.z_star_g - (-grad - (z - x) / lambda)).norm() < 1e-14);
  CHECK((step.z_star - (problem.smooth->gradient(z) + step.z_star_g)).norm() < 1e-14);
  CHECK(step.phi_fb == doctest::Approx(psi_fb(problem, x, z, lambda)));
  CHECK(residual(step) == doctest::Approx((1 + 1 / lambda) * (x - z).norm()));
}

TEST_CASE("the forward-backward point minimizes psi_fb over probes") {
  std::mt19937_64 rng(6);
  const CompositeProblem problem = small_lasso(6);
  const Vector x = testing::random_vector(20, rng);
  const FbStep step = forward_backward(problem, x, 0.1);
  for (int i = 0; i < 50; ++i) {
    const Vector probe = step.z + testing::random_vector(20, rng, 0.3);
    CHECK(step.phi_fb <= psi_fb(problem, x, probe, 0.1) + 1e-12);
  }
}

TEST_CASE("psi_fb is +inf on infeasible z of an indicator-carrying g") {
  const TrescaToyProblem toy = gen_tresca_toy(1, 1, 9);
  const CompositeProblem problem = toy.to_composite();
  Vector z = Vector::Zero(4);
  z[2] = -toy.d[0] - 1.0;
  CHECK(psi_fb(problem, Vector::Zero(4), z, 0.5) == inf);
}

TEST_CASE("envelope value is nonincreasing in lambda") {
  std::mt19937_64 rng(8);
  const CompositeProblem problem = small_lasso(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = testing::random_vector(20, rng, 2.0);
    double l1 = std::uniform_real_distribution<double>(1e-4, 0.5)(rng);
    double l2 = std::uniform_real_distribution<double>(1e-4, 0.5)(rng);
    if (l1 > l2) std::swap(l1, l2);
    const double hi = forward_backward(problem, x, l1).phi_fb;
    const double lo = forward_backward(problem, x, l2).phi_fb;
    CHECK(lo <= hi + 1e-9 * (1 + std::abs(hi)));
  }
}

TEST_CASE("descent_ok matches the quadratic upper bound test") {
  const CompositeProblem problem = small_lasso(8);
  std::mt19937_64 rng(10);
  const Vector x = testing::random_vector(20, rng);
  // small lambda: descent holds; huge lambda: it fails for generic x
  CHECK(descent_ok(problem, forward_backward(problem, x, 1e-4), 0.8));
  CHECK_FALSE(descent_ok(problem, forward_backward(problem, x, 50.0), 0.8));
}
