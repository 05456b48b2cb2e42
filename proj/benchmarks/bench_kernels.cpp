#include <benchmark/benchmark.h>

#include <random>

#include "gssn/fbe.hpp"
#include "gssn/newton.hpp"
#include "gssn/problems.hpp"
#include "gssn/prox.hpp"
#include "gssn/solver.hpp"

namespace {

using namespace gssn;

Vector random_vector(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

void BM_prox_l1(benchmark::State& state) {
  const Vector x = random_vector(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(prox_l1(0.1, 0.5, x));
}
BENCHMARK(BM_prox_l1)->Arg(1000)->Arg(100000);

void BM_prox_lhalf(benchmark::State& state) {
  const Vector x = random_vector(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(prox_lhalf(0.1, 0.5, x));
}
BENCHMARK(BM_prox_lhalf)->Arg(1000)->Arg(100000);

void BM_prox_tresca(benchmark::State& state) {
  const Index p = state.range(0);
  const Vector F = Vector::Constant(p, 0.3);
  const Vector d = Vector::Constant(p, 0.05);
  const Vector v = random_vector(3 * p + 50, 3);
  for (auto _ : state) benchmark::DoNotOptimize(prox_tresca_block(F, d, 1.0, v));
}
BENCHMARK(BM_prox_tresca)->Arg(100)->Arg(10000);

void BM_forward_backward(benchmark::State& state) {
  const CompositeProblem problem =
      gen_lasso(200, state.range(0), 20, 0.05, 11, 1e-3, 1).to_composite();
  const Vector x = random_vector(state.range(0), 4) * 0.1;
  const double lambda = 1.0 / problem.smooth->lipschitz();
  for (auto _ : state) benchmark::DoNotOptimize(forward_backward(problem, x, lambda));
}
BENCHMARK(BM_forward_backward)->Arg(1000)->Arg(4000);

ReducedSystem synthetic_reduced(Index m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix B(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) B(i, j) = dist(rng);
  const Matrix M = B.transpose() * B / m + Matrix::Identity(m, m);
  SparseMatrix basis(m, m);
  basis.setIdentity();
  SparseMatrix w0(m, m);
  const Vector z_star = random_vector(m, seed + 1);
  return ReducedSystem(basis, [M](const Vector& u) { return Vector(M * u); }, w0,
                       z_star, z_star, SparseMatrix(M.sparseView()));
}

void BM_cg_reduced(benchmark::State& state) {
  const ReducedSystem sys = synthetic_reduced(state.range(0), 7);
  const Preconditioner precond = Preconditioner::identity();
  for (auto _ : state)
    benchmark::DoNotOptimize(cg_trust_region(sys, 1e10, 1e-10, precond));
}
BENCHMARK(BM_cg_reduced)->Arg(50)->Arg(200);

void BM_exact_reduced(benchmark::State& state) {
  const ReducedSystem sys = synthetic_reduced(state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(exact_direction(sys, 1e10));
}
BENCHMARK(BM_exact_reduced)->Arg(50)->Arg(200);

void BM_solve_lasso(benchmark::State& state) {
  const CompositeProblem problem = gen_lasso(100, 400, 10, 0.05, 21, 1e-3, 1).to_composite();
  SolverConfig cfg;
  cfg.damping_enabled = true;
  cfg.damping_q = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_gssn(problem, Vector::Zero(400), cfg));
}
BENCHMARK(BM_solve_lasso);

}  // namespace

BENCHMARK_MAIN();
