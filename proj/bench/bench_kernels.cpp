// Serial reference vs OpenMP kernels, plus the end-to-end eigensolve.

#include "manialign/eigsolve.hpp"
#include "manialign/parallel.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace manialign;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

template <Matrix (*F)(const Matrix&, const Matrix&, double)>
void rbf(benchmark::State& state) {
  const Matrix a = random_matrix(state.range(0), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(F(a, a, 1.0));
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void pairwise(benchmark::State& state) {
  const Matrix a = random_matrix(state.range(0), 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(F(a, a));
}

template <std::vector<std::vector<std::size_t>> (*F)(const Matrix&, std::size_t)>
void knn(benchmark::State& state) {
  const Matrix a = random_matrix(state.range(0), 8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(F(a, 9));
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void congruence(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix left = random_matrix(n, n, 4);
  const Matrix mid = random_matrix(n, n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(F(left, mid));
}

void gep(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix m = random_matrix(n, n, 6);
  Matrix a = m * m.transpose();
  a.diagonal().array() += static_cast<double>(n);
  const Matrix q = random_matrix(n, n, 7);
  Matrix b = q * q.transpose();
  b.diagonal().array() += static_cast<double>(n);
  const SymMatrix sa(a), sb(b);
  for (auto _ : state) benchmark::DoNotOptimize(eigsolve::solve_gep(sa, sb, 20));
}

}  // namespace

BENCHMARK(rbf<parallel::rbf_gram_serial>)->Name("rbf_gram/serial")->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(rbf<parallel::rbf_gram>)->Name("rbf_gram/omp")->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(pairwise<parallel::squared_distances_serial>)->Name("sqdist/serial")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(pairwise<parallel::squared_distances>)->Name("sqdist/omp")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(pairwise<parallel::linear_gram_serial>)->Name("linear_gram/serial")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(pairwise<parallel::linear_gram>)->Name("linear_gram/omp")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(knn<parallel::nearest_neighbors_serial>)->Name("knn/serial")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(knn<parallel::nearest_neighbors>)->Name("knn/omp")->Arg(1500)->Unit(benchmark::kMillisecond);
BENCHMARK(congruence<parallel::congruence_serial>)->Name("congruence/serial")->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(congruence<parallel::congruence>)->Name("congruence/omp")->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(gep)->Name("solve_gep")->Arg(300)->Arg(900)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
