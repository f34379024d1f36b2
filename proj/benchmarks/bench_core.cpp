#include <benchmark/benchmark.h>

#include "mvkl/kernels.hpp"
#include "mvkl/spectahedron.hpp"
#include "mvkl/sylvester.hpp"
#include "mvkl/trainer.hpp"

#include <memory>
#include <vector>

using namespace mvkl;

namespace {

struct Fixture {
  KernelDictionary dict;
  Matrix x, y;
  GramSet* gs = nullptr;
};

Fixture make_fixture(Index l, Index n, Index m) {
  static std::vector<std::unique_ptr<GramSet>> keep_alive;
  Fixture f;
  Rng rng(91);
  f.x = rng.normal_matrix(l, 6);
  for (Index j = 0; j < m; ++j)
    f.dict.add(ScalarKernelSpec::gaussian(
        "g" + std::to_string(j), 0.5 + 0.4 * static_cast<double>(j),
        j % 2 == 0 ? std::vector<int>{0, 1, 2} : std::vector<int>{3, 4, 5}));
  f.y = rng.normal_matrix(l, n);
  keep_alive.push_back(std::make_unique<GramSet>(f.dict, f.x));
  f.gs = keep_alive.back().get();
  return f;
}

void bm_weighted_apply(benchmark::State& state) {
  const Index l = state.range(0);
  Fixture f = make_fixture(l, 8, 8);
  Rng rng(3);
  const Matrix m = rng.normal_matrix(l, 8);
  const Vector eta = Vector::Constant(8, 0.125);
  for (auto _ : state) {
    Matrix out = f.gs->weighted_apply(eta, m);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(l);
}
BENCHMARK(bm_weighted_apply)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void bm_sylvester_cg(benchmark::State& state) {
  const Index l = state.range(0);
  Fixture f = make_fixture(l, 8, 4);
  const Vector eta = Vector::Constant(4, 0.25);
  const Matrix l_mat = Matrix::Identity(8, 8) * 0.5;
  for (auto _ : state) {
    auto [c, rep] = solve_sylvester_cg(*f.gs, eta, l_mat, 0.1 * l, f.y,
                                       Matrix(), 1e-6, 500);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(bm_sylvester_cg)->RangeMultiplier(2)->Range(64, 512);

void bm_sylvester_eig(benchmark::State& state) {
  const Index l = state.range(0);
  Fixture f = make_fixture(l, 8, 4);
  const Vector eta = Vector::Constant(4, 0.25);
  const Matrix k = f.gs->materialize_weighted(eta);
  const Matrix l_mat = Matrix::Identity(8, 8) * 0.5;
  for (auto _ : state) {
    Matrix c = solve_sylvester_eig(k, l_mat, 0.1 * l, f.y);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(bm_sylvester_eig)->RangeMultiplier(2)->Range(64, 512);

void bm_solve_l(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(11);
  const int l = 128;
  const Matrix a = rng.normal_matrix(l, n);
  const Matrix c_like = rng.normal_matrix(l, n);
  const Matrix b = symmetrized(c_like.transpose() * a);
  const Matrix y = rng.normal_matrix(l, n);
  OutputKernel l0{Matrix::Zero(n, n), static_cast<double>(n)};
  FwConfig cfg;
  cfg.max_iter = 200;
  for (auto _ : state) {
    FwResult res = solve_l(a, b, y, 0.05, n, l, l0, cfg);
    benchmark::DoNotOptimize(res.kernel.l.data());
  }
}
BENCHMARK(bm_solve_l)->RangeMultiplier(2)->Range(4, 32);

void bm_fit_outer_sweep(benchmark::State& state) {
  const Index l = state.range(0);
  Fixture f = make_fixture(l, 5, 8);
  TrainConfig cfg;
  cfg.lambda = 0.01;
  cfg.tau = 5.0;
  cfg.outer_max = 3;
  cfg.outer_tol = 0.0;
  cfg.cg_eps = 1e-4;
  cfg.sdp_iter = 100;
  for (auto _ : state) {
    Model m = fit(f.dict, f.x, *f.gs, f.y.leftCols(5), cfg);
    benchmark::DoNotOptimize(m.c.data());
  }
}
BENCHMARK(bm_fit_outer_sweep)->RangeMultiplier(2)->Range(64, 256);

}  // namespace

BENCHMARK_MAIN();
