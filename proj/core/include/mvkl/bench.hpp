#pragma once

#include "mvkl/common.hpp"
#include "mvkl/kernels.hpp"
#include "mvkl/trainer.hpp"

#include <string>
#include <vector>

namespace mvkl {

struct BenchRow {
  std::string variant;
  int outer_iter = 0;
  double seconds = 0.0;
  double objective = 0.0;
  double test_rmse = 0.0;
};

/// Fits one variant per (cg_eps, sdp_iter) pair and records the objective
/// and held-out RMSE after every outer sweep. Variant labels read
/// "cg=<eps>,sdp=<iters>".
std::vector<BenchRow> run_bench_grid(const KernelDictionary& dict,
                                     const Matrix& x_train,
                                     const Matrix& y_train,
                                     const Matrix& x_test,
                                     const Matrix& y_test,
                                     const TrainConfig& base,
                                     const std::vector<double>& cg_eps_grid,
                                     const std::vector<int>& sdp_iter_grid);

/// Long-format CSV: variant,outer_iter,seconds,objective,test_rmse.
void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows);

}  // namespace mvkl
