#include "mvkl/bench.hpp"

#include "mvkl/io.hpp"

#include <sstream>

namespace mvkl {

std::vector<BenchRow> run_bench_grid(const KernelDictionary& dict,
                                     const Matrix& x_train,
                                     const Matrix& y_train,
                                     const Matrix& x_test,
                                     const Matrix& y_test,
                                     const TrainConfig& base,
                                     const std::vector<double>& cg_eps_grid,
                                     const std::vector<int>& sdp_iter_grid) {
  check_input(!cg_eps_grid.empty() && !sdp_iter_grid.empty(),
              "run_bench_grid: empty variant grid");
  check_input(x_test.rows() == y_test.rows(),
              "run_bench_grid: test shapes disagree");
  const GramSet gs(dict, x_train);

  // Cross-Grams computed once; every variant reuses them for per-sweep RMSE.
  std::vector<Matrix> cross;
  cross.reserve(static_cast<size_t>(dict.size()));
  for (const auto& spec : dict.specs)
    cross.push_back(gram_cross(spec, x_train, x_test));

  std::vector<BenchRow> rows;
  for (double cg_eps : cg_eps_grid) {
    for (int sdp_iter : sdp_iter_grid) {
      TrainConfig cfg = base;
      cfg.cg_eps = cg_eps;
      cfg.sdp_iter = sdp_iter;
      std::ostringstream label;
      label << "cg=" << cg_eps << ";sdp=" << sdp_iter;

      auto observer = [&](int outer_iter, double seconds, double objective,
                          const Matrix& c, const Vector& eta,
                          const Matrix& l_mat) {
        Matrix kx = Matrix::Zero(x_test.rows(), x_train.rows());
        for (Index j = 0; j < eta.size(); ++j)
          if (eta[j] != 0.0) kx.noalias() += eta[j] * cross[static_cast<size_t>(j)];
        const Matrix y_hat = kx * c * l_mat;
        rows.push_back({label.str(), outer_iter, seconds, objective,
                        rmse(y_hat, y_test).mean});
      };
      fit(dict, x_train, gs, y_train, cfg, nullptr, observer);
    }
  }
  return rows;
}

void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "variant,outer_iter,seconds,objective,test_rmse\n";
  for (const auto& r : rows)
    out << r.variant << "," << r.outer_iter << "," << r.seconds << ","
        << r.objective << "," << r.test_rmse << "\n";
  atomic_write_text(path, out.str());
}

}  // namespace mvkl
