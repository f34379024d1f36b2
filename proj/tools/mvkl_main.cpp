#include <CLI11.hpp>

#include "mvkl/bench.hpp"
#include "mvkl/bounds.hpp"
#include "mvkl/io.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>

namespace {

using namespace mvkl;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int env_workers(int configured) {
  const char* env = std::getenv("MVKL_WORKERS");
  if (env == nullptr || *env == '\0') return configured;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0)
    throw ConfigError("MVKL_WORKERS must be a nonnegative integer");
  return static_cast<int>(v);
}

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path;
  return path.substr(0, dot);
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const std::string& out_path) {
  const TimeSeriesPanel panel = read_panel_csv(data_path);
  const RunConfig cfg = read_run_config(config_path);
  const PanelModel model =
      fit_panel(panel, cfg.lag, cfg.train, cfg.dictionary);
  save_model(out_path, model);

  const auto& trace = model.model.trace;
  Index active = 0;
  for (Index j = 0; j < model.model.eta.size(); ++j)
    if (model.model.eta[j] > model.model.config.eps_eta) ++active;
  std::cout << "fitted " << model.model.dictionary.size() << " kernels on "
            << model.model.x.rows() << " samples; " << trace.size() - 1
            << " outer iterations, final objective "
            << trace.back().objective << ", " << active
            << " active kernel weights\n";
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  const PanelModel model = load_model(model_path);
  const TimeSeriesPanel panel = read_panel_csv(data_path);
  const LagDesign design = lag_embed(panel, model.target, model.lag);
  const Matrix y_hat = model.predict_features(design.features);

  std::vector<std::string> times(
      panel.time_labels.begin() + model.lag, panel.time_labels.end());
  write_predictions_csv(out_path, times, y_hat, model.response_labels);

  const RmseResult r = rmse(y_hat, design.response);
  std::cout << "predictions written to " << out_path << "\n";
  std::cout << "rmse mean " << r.mean << " (per output:";
  for (Index j = 0; j < r.per_output.size(); ++j)
    std::cout << " " << r.per_output[j];
  std::cout << ")\n";
  return 0;
}

int cmd_granger(const std::string& data_path, const std::string& config_path,
                const std::string& out_path, const std::string& models_dir,
                double threshold) {
  const TimeSeriesPanel panel = read_panel_csv(data_path);
  const RunConfig cfg = read_run_config(config_path);
  const int workers = env_workers(cfg.workers);

  const std::vector<PanelModel> models =
      fit_all_nodes(panel, cfg.lag, cfg.train, cfg.dictionary, workers);
  CausalGraph graph = causal_graph(models);
  if (threshold > 0.0)
    graph.weights = (graph.weights.array() < threshold)
                        .select(0.0, graph.weights);
  write_graph_csv(out_path, graph);
  std::cout << "graph (" << graph.labels.size() << "x" << graph.labels.size()
            << ") written to " << out_path << "\n";

  const std::string stem = stem_of(out_path);
  for (const auto& m : models) {
    const std::string& node = m.nodes[static_cast<size_t>(m.target)];
    write_matrix_csv(stem + ".L." + node + ".csv", m.model.l,
                     m.response_labels, m.response_labels);
    if (!models_dir.empty())
      save_model(models_dir + "/" + node + ".model.json", m);
  }
  std::cout << "per-node output kernels written to " << stem << ".L.<node>.csv\n";
  return 0;
}

int cmd_bench(const std::string& data_path, const std::string& config_path,
              const std::string& out_path) {
  const TimeSeriesPanel panel = read_panel_csv(data_path);
  const RunConfig cfg = read_run_config(config_path);
  if (cfg.bench_cg_eps.empty() || cfg.bench_sdp_iter.empty())
    throw ConfigError("bench requires config arrays bench.cg_eps and "
                      "bench.sdp_iter");
  if (cfg.bench_holdout <= 0.0 || cfg.bench_holdout >= 1.0)
    throw ConfigError("bench.holdout must lie in (0, 1)");

  const LagDesign design = lag_embed(panel, -1, cfg.lag);
  const Index rows = design.features.rows();
  const Index test_rows =
      std::max<Index>(1, static_cast<Index>(cfg.bench_holdout * rows));
  const Index train_rows = rows - test_rows;
  if (train_rows < 2) throw DataError("bench: not enough rows to split");

  // Time-ordered split: the tail of the design is held out.
  const Matrix x_train = design.features.topRows(train_rows);
  const Matrix y_train = design.response.topRows(train_rows);
  const Matrix x_test = design.features.bottomRows(test_rows);
  const Matrix y_test = design.response.bottomRows(test_rows);

  LagDesign train_design = design;
  train_design.features = x_train;
  const KernelDictionary dict =
      build_node_dictionary(train_design, cfg.dictionary);

  const auto rows_out =
      run_bench_grid(dict, x_train, y_train, x_test, y_test, cfg.train,
                     cfg.bench_cg_eps, cfg.bench_sdp_iter);
  write_bench_csv(out_path, rows_out);
  std::cout << rows_out.size() << " trace rows ("
            << cfg.bench_cg_eps.size() * cfg.bench_sdp_iter.size()
            << " variants) written to " << out_path << "\n";
  return 0;
}

int cmd_bounds(const std::string& model_path, double lambda_norm) {
  const PanelModel pm = load_model(model_path);
  const Model& model = pm.model;
  const Index m = model.dictionary.size();
  const int l = static_cast<int>(model.x.rows());
  const double tau = model.tau;
  const double p = model.penalty.kind == PenaltyKind::Lp ? model.penalty.p : 1.0;

  // kappa = max_j sup_x k_j(x, x); Gaussian kernels have unit diagonal, the
  // rest are estimated from the training Grams.
  double kappa = 0.0;
  bool need_grams = false;
  for (const auto& spec : model.dictionary.specs) {
    if (spec.kind == KernelKind::Gaussian)
      kappa = std::max(kappa, 1.0);
    else
      need_grams = true;
  }
  Vector traces(m);
  {
    const GramSet gs(model.dictionary, model.x);
    const double trace_l = model.l.trace();
    for (Index j = 0; j < m; ++j) {
      const Matrix k = gs.materialize(j);
      traces[j] = k.trace() * trace_l;
      if (need_grams &&
          model.dictionary.specs[static_cast<size_t>(j)].kind !=
              KernelKind::Gaussian)
        kappa = std::max(kappa, k.diagonal().maxCoeff());
    }
  }

  BoundInputs inputs{lambda_norm, p, traces, l};
  std::cout << "Rademacher complexity bounds (class radius "
            << lambda_norm << ", m = " << m << ", l = " << l << ", p = " << p
            << ", kappa = " << kappa << ", tau = " << tau << ")\n";
  std::cout << std::left << std::setw(8) << "part" << std::setw(18)
            << "general" << std::setw(18) << "separable" << "\n";
  auto print_part = [&](const std::string& name, BoundPart part,
                        bool applicable) {
    std::cout << std::left << std::setw(8) << name;
    if (!applicable) {
      std::cout << std::setw(18) << "-" << std::setw(18) << "-" << "\n";
      return;
    }
    std::cout << std::setw(18) << rademacher_bound_general(inputs, part)
              << std::setw(18)
              << rademacher_bound_separable(lambda_norm, static_cast<int>(m),
                                            p, kappa, tau, l, part)
              << "\n";
  };
  print_part("A", BoundPart::A, true);
  bool b_ok = true;
  try {
    (void)rademacher_bound_general(inputs, BoundPart::B);
  } catch (const InvalidInputError&) {
    b_ok = false;
  }
  print_part("B", BoundPart::B, b_ok);
  print_part("C", BoundPart::C, p == 1.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable matrix-valued kernel learning for multivariate "
               "regression and nonlinear Granger causality"};
  app.require_subcommand(1);

  std::string data_path, config_path, out_path, model_path, models_dir;
  double lambda_norm = 1.0;
  double threshold = 0.0;

  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a panel CSV");
  fit_cmd->add_option("--data", data_path, "panel CSV")->required();
  fit_cmd->add_option("--config", config_path, "run configuration JSON")
      ->required();
  fit_cmd->add_option("--out", out_path, "output model file")->required();

  auto* predict_cmd =
      app.add_subcommand("predict", "Predict a panel with a fitted model");
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_cmd->add_option("--data", data_path, "panel CSV")->required();
  predict_cmd->add_option("--out", out_path, "predictions CSV")->required();

  auto* granger_cmd = app.add_subcommand(
      "granger", "Infer a weighted causal graph from a panel");
  granger_cmd->add_option("--data", data_path, "panel CSV")->required();
  granger_cmd->add_option("--config", config_path, "run configuration JSON")
      ->required();
  granger_cmd->add_option("--out", out_path, "graph CSV")->required();
  granger_cmd->add_option("--models-dir", models_dir,
                          "directory for per-node model files");
  granger_cmd->add_option("--threshold", threshold,
                          "zero graph entries below this weight");

  auto* bench_cmd = app.add_subcommand(
      "bench", "Trace objective vs time over a cg_eps x sdp_iter grid");
  bench_cmd->add_option("--data", data_path, "panel CSV")->required();
  bench_cmd->add_option("--config", config_path, "run configuration JSON")
      ->required();
  bench_cmd->add_option("--out", out_path, "trace CSV")->required();

  auto* bounds_cmd = app.add_subcommand(
      "bounds", "Print Rademacher complexity bounds for a fitted model");
  bounds_cmd->add_option("--model", model_path, "model file")->required();
  bounds_cmd->add_option("--lambda-norm", lambda_norm,
                         "hypothesis class radius")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(data_path, config_path, out_path);
    if (predict_cmd->parsed())
      return cmd_predict(model_path, data_path, out_path);
    if (granger_cmd->parsed())
      return cmd_granger(data_path, config_path, out_path, models_dir,
                         threshold);
    if (bench_cmd->parsed()) return cmd_bench(data_path, config_path, out_path);
    if (bounds_cmd->parsed()) return cmd_bounds(model_path, lambda_norm);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidSpecError& e) {
    std::cerr << "invalid specification: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
