#pragma once

#include "mvkl/common.hpp"
#include "mvkl/granger.hpp"
#include "mvkl/trainer.hpp"

#include <string>
#include <vector>

namespace mvkl {

/// Panel CSV: UTF-8, first column `t` (integer or ISO timestamp, strictly
/// increasing), remaining headers `node:dim` with contiguous columns per
/// node and dims numbered 1..d_i. Missing or non-numeric cells are rejected
/// with the offending line number.
TimeSeriesPanel read_panel_csv(const std::string& path);
void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel);

/// Structured run configuration (JSON) with sections
/// data / dictionary / train / granger / bench; unknown sections or keys are
/// rejected by name. `train.p` and `train.mu` are mutually exclusive.
struct RunConfig {
  DictionarySettings dictionary;
  TrainConfig train;
  int lag = 7;
  int workers = 0;
  std::vector<double> bench_cg_eps;
  std::vector<int> bench_sdp_iter;
  double bench_holdout = 0.25;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig read_run_config(const std::string& path);

/// Versioned model container. Tensors round-trip exactly: doubles are
/// serialized with shortest-round-trip JSON encoding.
void save_model(const std::string& path, const PanelModel& model);
PanelModel load_model(const std::string& path);

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_labels = {},
                      const std::vector<std::string>& row_labels = {});
void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& time_labels,
                           const Matrix& y_hat,
                           const std::vector<std::string>& col_labels);
void write_graph_csv(const std::string& path, const CausalGraph& graph);
CausalGraph read_graph_csv(const std::string& path);

/// All writers go through this: write to a temporary sibling then rename, so
/// interrupted runs never leave truncated outputs.
void atomic_write_text(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mvkl
