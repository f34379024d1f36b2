#pragma once

#include "mvkl/common.hpp"
#include "mvkl/trainer.hpp"

#include <string>
#include <vector>

namespace mvkl {

/// Multivariate time-series panel: N named nodes, d_i coordinates each,
/// one row per time step with strictly increasing time.
struct TimeSeriesPanel {
  std::vector<std::string> nodes;
  std::vector<int> dims;
  std::vector<std::string> time_labels;
  Matrix values;  // T x (sum_i d_i)

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  Index rows() const { return values.rows(); }
  Index total_dim() const { return values.cols(); }
  Index node_offset(Index i) const;
  Index node_dim(Index i) const { return dims.at(static_cast<size_t>(i)); }
  void validate() const;
};

/// Strictly lagged regression design: the response at time t is paired with
/// per-node feature blocks x^j_{t-1} ... x^j_{t-lag} only.
struct LagDesign {
  int lag = 1;
  int target = -1;  // node index; -1 targets every node jointly
  std::vector<std::string> node_labels;
  std::vector<std::string> response_labels;
  Matrix response;  // (T - lag) x n
  Matrix features;  // (T - lag) x sum_j lag * d_j, blocks in node order
  std::vector<Index> block_offset;
  std::vector<Index> block_width;
};

LagDesign lag_embed(const TimeSeriesPanel& panel, int target, int lag);

struct DictionarySettings {
  bool linear = false;  // one linear kernel per node instead of Gaussians
  int bandwidth_count = 13;
  Vector explicit_grid;     // overrides the median-heuristic grid when set
  bool standardize = false;  // divide centered columns by their std dev
};

/// One Gaussian kernel per (node, bandwidth) over the node's lagged block,
/// grouped by node; bandwidth grids default to the per-block median
/// heuristic times 2^{-6..6}.
KernelDictionary build_node_dictionary(const LagDesign& design,
                                       const std::vector<Vector>& bandwidths);
KernelDictionary build_node_dictionary(const LagDesign& design,
                                       const DictionarySettings& settings);

/// A model fitted on a centered (optionally standardized) lag design,
/// together with the transform needed to predict on raw panel rows.
struct PanelModel {
  Model model;
  int target = -1;
  int lag = 1;
  std::vector<std::string> nodes;
  std::vector<int> dims;
  std::vector<std::string> response_labels;
  Vector feature_mean, feature_scale;
  Vector response_mean, response_scale;

  Matrix predict_features(const Matrix& raw_features) const;
  /// Lag-embeds the panel and predicts each design row.
  Matrix predict_panel(const TimeSeriesPanel& panel) const;
};

PanelModel fit_node(const TimeSeriesPanel& panel, int target, int lag,
                    const TrainConfig& cfg, const DictionarySettings& settings);

/// Joint autoregression: every node's next value as the response.
PanelModel fit_panel(const TimeSeriesPanel& panel, int lag,
                     const TrainConfig& cfg,
                     const DictionarySettings& settings);

/// Per-node fits run on up to `workers` threads (0 = hardware concurrency).
std::vector<PanelModel> fit_all_nodes(const TimeSeriesPanel& panel, int lag,
                                      const TrainConfig& cfg,
                                      const DictionarySettings& settings,
                                      int workers = 0);

struct CausalGraph {
  Matrix weights;  // G(i, j): influence of node j's history on node i
  std::vector<std::string> labels;
};

/// G_ij = sum of kernel weights grouped under node j in node i's model;
/// weights at the smoothing floor eps_eta are zeroed before summation.
CausalGraph causal_graph(const std::vector<PanelModel>& models);

struct SyntheticVarSpec {
  int nodes = 5;
  int dim = 1;  // coordinates per node
  int length = 300;
  int lag = 1;
  double density = 0.3;  // off-diagonal edge probability; self-loops always on
  bool tanh_nonlinearity = false;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

struct SyntheticVar {
  TimeSeriesPanel panel;
  /// adjacency(i, j) = 1 iff node j appears in node i's generating equation.
  Matrix adjacency;
  /// Coefficient blocks of the recursion x_t = sum_k M_k phi(x_{t-k}) + noise.
  std::vector<Matrix> coefficients;
};

/// Stable VAR(lag) plant: coefficient blocks honor the sampled adjacency and
/// are rescaled so the companion linearization has spectral radius <= 0.95.
SyntheticVar generate_synthetic_var(const SyntheticVarSpec& spec);

}  // namespace mvkl
