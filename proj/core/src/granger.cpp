#include "mvkl/granger.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

namespace mvkl {

Index TimeSeriesPanel::node_offset(Index i) const {
  Index off = 0;
  for (Index k = 0; k < i; ++k) off += node_dim(k);
  return off;
}

void TimeSeriesPanel::validate() const {
  check_input(!nodes.empty() && nodes.size() == dims.size(),
              "panel: node labels and dimensions are inconsistent");
  std::set<std::string> seen;
  Index total = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    check_input(seen.insert(nodes[i]).second,
                "panel: duplicate node label '" + nodes[i] + "'");
    check_input(dims[i] >= 1, "panel: node '" + nodes[i] + "' has no columns");
    total += dims[i];
  }
  check_input(values.cols() == total,
              "panel: value columns do not match the node partition");
  check_input(static_cast<size_t>(values.rows()) == time_labels.size(),
              "panel: time index length mismatch");
  if (!values.allFinite())
    throw DataError("panel: missing or non-finite values");
}

LagDesign lag_embed(const TimeSeriesPanel& panel, int target, int lag) {
  panel.validate();
  check_input(lag >= 1, "lag_embed: lag must be >= 1");
  check_input(target >= -1 && target < panel.node_count(),
              "lag_embed: target node out of range");
  const Index t_count = panel.rows();
  if (t_count <= lag)
    throw DataError("lag_embed: insufficient data (" +
                    std::to_string(t_count) + " rows for lag " +
                    std::to_string(lag) + ")");

  LagDesign d;
  d.lag = lag;
  d.target = target;
  d.node_labels = panel.nodes;
  const Index rows = t_count - lag;
  const Index n_nodes = panel.node_count();

  Index feat_cols = 0;
  d.block_offset.resize(static_cast<size_t>(n_nodes));
  d.block_width.resize(static_cast<size_t>(n_nodes));
  for (Index j = 0; j < n_nodes; ++j) {
    d.block_offset[static_cast<size_t>(j)] = feat_cols;
    d.block_width[static_cast<size_t>(j)] = lag * panel.node_dim(j);
    feat_cols += d.block_width[static_cast<size_t>(j)];
  }

  d.features.resize(rows, feat_cols);
  for (Index j = 0; j < n_nodes; ++j) {
    const Index off = panel.node_offset(j);
    const Index dj = panel.node_dim(j);
    for (int s = 1; s <= lag; ++s) {
      // Block column layout per node: x_{t-1}, x_{t-2}, ..., x_{t-lag}.
      const Index col = d.block_offset[static_cast<size_t>(j)] + (s - 1) * dj;
      d.features.block(0, col, rows, dj) =
          panel.values.block(lag - s, off, rows, dj);
    }
  }

  auto label_of = [&](Index node, Index k) {
    return panel.nodes[static_cast<size_t>(node)] + ":" +
           std::to_string(k + 1);
  };
  if (target >= 0) {
    const Index off = panel.node_offset(target);
    const Index dt = panel.node_dim(target);
    d.response = panel.values.block(lag, off, rows, dt);
    for (Index k = 0; k < dt; ++k)
      d.response_labels.push_back(label_of(target, k));
  } else {
    d.response = panel.values.block(lag, 0, rows, panel.total_dim());
    for (Index j = 0; j < n_nodes; ++j)
      for (Index k = 0; k < panel.node_dim(j); ++k)
        d.response_labels.push_back(label_of(j, k));
  }
  return d;
}

KernelDictionary build_node_dictionary(const LagDesign& design,
                                       const std::vector<Vector>& bandwidths) {
  check_input(bandwidths.size() == design.node_labels.size(),
              "build_node_dictionary: one bandwidth grid per node expected");
  KernelDictionary dict;
  for (size_t j = 0; j < design.node_labels.size(); ++j) {
    check_input(bandwidths[j].size() >= 1,
                "build_node_dictionary: empty bandwidth grid for node '" +
                    design.node_labels[j] + "'");
    std::vector<int> subset;
    for (Index c = 0; c < design.block_width[j]; ++c)
      subset.push_back(static_cast<int>(design.block_offset[j] + c));
    for (Index s = 0; s < bandwidths[j].size(); ++s) {
      dict.add(ScalarKernelSpec::gaussian(
                   design.node_labels[j] + ":g" + std::to_string(s + 1),
                   bandwidths[j][s], subset),
               design.node_labels[j]);
    }
  }
  return dict;
}

KernelDictionary build_node_dictionary(const LagDesign& design,
                                       const DictionarySettings& settings) {
  if (settings.linear) {
    KernelDictionary dict;
    for (size_t j = 0; j < design.node_labels.size(); ++j) {
      std::vector<int> subset;
      for (Index c = 0; c < design.block_width[j]; ++c)
        subset.push_back(static_cast<int>(design.block_offset[j] + c));
      dict.add(ScalarKernelSpec::linear(design.node_labels[j] + ":lin",
                                        subset),
               design.node_labels[j]);
    }
    return dict;
  }
  check_input(settings.bandwidth_count >= 1,
              "build_node_dictionary: empty bandwidth grid");
  std::vector<Vector> grids;
  for (size_t j = 0; j < design.node_labels.size(); ++j) {
    if (settings.explicit_grid.size() > 0) {
      grids.push_back(settings.explicit_grid);
      continue;
    }
    const Matrix block = design.features.block(
        0, design.block_offset[j], design.features.rows(),
        design.block_width[j]);
    grids.push_back(bandwidth_grid(median_heuristic_bandwidth(block),
                                   settings.bandwidth_count));
  }
  return build_node_dictionary(design, grids);
}

namespace {

Vector column_std(const Matrix& m, const Vector& mean) {
  Vector s(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double var =
        (m.col(j).array() - mean[j]).square().sum() / std::max<Index>(1, m.rows());
    s[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

PanelModel fit_design(const TimeSeriesPanel& panel, const LagDesign& design,
                      const TrainConfig& cfg,
                      const DictionarySettings& settings) {
  PanelModel pm;
  pm.target = design.target;
  pm.lag = design.lag;
  pm.nodes = panel.nodes;
  pm.dims = panel.dims;
  pm.response_labels = design.response_labels;

  pm.feature_mean = design.features.colwise().mean();
  pm.response_mean = design.response.colwise().mean();
  Matrix xf = design.features.rowwise() - pm.feature_mean.transpose();
  Matrix yf = design.response.rowwise() - pm.response_mean.transpose();
  if (settings.standardize) {
    pm.feature_scale = column_std(design.features, pm.feature_mean);
    pm.response_scale = column_std(design.response, pm.response_mean);
    xf.array().rowwise() /= pm.feature_scale.transpose().array();
    yf.array().rowwise() /= pm.response_scale.transpose().array();
  } else {
    pm.feature_scale = Vector::Ones(xf.cols());
    pm.response_scale = Vector::Ones(yf.cols());
  }

  LagDesign centered = design;
  centered.features = xf;
  const KernelDictionary dict = build_node_dictionary(centered, settings);
  pm.model = fit(dict, xf, yf, cfg);
  return pm;
}

}  // namespace

Matrix PanelModel::predict_features(const Matrix& raw_features) const {
  check_input(raw_features.cols() == feature_mean.size(),
              "PanelModel: lagged feature width mismatch");
  Matrix xf = raw_features.rowwise() - feature_mean.transpose();
  xf.array().rowwise() /= feature_scale.transpose().array();
  Matrix yf = predict(model, xf);
  yf.array().rowwise() *= response_scale.transpose().array();
  return yf.rowwise() + response_mean.transpose();
}

Matrix PanelModel::predict_panel(const TimeSeriesPanel& panel) const {
  const LagDesign d = lag_embed(panel, target, lag);
  return predict_features(d.features);
}

PanelModel fit_node(const TimeSeriesPanel& panel, int target, int lag,
                    const TrainConfig& cfg,
                    const DictionarySettings& settings) {
  check_input(target >= 0 && target < panel.node_count(),
              "fit_node: target node out of range");
  return fit_design(panel, lag_embed(panel, target, lag), cfg, settings);
}

PanelModel fit_panel(const TimeSeriesPanel& panel, int lag,
                     const TrainConfig& cfg,
                     const DictionarySettings& settings) {
  return fit_design(panel, lag_embed(panel, -1, lag), cfg, settings);
}

std::vector<PanelModel> fit_all_nodes(const TimeSeriesPanel& panel, int lag,
                                      const TrainConfig& cfg,
                                      const DictionarySettings& settings,
                                      int workers) {
  panel.validate();
  const Index n_nodes = panel.node_count();
  int w = workers > 0 ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  w = std::max(1, std::min<int>(w, static_cast<int>(n_nodes)));

  std::vector<PanelModel> out(static_cast<size_t>(n_nodes));
  if (w == 1) {
    for (Index i = 0; i < n_nodes; ++i)
      out[static_cast<size_t>(i)] =
          fit_node(panel, static_cast<int>(i), lag, cfg, settings);
    return out;
  }

  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const Index i = next.fetch_add(1);
      if (i >= n_nodes) break;
      try {
        out[static_cast<size_t>(i)] =
            fit_node(panel, static_cast<int>(i), lag, cfg, settings);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

CausalGraph causal_graph(const std::vector<PanelModel>& models) {
  check_input(!models.empty(), "causal_graph: no fitted node models");
  const Index n_nodes = static_cast<Index>(models.size());
  const auto& labels = models.front().nodes;
  for (const auto& m : models) {
    check_input(m.nodes == labels, "causal_graph: inconsistent node sets");
    check_input(m.target >= 0 && m.target < n_nodes,
                "causal_graph: node model without a target");
    check_input(m.model.fitted(), "causal_graph: unfitted node model");
  }

  CausalGraph g;
  g.labels = labels;
  g.weights = Matrix::Zero(n_nodes, n_nodes);
  for (const auto& m : models) {
    const double floor = m.model.config.eps_eta;
    const auto& dict = m.model.dictionary;
    for (Index k = 0; k < dict.size(); ++k) {
      const double w = m.model.eta[k];
      if (w <= floor) continue;  // smoothing-floor weights are zeroed
      const std::string& group = dict.group_of[static_cast<size_t>(k)];
      Index j = -1;
      for (Index cand = 0; cand < n_nodes; ++cand)
        if (labels[static_cast<size_t>(cand)] == group) {
          j = cand;
          break;
        }
      check_input(j >= 0, "causal_graph: kernel group '" + group +
                              "' is not a panel node");
      g.weights(m.target, j) += w;
    }
  }
  return g;
}

SyntheticVar generate_synthetic_var(const SyntheticVarSpec& spec) {
  check_input(spec.nodes >= 1 && spec.dim >= 1 && spec.lag >= 1,
              "generate_synthetic_var: invalid sizes");
  check_input(spec.length >= spec.lag + 2,
              "generate_synthetic_var: series too short for the lag");
  check_input(spec.density >= 0.0 && spec.density <= 1.0,
              "generate_synthetic_var: density must lie in [0, 1]");
  check_input(spec.noise_sigma >= 0.0,
              "generate_synthetic_var: negative noise level");

  const Index n_nodes = spec.nodes;
  const Index d = spec.dim;
  const Index dim_total = n_nodes * d;
  Rng rng(spec.seed);

  Matrix adjacency = Matrix::Identity(n_nodes, n_nodes);
  for (Index i = 0; i < n_nodes; ++i)
    for (Index j = 0; j < n_nodes; ++j)
      if (i != j && rng.uniform() < spec.density) adjacency(i, j) = 1.0;

  const double coeff_scale =
      0.5 / std::sqrt(static_cast<double>(spec.lag) *
                      std::max<double>(1.0, static_cast<double>(d) *
                                                (1.0 + n_nodes * spec.density)));
  std::vector<Matrix> coeff(static_cast<size_t>(spec.lag));
  for (auto& mk : coeff) {
    mk = Matrix::Zero(dim_total, dim_total);
    for (Index i = 0; i < n_nodes; ++i)
      for (Index j = 0; j < n_nodes; ++j) {
        if (adjacency(i, j) == 0.0) continue;
        mk.block(i * d, j * d, d, d) = coeff_scale * rng.normal_matrix(d, d);
      }
  }

  // Companion linearization; rescale coefficients so its spectral radius
  // stays below 0.95 (scaling M_k by c^k scales every eigenvalue by c).
  const Index comp_dim = dim_total * spec.lag;
  Matrix companion = Matrix::Zero(comp_dim, comp_dim);
  for (int k = 0; k < spec.lag; ++k)
    companion.block(0, k * dim_total, dim_total, dim_total) =
        coeff[static_cast<size_t>(k)];
  for (Index r = dim_total; r < comp_dim; ++r)
    companion(r, r - dim_total) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, false);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 1e-12) {
    const double c = 0.95 / radius;
    double ck = 1.0;
    for (int k = 0; k < spec.lag; ++k) {
      ck *= c;
      coeff[static_cast<size_t>(k)] *= ck;
    }
  }

  // Noisy plants get a burn-in toward stationarity; noiseless plants are
  // pure transients, so emitting from the start keeps every mode visible.
  const int burn_in = spec.noise_sigma > 0.0 ? 50 : 0;
  const Index total_steps = spec.length + burn_in;
  Matrix path(total_steps, dim_total);
  for (int t = 0; t < spec.lag; ++t)
    path.row(t) = rng.normal_vector(dim_total).transpose();
  for (Index t = spec.lag; t < total_steps; ++t) {
    Vector next = Vector::Zero(dim_total);
    for (int k = 1; k <= spec.lag; ++k) {
      Vector prev = path.row(t - k).transpose();
      if (spec.tanh_nonlinearity) prev = prev.array().tanh().matrix();
      next.noalias() += coeff[static_cast<size_t>(k - 1)] * prev;
    }
    if (spec.noise_sigma > 0.0)
      next += spec.noise_sigma * rng.normal_vector(dim_total);
    path.row(t) = next.transpose();
  }

  SyntheticVar out;
  out.adjacency = adjacency;
  out.coefficients = coeff;
  out.panel.values = path.bottomRows(spec.length);
  for (Index i = 0; i < n_nodes; ++i) {
    out.panel.nodes.push_back("n" + std::to_string(i + 1));
    out.panel.dims.push_back(static_cast<int>(d));
  }
  for (Index t = 0; t < spec.length; ++t)
    out.panel.time_labels.push_back(std::to_string(t + 1));
  out.panel.validate();
  return out;
}

}  // namespace mvkl
