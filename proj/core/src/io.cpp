#include "mvkl/io.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace mvkl {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& cell, size_t line_no,
                  const std::string& column) {
  const std::string t = trim(cell);
  if (t.empty())
    throw DataError("line " + std::to_string(line_no) + ": missing value in "
                    "column '" + column + "'");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size())
    throw DataError("line " + std::to_string(line_no) + ": cell '" + t +
                    "' in column '" + column + "' is not numeric");
  return v;
}

bool parse_time_numeric(const std::string& label, double* out) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(label.c_str(), &end);
  if (errno != 0 || end != label.c_str() + label.size()) return false;
  *out = v;
  return true;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw DataError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DataError("cannot move '" + tmp + "' into place: " +
                    std::string(std::strerror(errno)));
  }
}

TimeSeriesPanel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");

  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line))
    throw DataError("'" + path + "' is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto headers = split_csv_line(line);
  if (headers.empty() || trim(headers[0]) != "t")
    throw DataError("line 1: first column must be 't'");

  TimeSeriesPanel panel;
  std::vector<std::string> col_node;
  for (size_t c = 1; c < headers.size(); ++c) {
    const std::string h = trim(headers[c]);
    const auto colon = h.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= h.size())
      throw DataError("line 1: column '" + h +
                      "' is not of the form node:dim");
    const std::string node = h.substr(0, colon);
    int dim = 0;
    try {
      dim = std::stoi(h.substr(colon + 1));
    } catch (const std::exception&) {
      throw DataError("line 1: column '" + h + "' has a non-integer dim");
    }
    if (panel.nodes.empty() || panel.nodes.back() != node) {
      for (const auto& seen : panel.nodes)
        if (seen == node)
          throw DataError("line 1: columns of node '" + node +
                          "' are not contiguous");
      panel.nodes.push_back(node);
      panel.dims.push_back(0);
    }
    if (dim != panel.dims.back() + 1)
      throw DataError("line 1: column '" + h + "': expected dim " +
                      std::to_string(panel.dims.back() + 1));
    panel.dims.back() = dim;
    col_node.push_back(h);
  }
  if (col_node.empty()) throw DataError("line 1: no data columns");

  std::vector<std::vector<double>> rows;
  bool time_numeric = true;
  std::vector<double> time_values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != col_node.size() + 1)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(col_node.size() + 1) + " cells, found " +
                      std::to_string(cells.size()));
    const std::string tlabel = trim(cells[0]);
    if (tlabel.empty())
      throw DataError("line " + std::to_string(line_no) + ": empty time cell");
    panel.time_labels.push_back(tlabel);
    double tv = 0.0;
    if (time_numeric && parse_time_numeric(tlabel, &tv))
      time_values.push_back(tv);
    else
      time_numeric = false;
    std::vector<double> row;
    row.reserve(col_node.size());
    for (size_t c = 0; c < col_node.size(); ++c)
      row.push_back(parse_cell(cells[c + 1], line_no, col_node[c]));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("'" + path + "' has no data rows");

  for (size_t t = 1; t < panel.time_labels.size(); ++t) {
    const bool increasing =
        time_numeric ? time_values[t] > time_values[t - 1]
                     : panel.time_labels[t] > panel.time_labels[t - 1];
    if (!increasing)
      throw DataError("line " + std::to_string(t + 2) +
                      ": time index is not strictly increasing");
  }

  panel.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(col_node.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      panel.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  panel.validate();
  return panel;
}

void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel) {
  panel.validate();
  std::ostringstream out;
  out.precision(17);
  out << "t";
  for (size_t i = 0; i < panel.nodes.size(); ++i)
    for (int k = 1; k <= panel.dims[i]; ++k)
      out << "," << panel.nodes[i] << ":" << k;
  out << "\n";
  for (Index r = 0; r < panel.rows(); ++r) {
    out << panel.time_labels[static_cast<size_t>(r)];
    for (Index c = 0; c < panel.total_dim(); ++c) out << "," << panel.values(r, c);
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

namespace {

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::vector<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const auto& key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" +
                        (section.empty() ? item.key()
                                         : section + "." + item.key()) +
                        "'");
  }
}

double require_number(const json& v, const std::string& key) {
  if (!v.is_number())
    throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(root, "",
                      {"data", "dictionary", "train", "granger", "bench"});

  RunConfig cfg;
  if (root.contains("data")) {
    const auto& d = root["data"];
    reject_unknown_keys(d, "data", {"standardize"});
    if (d.contains("standardize")) {
      if (!d["standardize"].is_boolean())
        throw ConfigError("config key 'data.standardize' must be a boolean");
      cfg.dictionary.standardize = d["standardize"].get<bool>();
    }
  }
  if (root.contains("dictionary")) {
    const auto& d = root["dictionary"];
    reject_unknown_keys(d, "dictionary",
                        {"type", "bandwidth_count", "bandwidths"});
    if (d.contains("type")) {
      const std::string type = d["type"].get<std::string>();
      if (type == "linear")
        cfg.dictionary.linear = true;
      else if (type == "gaussian")
        cfg.dictionary.linear = false;
      else
        throw ConfigError("config key 'dictionary.type' must be 'gaussian' "
                          "or 'linear'");
    }
    if (d.contains("bandwidth_count"))
      cfg.dictionary.bandwidth_count =
          require_int(d["bandwidth_count"], "dictionary.bandwidth_count");
    if (d.contains("bandwidths")) {
      if (!d["bandwidths"].is_array() || d["bandwidths"].empty())
        throw ConfigError("config key 'dictionary.bandwidths' must be a "
                          "non-empty array");
      cfg.dictionary.explicit_grid.resize(
          static_cast<Index>(d["bandwidths"].size()));
      Index i = 0;
      for (const auto& b : d["bandwidths"])
        cfg.dictionary.explicit_grid[i++] =
            require_number(b, "dictionary.bandwidths");
    }
  }
  if (root.contains("train")) {
    const auto& t = root["train"];
    reject_unknown_keys(
        t, "train",
        {"lambda", "tau", "p", "mu", "mode", "cg_eps", "sdp_iter", "outer_max",
         "outer_tol", "eps_eta", "seed", "okl_kernel"});
    if (t.contains("p") && t.contains("mu"))
      throw ConfigError("config keys 'train.p' and 'train.mu' are mutually "
                        "exclusive");
    if (t.contains("lambda"))
      cfg.train.lambda = require_number(t["lambda"], "train.lambda");
    if (t.contains("tau")) cfg.train.tau = require_number(t["tau"], "train.tau");
    if (t.contains("p"))
      cfg.train.penalty = Penalty::lp(require_number(t["p"], "train.p"));
    if (t.contains("mu"))
      cfg.train.penalty = Penalty::elastic(require_number(t["mu"], "train.mu"));
    if (t.contains("mode")) {
      const std::string mode = t["mode"].get<std::string>();
      if (mode == "IKL")
        cfg.train.mode = TrainMode::IKL;
      else if (mode == "OKL")
        cfg.train.mode = TrainMode::OKL;
      else if (mode == "IOKL")
        cfg.train.mode = TrainMode::IOKL;
      else
        throw ConfigError("config key 'train.mode' must be IKL, OKL or IOKL");
    }
    if (t.contains("cg_eps"))
      cfg.train.cg_eps = require_number(t["cg_eps"], "train.cg_eps");
    if (t.contains("sdp_iter"))
      cfg.train.sdp_iter = require_int(t["sdp_iter"], "train.sdp_iter");
    if (t.contains("outer_max"))
      cfg.train.outer_max = require_int(t["outer_max"], "train.outer_max");
    if (t.contains("outer_tol"))
      cfg.train.outer_tol = require_number(t["outer_tol"], "train.outer_tol");
    if (t.contains("eps_eta"))
      cfg.train.eps_eta = require_number(t["eps_eta"], "train.eps_eta");
    if (t.contains("seed"))
      cfg.train.seed =
          static_cast<std::uint64_t>(require_int(t["seed"], "train.seed"));
    if (t.contains("okl_kernel"))
      cfg.train.okl_kernel = require_int(t["okl_kernel"], "train.okl_kernel");
  }
  if (root.contains("granger")) {
    const auto& g = root["granger"];
    reject_unknown_keys(g, "granger", {"lag", "bandwidth_count", "workers"});
    if (g.contains("lag")) cfg.lag = require_int(g["lag"], "granger.lag");
    if (g.contains("bandwidth_count"))
      cfg.dictionary.bandwidth_count =
          require_int(g["bandwidth_count"], "granger.bandwidth_count");
    if (g.contains("workers"))
      cfg.workers = require_int(g["workers"], "granger.workers");
  }
  if (root.contains("bench")) {
    const auto& b = root["bench"];
    reject_unknown_keys(b, "bench", {"cg_eps", "sdp_iter", "holdout"});
    if (b.contains("cg_eps")) {
      if (!b["cg_eps"].is_array())
        throw ConfigError("config key 'bench.cg_eps' must be an array");
      for (const auto& v : b["cg_eps"])
        cfg.bench_cg_eps.push_back(require_number(v, "bench.cg_eps"));
    }
    if (b.contains("sdp_iter")) {
      if (!b["sdp_iter"].is_array())
        throw ConfigError("config key 'bench.sdp_iter' must be an array");
      for (const auto& v : b["sdp_iter"])
        cfg.bench_sdp_iter.push_back(require_int(v, "bench.sdp_iter"));
    }
    if (b.contains("holdout"))
      cfg.bench_holdout = require_number(b["holdout"], "bench.holdout");
  }
  return cfg;
}

RunConfig read_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path));
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw DataError("model field '" + name + "' malformed");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[static_cast<size_t>(i)].size()) != cols)
      throw DataError("model field '" + name + "' is ragged");
    for (Index jj = 0; jj < cols; ++jj)
      m(i, jj) = j[static_cast<size_t>(i)][static_cast<size_t>(jj)]
                     .get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw DataError("model field '" + name + "' malformed");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = j[static_cast<size_t>(i)].get<double>();
  return v;
}

json spec_to_json(const ScalarKernelSpec& s) {
  json o;
  o["id"] = s.id;
  switch (s.kind) {
    case KernelKind::Gaussian:
      o["kind"] = "gaussian";
      o["bandwidth"] = s.bandwidth;
      o["feature_subset"] = s.feature_subset;
      break;
    case KernelKind::Linear:
      o["kind"] = "linear";
      o["feature_subset"] = s.feature_subset;
      break;
    case KernelKind::Precomputed:
      o["kind"] = "precomputed";
      o["gram"] = matrix_to_json(s.gram_matrix);
      break;
    case KernelKind::Factorized:
      o["kind"] = "factorized";
      o["factor"] = matrix_to_json(s.factor);
      break;
  }
  return o;
}

ScalarKernelSpec spec_from_json(const json& o) {
  const std::string kind = o.at("kind").get<std::string>();
  const std::string id = o.at("id").get<std::string>();
  if (kind == "gaussian")
    return ScalarKernelSpec::gaussian(
        id, o.at("bandwidth").get<double>(),
        o.at("feature_subset").get<std::vector<int>>());
  if (kind == "linear")
    return ScalarKernelSpec::linear(
        id, o.at("feature_subset").get<std::vector<int>>());
  if (kind == "precomputed")
    return ScalarKernelSpec::precomputed(id,
                                         matrix_from_json(o.at("gram"), id));
  if (kind == "factorized")
    return ScalarKernelSpec::factorized(id,
                                        matrix_from_json(o.at("factor"), id));
  throw DataError("model file: unknown kernel kind '" + kind + "'");
}

json penalty_to_json(const Penalty& p) {
  json o;
  if (p.kind == PenaltyKind::Lp) {
    o["kind"] = "lp";
    o["p"] = p.p;
  } else {
    o["kind"] = "elastic";
    o["mu"] = p.mu;
  }
  return o;
}

Penalty penalty_from_json(const json& o) {
  const std::string kind = o.at("kind").get<std::string>();
  if (kind == "lp") return Penalty::lp(o.at("p").get<double>());
  if (kind == "elastic") return Penalty::elastic(o.at("mu").get<double>());
  throw DataError("model file: unknown penalty kind '" + kind + "'");
}

json train_config_to_json(const TrainConfig& c) {
  json o;
  o["lambda"] = c.lambda;
  o["tau"] = c.tau;
  o["penalty"] = penalty_to_json(c.penalty);
  o["mode"] = c.mode == TrainMode::IKL   ? "IKL"
              : c.mode == TrainMode::OKL ? "OKL"
                                         : "IOKL";
  o["cg_eps"] = c.cg_eps;
  o["cg_max_iter"] = c.cg_max_iter;
  o["sdp_iter"] = c.sdp_iter;
  o["outer_max"] = c.outer_max;
  o["outer_tol"] = c.outer_tol;
  o["eps_eta"] = c.eps_eta;
  o["okl_kernel"] = c.okl_kernel;
  o["seed"] = c.seed;
  return o;
}

TrainConfig train_config_from_json(const json& o) {
  TrainConfig c;
  c.lambda = o.at("lambda").get<double>();
  c.tau = o.at("tau").get<double>();
  c.penalty = penalty_from_json(o.at("penalty"));
  const std::string mode = o.at("mode").get<std::string>();
  c.mode = mode == "IKL" ? TrainMode::IKL
           : mode == "OKL" ? TrainMode::OKL
                           : TrainMode::IOKL;
  c.cg_eps = o.at("cg_eps").get<double>();
  c.cg_max_iter = o.at("cg_max_iter").get<int>();
  c.sdp_iter = o.at("sdp_iter").get<int>();
  c.outer_max = o.at("outer_max").get<int>();
  c.outer_tol = o.at("outer_tol").get<double>();
  c.eps_eta = o.at("eps_eta").get<double>();
  c.okl_kernel = o.at("okl_kernel").get<int>();
  c.seed = o.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_model(const std::string& path, const PanelModel& pm) {
  check_input(pm.model.fitted(), "save_model: model is not fitted");
  json o;
  o["format"] = "mvkl-model";
  o["version"] = 1;
  o["config"] = train_config_to_json(pm.model.config);
  json dict = json::array();
  for (size_t j = 0; j < pm.model.dictionary.specs.size(); ++j) {
    json s = spec_to_json(pm.model.dictionary.specs[j]);
    s["group"] = pm.model.dictionary.group_of[j];
    dict.push_back(std::move(s));
  }
  o["dictionary"] = std::move(dict);
  o["x"] = matrix_to_json(pm.model.x);
  o["eta"] = vector_to_json(pm.model.eta);
  o["penalty"] = penalty_to_json(pm.model.penalty);
  o["c"] = matrix_to_json(pm.model.c);
  o["l"] = matrix_to_json(pm.model.l);
  o["tau"] = pm.model.tau;
  json trace = json::array();
  for (const auto& e : pm.model.trace)
    trace.push_back({e.outer_iter, e.seconds, e.objective});
  o["trace"] = std::move(trace);

  json panel;
  panel["target"] = pm.target;
  panel["lag"] = pm.lag;
  panel["nodes"] = pm.nodes;
  panel["dims"] = pm.dims;
  panel["response_labels"] = pm.response_labels;
  panel["feature_mean"] = vector_to_json(pm.feature_mean);
  panel["feature_scale"] = vector_to_json(pm.feature_scale);
  panel["response_mean"] = vector_to_json(pm.response_mean);
  panel["response_scale"] = vector_to_json(pm.response_scale);
  o["panel"] = std::move(panel);

  atomic_write_text(path, o.dump());
}

PanelModel load_model(const std::string& path) {
  json o;
  try {
    o = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("model file '" + path + "' is not valid JSON: " +
                    e.what());
  }
  try {
    if (o.at("format").get<std::string>() != "mvkl-model")
      throw DataError("'" + path + "' is not a model file");
    if (o.at("version").get<int>() != 1)
      throw DataError("model file '" + path + "' has an unsupported version");

    PanelModel pm;
    pm.model.config = train_config_from_json(o.at("config"));
    for (const auto& s : o.at("dictionary"))
      pm.model.dictionary.add(spec_from_json(s),
                              s.at("group").get<std::string>());
    pm.model.x = matrix_from_json(o.at("x"), "x");
    pm.model.eta = vector_from_json(o.at("eta"), "eta");
    pm.model.penalty = penalty_from_json(o.at("penalty"));
    pm.model.c = matrix_from_json(o.at("c"), "c");
    pm.model.l = matrix_from_json(o.at("l"), "l");
    pm.model.tau = o.at("tau").get<double>();
    for (const auto& e : o.at("trace"))
      pm.model.trace.push_back(
          {e.at(0).get<int>(), e.at(1).get<double>(), e.at(2).get<double>()});

    const auto& panel = o.at("panel");
    pm.target = panel.at("target").get<int>();
    pm.lag = panel.at("lag").get<int>();
    pm.nodes = panel.at("nodes").get<std::vector<std::string>>();
    pm.dims = panel.at("dims").get<std::vector<int>>();
    pm.response_labels =
        panel.at("response_labels").get<std::vector<std::string>>();
    pm.feature_mean = vector_from_json(panel.at("feature_mean"), "feature_mean");
    pm.feature_scale =
        vector_from_json(panel.at("feature_scale"), "feature_scale");
    pm.response_mean =
        vector_from_json(panel.at("response_mean"), "response_mean");
    pm.response_scale =
        vector_from_json(panel.at("response_scale"), "response_scale");
    return pm;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path + "' is malformed: " + e.what());
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& col_labels,
                      const std::vector<std::string>& row_labels) {
  std::ostringstream out;
  out.precision(17);
  if (!row_labels.empty())
    check_input(static_cast<Index>(row_labels.size()) == m.rows(),
                "write_matrix_csv: row label count mismatch");
  if (!col_labels.empty()) {
    check_input(static_cast<Index>(col_labels.size()) == m.cols(),
                "write_matrix_csv: column label count mismatch");
    for (size_t c = 0; c < col_labels.size(); ++c) {
      if (c > 0 || !row_labels.empty()) out << ",";
      out << col_labels[c];
    }
    out << "\n";
  }
  for (Index i = 0; i < m.rows(); ++i) {
    if (!row_labels.empty()) out << row_labels[static_cast<size_t>(i)];
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0 || !row_labels.empty()) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& time_labels,
                           const Matrix& y_hat,
                           const std::vector<std::string>& col_labels) {
  check_input(static_cast<Index>(time_labels.size()) == y_hat.rows(),
              "write_predictions_csv: time label count mismatch");
  check_input(static_cast<Index>(col_labels.size()) == y_hat.cols(),
              "write_predictions_csv: column label count mismatch");
  std::ostringstream out;
  out.precision(17);
  out << "t";
  for (const auto& c : col_labels) out << "," << c;
  out << "\n";
  for (Index i = 0; i < y_hat.rows(); ++i) {
    out << time_labels[static_cast<size_t>(i)];
    for (Index j = 0; j < y_hat.cols(); ++j) out << "," << y_hat(i, j);
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

void write_graph_csv(const std::string& path, const CausalGraph& graph) {
  check_input(static_cast<Index>(graph.labels.size()) == graph.weights.rows() &&
                  graph.weights.rows() == graph.weights.cols(),
              "write_graph_csv: malformed graph");
  write_matrix_csv(path, graph.weights, graph.labels, graph.labels);
}

CausalGraph read_graph_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  CausalGraph g;
  for (size_t c = 1; c < header.size(); ++c) g.labels.push_back(trim(header[c]));
  const Index n = static_cast<Index>(g.labels.size());
  if (n == 0) throw DataError("'" + path + "': no graph columns");
  g.weights.resize(n, n);
  Index r = 0;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (r >= n) throw DataError("'" + path + "': too many graph rows");
    const auto cells = split_csv_line(line);
    if (static_cast<Index>(cells.size()) != n + 1)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n + 1) + " cells");
    for (Index c = 0; c < n; ++c)
      g.weights(r, c) = parse_cell(cells[static_cast<size_t>(c) + 1], line_no,
                                   g.labels[static_cast<size_t>(c)]);
    ++r;
  }
  if (r != n) throw DataError("'" + path + "': missing graph rows");
  return g;
}

}  // namespace mvkl
